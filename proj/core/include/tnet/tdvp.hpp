#pragma once

#include <cstdint>
#include <vector>

#include "tnet/errors.hpp"
#include "tnet/linalg.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"

namespace tnet {

// One matrix per operator-bond value, each (bra-bond x ket-bond).
using BondEnvironment = std::vector<ComplexMatrix>;

// Partial contractions of <psi|W|psi>: left[n] covers the sites before
// 0-based site n, right[n] the sites from n on, so left[0] and right[N] are
// the scalar 1. Pairing left[n] with right[n] over the three bond indices
// yields <psi|W|psi> for every n.
struct EnvironmentBlocks {
    std::vector<BondEnvironment> left;
    std::vector<BondEnvironment> right;
    // Content hash of the tensors the blocks were built from, for staleness
    // checks.
    std::uint64_t source_tag = 0;
};

std::uint64_t environment_source_tag(const MpsTensorTrain& psi, const MpoTensorTrain& w);

EnvironmentBlocks build_environments(const MpsTensorTrain& psi, const MpoTensorTrain& w);

/// Pairs left[n] with right[n] into the expectation value the blocks encode.
/// The result is independent of n; n runs from 0 to the site count.
Complex environment_scalar(const EnvironmentBlocks& env, int n);

struct ObservableFlags {
    bool norm = true;
    bool superop_energy = true;
    // Needs the reference train passed to evolve().
    bool physical_energy = false;
};

struct TdvpRunParams {
    double tau = 0.0;
    int n_steps = 0;
    KrylovParams krylov;
    ObservableFlags record;
};

// Per-step series. Entry 0 describes the state before the first step, entry k
// the state after step k. Vectors for unrecorded observables stay empty.
struct ObservableTrace {
    std::vector<double> times;
    std::vector<double> norms;
    std::vector<Complex> superop_energies;   // <psi|W|psi>
    std::vector<Complex> physical_energies;  // inner(reference, psi)
};

struct EvolveResult {
    MpsTensorTrain final_state;  // left-canonical
    ObservableTrace trace;
};

// One symmetric second-order step of size tau under the operator train w:
// a left-to-right half-sweep evolving each site tensor forward by tau/2 under
// its effective one-site map and each interior bond matrix backward by tau/2
// under the effective zero-site map, then the mirrored right-to-left
// half-sweep. Takes and returns a left-canonical train; bond dimensions are
// unchanged, and norm and <psi|W|psi> are conserved up to the Krylov
// tolerance. A non-converged local solve raises IntegratorError carrying the
// 1-based site index.
MpsTensorTrain tdvp_sweep_step(const MpsTensorTrain& psi, const MpoTensorTrain& w,
                               double tau, const KrylovParams& krylov = {});

// n_steps sweep steps of size tau with per-step observable recording.
// physical_reference supplies the bra train for the physical_energy
// observable; it may be null when that flag is off.
EvolveResult evolve(const MpsTensorTrain& psi, const MpoTensorTrain& w,
                    const TdvpRunParams& params,
                    const MpsTensorTrain* physical_reference = nullptr);

// The conserved-quantity augmentation x = o + gamma * |K> realized in o's
// zero padding, normalized for the integrator. The global scale is
// gamma_site_factor^N; the per-site factor keeps tensor magnitudes sane where
// the global scale would vanish in double precision.
struct AugmentedState {
    MpsTensorTrain x;        // left-canonical, unit norm
    double x_norm = 0.0;     // norm removed by the normalization
    double gamma_site_factor = 0.0;
    MpsTensorTrain h_state;  // purified conserved operator, unscaled
};

// x = left-normalized embed_into_padding(o, gamma_per_site * purify(h)).
// Bond dimensions of x equal those of o; CapacityError propagates when the
// padding cannot hold h's train. gamma_site_factor = 0 degenerates to plain
// normalization of o.
AugmentedState make_augmented_state(const MpsTensorTrain& o, const MpoTensorTrain& h,
                                    double gamma_site_factor);

// Evolves aug.x under w, restores the recorded norm, then subtracts
// gamma * |H> by exact block-diagonal addition (interior bonds grow by the
// h_state bond dimensions in this final step only). Returns the evolved
// purified-operator train; trace_out receives the recorded series if given.
MpsTensorTrain augmented_evolve(const AugmentedState& aug, const MpoTensorTrain& w,
                                const TdvpRunParams& params,
                                ObservableTrace* trace_out = nullptr);

struct MultiAugmentTerm {
    MpoTensorTrain k;
    double gamma_site_factor = 0.0;
};

struct MultiAugmentResult {
    MpsTensorTrain state;        // o + sum_j gamma_j |K_j>, not normalized
    // Per term: true when the term was absorbed into the padding, false when
    // it fell back to a block-diagonal add (bond growth).
    std::vector<bool> embedded;
};

// Repeated embedding of several conserved-quantity terms, in list order.
MultiAugmentResult multi_conserved_augment(const MpsTensorTrain& o,
                                           const std::vector<MultiAugmentTerm>& ks);

// Subtraction counterpart: x - sum_j gamma_j |K_j> via block-diagonal adds.
MpsTensorTrain multi_conserved_subtract(const MpsTensorTrain& x,
                                        const std::vector<MultiAugmentTerm>& ks);

}  // namespace tnet
