#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tnet/linalg.hpp"

namespace tnet {

// One site of a tensor train: d_loc matrices of shape (left bond x right bond),
// indexed by the physical value. Index order throughout the library is
// (physical, left, right).
using SiteTensor = std::vector<ComplexMatrix>;

// Open-boundary tensor train over a physical dimension d_loc per site.
// Boundary bond dimensions are 1. For purified operators d_loc is the square
// of the underlying physical dimension.
struct MpsTensorTrain {
    int d_loc = 0;
    std::vector<SiteTensor> sites;

    int num_sites() const { return static_cast<int>(sites.size()); }
    // bond k sits left of 0-based site k; k ranges over 0..num_sites()
    Eigen::Index bond_dim(int k) const;
    std::vector<Eigen::Index> bond_dims() const;
};

// Schmidt coefficients across bond `cut` (1..N-1), nonincreasing, normalized
// so their squares sum to 1.
struct SchmidtSpectrum {
    int cut = 0;
    RealVector coefficients;
};

// Throws std::invalid_argument if the train's shape bookkeeping is broken
// (wrong tensor counts, mismatched bond dims, boundary dims != 1, non-finite
// entries).
void validate_train(const MpsTensorTrain& psi);

// Train with every entry drawn independently from a standard complex normal
// (real and imaginary parts each N(0,1), real part first). Entries are drawn
// site by site, physical index major, then row-major within each matrix, so a
// given seed pins the entire train.
MpsTensorTrain random_gaussian_mps(int n_sites, int d_loc,
                                   const std::vector<Eigen::Index>& bond_dims,
                                   std::uint64_t seed);

// Zero-pads every bond to the target dimensions; the original tensors occupy
// the leading block of each enlarged tensor and the represented state is
// unchanged.
MpsTensorTrain pad_bond_dims(const MpsTensorTrain& psi,
                             const std::vector<Eigen::Index>& target);

// <bra|ket> with the bra conjugated. For purified operator trains this equals
// tr[O_bra^dagger O_ket].
Complex inner(const MpsTensorTrain& bra, const MpsTensorTrain& ket);

double mps_norm(const MpsTensorTrain& psi);

struct CanonicalResult {
    MpsTensorTrain train;  // canonical, unit norm
    double norm = 0.0;     // nonnegative; the phase stays in the train
};

// Left-to-right QR sweep. The returned train is left-canonical with unit norm;
// the scalar remainder of the final QR is the norm (its phase is absorbed into
// the last tensor by the qr_thin diagonal convention). Zero trains are
// rejected with std::domain_error.
CanonicalResult left_normalize(const MpsTensorTrain& psi);

// Mirror image: right-canonical train plus norm, center of mass at site 1.
CanonicalResult right_normalize(const MpsTensorTrain& psi);

// State-preserving gauge moves (no normalization): the norm is multiplied back
// into the last / first tensor respectively.
MpsTensorTrain gauge_left(const MpsTensorTrain& psi);
MpsTensorTrain gauge_right(const MpsTensorTrain& psi);

// Block-diagonal sum: represents |a> + |b| exactly; interior bond dimensions
// add, boundary tensors are concatenated along the shared dimension-1 index.
MpsTensorTrain add(const MpsTensorTrain& a, const MpsTensorTrain& b);

// Writes the guest train into the host's zero padding block immediately after
// the host's used block at every interior bond; boundary tensors are summed.
// The result represents |host> + |guest> exactly without growing any bond.
// Throws CapacityError (naming the bond) if used + guest exceeds the host
// dimension at some interior bond.
MpsTensorTrain embed_into_padding(const MpsTensorTrain& host, const MpsTensorTrain& guest);

// Multiplies every site tensor by factor; the represented state is scaled by
// factor^N. Used to realize global prefactors gamma = factor^N that would
// underflow or overload a single tensor.
MpsTensorTrain scale_per_site(const MpsTensorTrain& psi, double factor);

// Multiplies the last site tensor by factor; the state is scaled by factor.
MpsTensorTrain scale_global(const MpsTensorTrain& psi, Complex factor);

// Schmidt coefficients across bond cut (1..N-1) via canonicalization and a
// bond-matrix SVD. Zero trains are rejected with std::domain_error.
SchmidtSpectrum schmidt_spectrum(const MpsTensorTrain& psi, int cut);

// -sum_i c_i^2 log c_i^2 with 0 log 0 = 0. Requires the squared coefficients
// to sum to 1 within 1e-10.
double von_neumann_entropy(const SchmidtSpectrum& spectrum);

// Full amplitude vector, site-1 index most significant. Guarded by an entry
// cap because the size is d_loc^N.
ComplexVector to_dense_vector(const MpsTensorTrain& psi,
                              Eigen::Index cap = Eigen::Index(1) << 22);

// ---- serialization ----
// Self-describing binary container: magic "TNETMPS1", then N, d_loc and the
// N+1 bond dimensions as little-endian u64, then for each site, physical index
// major, row-major complex entries as little-endian IEEE-754 doubles
// (real, imaginary).
void save_mps(const std::filesystem::path& path, const MpsTensorTrain& psi);
MpsTensorTrain load_mps(const std::filesystem::path& path);

}  // namespace tnet
