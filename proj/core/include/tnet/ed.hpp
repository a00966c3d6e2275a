#pragma once

#include "tnet/linalg.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"

namespace tnet {

// Eigendecomposition of a Hermitian matrix, reused across evolution times.
struct SpectralCache {
    RealVector evals;
    ComplexMatrix evecs;
    bool filled() const { return evecs.size() != 0; }
};

SpectralCache spectral_cache(const ComplexMatrix& h);

// Heisenberg evolution o(t) = e^{iht} o e^{-iht} through the eigenbasis of h.
// When a cache pointer is given it is filled on first use and trusted
// afterwards.
ComplexMatrix dense_evolve(const ComplexMatrix& h, const ComplexMatrix& o,
                           double t, SpectralCache* cache = nullptr);

// Schatten-1 norm of (a - b): the sum of its singular values.
double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b);

// tr[h o]; real up to roundoff when both are Hermitian.
Complex physical_energy(const ComplexMatrix& h, const ComplexMatrix& o);

struct EnergyError {
    double value = 0.0;
    // False when |tr[h o0]| is below 1e-12 |h|_F |o0|_F; value then holds the
    // absolute difference instead of the relative one.
    bool reference_ok = true;
};

EnergyError relative_energy_error(const ComplexMatrix& h, const ComplexMatrix& o0,
                                  const ComplexMatrix& ot);

struct ConservationReport {
    // max over interior n of |i[H, Sz_n] - (j_n - j_{n+1})|_F
    double max_spin_residual = 0.0;
    // max over interior n of |i[H, h_n] - (je_n - je_{n+1})|_F
    double max_energy_residual = 0.0;
    // |[H, sum_n Sz_n]|_F
    double total_sz_commutator = 0.0;
    // |H|_F, the scale against which the residuals are judged
    double h_frobenius = 0.0;
};

// Dense check that the current operators close the continuity equations on
// the open chain.
ConservationReport verify_conservation_laws(int n_sites, const XxzCouplings& c,
                                            Eigen::Index cap = 729);

// Schmidt coefficients of a dense operator viewed as a purified state, split
// after `cut` sites; normalized like the train version.
SchmidtSpectrum dense_schmidt_spectrum(const ComplexMatrix& o, int n_sites, int cut);

}  // namespace tnet
