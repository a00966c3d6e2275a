#include "tnet/ed.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnet {

SpectralCache spectral_cache(const ComplexMatrix& h) {
    const EighResult e = eigh(h);
    return SpectralCache{e.eigenvalues, e.eigenvectors};
}

ComplexMatrix dense_evolve(const ComplexMatrix& h, const ComplexMatrix& o,
                           double t, SpectralCache* cache) {
    if (h.rows() != h.cols() || o.rows() != o.cols() || h.rows() != o.rows())
        throw std::invalid_argument("evolution needs square matrices of equal dimension");
    if (!std::isfinite(t)) throw std::invalid_argument("evolution time must be finite");

    SpectralCache local;
    const SpectralCache* use = nullptr;
    if (cache != nullptr && cache->filled()) {
        if (cache->evecs.rows() != h.rows())
            throw std::invalid_argument("spectral cache does not match the Hamiltonian dimension");
        use = cache;
    } else {
        local = spectral_cache(h);
        if (cache != nullptr) *cache = local;
        use = &local;
    }

    ComplexVector phases(use->evals.size());
    for (Eigen::Index a = 0; a < phases.size(); ++a)
        phases(a) = std::exp(Complex(0.0, use->evals(a) * t));

    const ComplexMatrix& u = use->evecs;
    const ComplexMatrix rotated = u.adjoint() * o * u;
    const ComplexMatrix dephased =
        phases.asDiagonal() * rotated * phases.conjugate().asDiagonal();
    return u * dephased * u.adjoint();
}

double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("trace distance needs matching dimensions");
    return svd_full(a - b).s.sum();
}

Complex physical_energy(const ComplexMatrix& h, const ComplexMatrix& o) {
    if (h.rows() != h.cols() || o.rows() != o.cols() || h.rows() != o.rows())
        throw std::invalid_argument("trace pairing needs square matrices of equal dimension");
    return (h.transpose().cwiseProduct(o)).sum();
}

EnergyError relative_energy_error(const ComplexMatrix& h, const ComplexMatrix& o0,
                                  const ComplexMatrix& ot) {
    const Complex e0 = physical_energy(h, o0);
    const Complex et = physical_energy(h, ot);
    const double diff = std::abs(et - e0);
    const double floor = 1e-12 * h.norm() * o0.norm();
    if (std::abs(e0) <= floor) return EnergyError{diff, false};
    return EnergyError{diff / std::abs(e0), true};
}

namespace {

ComplexMatrix commutator_i(const ComplexMatrix& a, const ComplexMatrix& b) {
    return Complex(0.0, 1.0) * (a * b - b * a);
}

ComplexMatrix dense_site_sz(int n, int n_sites, Eigen::Index cap) {
    MpoTensorTrain op = identity_mpo(n_sites, 3);
    op.sites[static_cast<size_t>(n - 1)].block(0, 0) = SpinOperators::spin1().sz;
    return mpo_to_dense(op, cap);
}

}  // namespace

ConservationReport verify_conservation_laws(int n_sites, const XxzCouplings& c,
                                            Eigen::Index cap) {
    const ComplexMatrix h = mpo_to_dense(build_xxz_spin1_hamiltonian(n_sites, c), cap);
    ConservationReport report;
    report.h_frobenius = h.norm();

    for (int n = 2; n + 1 <= n_sites; ++n) {
        const ComplexMatrix lhs = commutator_i(h, dense_site_sz(n, n_sites, cap));
        const ComplexMatrix rhs = mpo_to_dense(spin_current_mpo(n, n_sites, c), cap) -
                                  mpo_to_dense(spin_current_mpo(n + 1, n_sites, c), cap);
        report.max_spin_residual = std::max(report.max_spin_residual, (lhs - rhs).norm());
    }

    for (int n = 2; n + 1 <= n_sites - 1; ++n) {
        const ComplexMatrix hn = mpo_to_dense(local_energy_mpo(n, n_sites, c), cap);
        const ComplexMatrix lhs = commutator_i(h, hn);
        const ComplexMatrix rhs = mpo_to_dense(energy_current_mpo(n, n_sites, c), cap) -
                                  mpo_to_dense(energy_current_mpo(n + 1, n_sites, c), cap);
        report.max_energy_residual = std::max(report.max_energy_residual, (lhs - rhs).norm());
    }

    const ComplexMatrix sz_total = mpo_to_dense(build_total_sz_mpo(n_sites), cap);
    report.total_sz_commutator = (h * sz_total - sz_total * h).norm();
    return report;
}

SchmidtSpectrum dense_schmidt_spectrum(const ComplexMatrix& o, int n_sites, int cut) {
    if (o.rows() != o.cols() || o.rows() < 1)
        throw std::invalid_argument("the operator must be a nonempty square matrix");
    if (n_sites < 2 || cut < 1 || cut > n_sites - 1)
        throw std::invalid_argument("the cut must lie strictly inside the chain");

    const Eigen::Index dim = o.rows();
    const int d = static_cast<int>(std::lround(std::pow(static_cast<double>(dim), 1.0 / n_sites)));
    Eigen::Index check = 1;
    for (int n = 0; n < n_sites; ++n) check *= d;
    if (d < 1 || check != dim)
        throw std::invalid_argument("the matrix dimension is not a power matching the site count");
    if (o.norm() == 0.0)
        throw std::domain_error("the zero operator has no Schmidt spectrum");

    // Left factor: the first `cut` sites' fused digits, outgoing index major
    // inside each digit. spread(x) re-expands base-d digits of x in base d^2.
    const int d2 = d * d;
    const auto spread = [d, d2](Eigen::Index x, int digits) {
        Eigen::Index out = 0, stride = 1;
        for (int k = 0; k < digits; ++k) {
            out += (x % d) * stride;
            x /= d;
            stride *= d2;
        }
        return out;
    };
    Eigen::Index rows = 1, cols = 1;
    for (int k = 0; k < cut; ++k) rows *= d2;
    for (int k = cut; k < n_sites; ++k) cols *= d2;
    Eigen::Index lo_dim = 1;
    for (int k = cut; k < n_sites; ++k) lo_dim *= d;

    std::vector<Eigen::Index> hi_spread(static_cast<size_t>(dim / lo_dim));
    std::vector<Eigen::Index> lo_spread(static_cast<size_t>(lo_dim));
    for (size_t x = 0; x < hi_spread.size(); ++x)
        hi_spread[x] = spread(static_cast<Eigen::Index>(x), cut);
    for (size_t x = 0; x < lo_spread.size(); ++x)
        lo_spread[x] = spread(static_cast<Eigen::Index>(x), n_sites - cut);

    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const Eigen::Index ihi = hi_spread[static_cast<size_t>(i / lo_dim)];
        const Eigen::Index ilo = lo_spread[static_cast<size_t>(i % lo_dim)];
        for (Eigen::Index j = 0; j < dim; ++j) {
            const Eigen::Index jhi = hi_spread[static_cast<size_t>(j / lo_dim)];
            const Eigen::Index jlo = lo_spread[static_cast<size_t>(j % lo_dim)];
            m(d * ihi + jhi, d * ilo + jlo) = o(i, j);
        }
    }

    RealVector s = svd_full(m).s;
    s /= s.norm();
    return SchmidtSpectrum{cut, std::move(s)};
}

}  // namespace tnet
