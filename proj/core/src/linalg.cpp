#include "tnet/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace tnet {

namespace {

void require_finite(const ComplexMatrix& m, const char* who) {
    if (!m.allFinite())
        throw std::invalid_argument(std::string(who) + ": input has non-finite entries");
}

}  // namespace

// ============================ QR ============================

QrResult qr_thin(const ComplexMatrix& m) {
    require_finite(m, "qr_thin");
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("qr_thin: empty matrix");

    const Eigen::Index k = std::min(m.rows(), m.cols());
    Eigen::HouseholderQR<ComplexMatrix> qr(m);
    QrResult out;
    out.q = qr.householderQ() * ComplexMatrix::Identity(m.rows(), k);
    out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();

    // Rotate column/row phases so diag(r) is real and >= 0; this pins the
    // otherwise arbitrary unitary phase freedom and makes the output unique.
    for (Eigen::Index i = 0; i < k; ++i) {
        const Complex d = out.r(i, i);
        const double a = std::abs(d);
        if (a > 0.0) {
            const Complex phase = d / a;
            out.q.col(i) *= phase;
            out.r.row(i) *= std::conj(phase);
            out.r(i, i) = a;  // clear roundoff in the imaginary part
        }
    }
    return out;
}

// ============================ SVD ============================

SvdResult svd_full(const ComplexMatrix& m) {
    require_finite(m, "svd_full");
    if (m.rows() == 0 || m.cols() == 0)
        throw std::invalid_argument("svd_full: empty matrix");

    Eigen::BDCSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SvdResult out;
    out.u = svd.matrixU();
    out.s = svd.singularValues();
    out.vh = svd.matrixV().adjoint();
    return out;
}

// ============================ eigh ============================

EighResult eigh(const ComplexMatrix& m) {
    require_finite(m, "eigh");
    if (m.rows() != m.cols() || m.rows() == 0)
        throw std::invalid_argument("eigh: matrix must be square and nonempty");
    const double scale = m.norm();
    const double herm_defect = (m - m.adjoint()).norm();
    if (herm_defect > 1e-12 * std::max(scale, 1e-300))
        throw std::invalid_argument("eigh: input not Hermitian (relative defect " +
                                    std::to_string(herm_defect / std::max(scale, 1e-300)) + ")");

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("eigh: eigensolver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

// ============================ Krylov exp ============================

namespace {

// y = beta0 * exp(coeff * T_m) e1 in the Krylov coefficient basis, with T_m the
// real symmetric tridiagonal (alpha, beta).
ComplexVector tridiag_expm_e1(const std::vector<double>& alpha, const std::vector<double>& beta,
                              int m, Complex coeff, double beta0) {
    Eigen::VectorXd diag(m), subdiag(std::max(m - 1, 0));
    for (int i = 0; i < m; ++i) diag(i) = alpha[static_cast<size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) subdiag(i) = beta[static_cast<size_t>(i)];

    Eigen::SelfAdjointEigenSolver<RealMatrix> es;
    es.computeFromTridiagonal(diag, subdiag);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("krylov_expm_apply: tridiagonal eigensolver failed");

    const RealMatrix& u = es.eigenvectors();
    const RealVector& lam = es.eigenvalues();
    ComplexVector y(m);
    for (int i = 0; i < m; ++i) {
        Complex acc(0.0, 0.0);
        for (int j = 0; j < m; ++j)
            acc += u(i, j) * std::exp(coeff * lam(j)) * u(0, j);
        y(i) = beta0 * acc;
    }
    return y;
}

}  // namespace

KrylovResult krylov_expm_apply(const LinearMap& apply_m, const ComplexVector& v,
                               Complex coeff, const KrylovParams& params) {
    if (params.max_dim < 1)
        throw std::invalid_argument("krylov_expm_apply: max_dim must be >= 1");
    if (!(params.tol > 0.0))
        throw std::invalid_argument("krylov_expm_apply: tol must be > 0");
    if (!std::isfinite(coeff.real()) || !std::isfinite(coeff.imag()))
        throw std::invalid_argument("krylov_expm_apply: non-finite coeff");
    if (v.size() == 0 || !v.allFinite())
        throw std::invalid_argument("krylov_expm_apply: v must be nonempty and finite");
    const double beta0 = v.norm();
    if (beta0 == 0.0)
        throw std::invalid_argument("krylov_expm_apply: v must be nonzero");

    const Eigen::Index n = v.size();
    const int mmax = static_cast<int>(std::min<Eigen::Index>(params.max_dim, n));
    ComplexMatrix basis(n, mmax);
    basis.col(0) = v / beta0;

    std::vector<double> alpha, beta;
    alpha.reserve(static_cast<size_t>(mmax));
    beta.reserve(static_cast<size_t>(mmax));

    ComplexVector y_prev;
    KrylovResult res;
    res.diff_norm = std::numeric_limits<double>::infinity();

    for (int j = 0; j < mmax; ++j) {
        ComplexVector w = apply_m(basis.col(j));
        if (w.size() != n)
            throw std::invalid_argument("krylov_expm_apply: apply_m changed the vector size");
        if (!w.allFinite())
            throw std::invalid_argument("krylov_expm_apply: apply_m produced non-finite values");

        if (j > 0) w -= beta[static_cast<size_t>(j - 1)] * basis.col(j - 1);
        const double a = std::real(basis.col(j).dot(w));  // real for Hermitian maps
        alpha.push_back(a);
        w -= a * basis.col(j);
        if (params.reorthogonalize) {
            // two classical Gram-Schmidt passes keep the basis orthonormal to roundoff
            for (int pass = 0; pass < 2; ++pass) {
                const auto vs = basis.leftCols(j + 1);
                w -= vs * (vs.adjoint() * w);
            }
        }
        const double b = w.norm();
        const int m = j + 1;

        ComplexVector y = tridiag_expm_e1(alpha, beta, m, coeff, beta0);
        double diff;
        if (m == 1) {
            diff = std::numeric_limits<double>::infinity();
        } else {
            diff = (y.head(m - 1) - y_prev).norm();
            diff = std::hypot(diff, std::abs(y(m - 1)));
        }
        res.dim = m;
        res.diff_norm = diff / beta0;

        // happy breakdown: the span is an exact invariant subspace, so the
        // subspace exponential is the exact answer
        double tnorm = 0.0;
        for (int i = 0; i < m; ++i) {
            double row = std::abs(alpha[static_cast<size_t>(i)]);
            if (i > 0) row += beta[static_cast<size_t>(i - 1)];
            if (i + 1 < m) row += beta[static_cast<size_t>(i)];
            tnorm = std::max(tnorm, row);
        }
        const bool happy = b <= 1e-14 * std::max(tnorm, 1e-300);
        const bool close = (m > 1 && diff <= params.tol * beta0);

        if (happy || close || m == mmax) {
            res.w = basis.leftCols(m) * y;
            res.converged = happy || close;
            return res;
        }

        beta.push_back(b);
        basis.col(j + 1) = w / b;
        y_prev = std::move(y);
    }

    // unreachable: the loop always returns at m == mmax
    throw std::logic_error("krylov_expm_apply: internal iteration error");
}

}  // namespace tnet
