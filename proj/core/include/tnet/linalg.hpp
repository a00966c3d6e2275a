#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>

// Dense complex linear algebra used by every other component. All decompositions
// go through these wrappers so the rest of the library never touches the backend
// directly and always gets the same determinism conventions.
namespace tnet {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

struct QrResult {
    ComplexMatrix q;  // orthonormal columns, (rows x k), k = min(rows, cols)
    ComplexMatrix r;  // upper triangular (k x cols), diagonal real and >= 0
};

struct SvdResult {
    ComplexMatrix u;   // orthonormal columns (rows x k)
    RealVector s;      // singular values, nonincreasing
    ComplexMatrix vh;  // orthonormal rows (k x cols)
};

struct EighResult {
    RealVector eigenvalues;     // ascending
    ComplexMatrix eigenvectors; // columns, orthonormal
};

struct KrylovParams {
    int max_dim = 30;
    double tol = 1e-12;
    bool reorthogonalize = true;
};

struct KrylovResult {
    ComplexVector w;        // approximates exp(coeff * M) v
    int dim = 0;            // Krylov dimension actually used
    double diff_norm = 0.0; // last successive-iterate difference, relative to |v|
    bool converged = false;
};

// Matrix-free action x -> M x. M must be Hermitian for krylov_expm_apply.
using LinearMap = std::function<ComplexVector(const ComplexVector&)>;

// Thin QR with the phase convention diag(r) real and nonnegative, which makes
// the factorization unique for full-rank input and the output deterministic.
QrResult qr_thin(const ComplexMatrix& m);

// Thin SVD. s is nonincreasing; u and vh carry orthonormal columns/rows.
SvdResult svd_full(const ComplexMatrix& m);

// Hermitian eigendecomposition, eigenvalues ascending. Rejects input whose
// anti-Hermitian part exceeds 1e-12 relative to its Frobenius norm.
EighResult eigh(const ComplexMatrix& m);

// Lanczos approximation of exp(coeff * M) v for Hermitian M given only the
// action of M. Builds the tridiagonal projection with full reorthogonalization
// (two Gram-Schmidt passes) and stops once two successive subspace exponentials
// agree below params.tol * |v|, or on happy breakdown (exact invariant
// subspace). For purely imaginary coeff the result norm equals |v| up to
// roundoff regardless of the reached dimension.
KrylovResult krylov_expm_apply(const LinearMap& apply_m, const ComplexVector& v,
                               Complex coeff, const KrylovParams& params = {});

}  // namespace tnet
