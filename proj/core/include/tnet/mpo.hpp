#pragma once

#include <complex>
#include <filesystem>
#include <vector>

#include "tnet/linalg.hpp"
#include "tnet/mps.hpp"

namespace tnet {

// One matrix-product-operator site: for each pair of operator-bond values
// (wl, wr) a (d x d) physical block mapping the incoming (primed) index to the
// outgoing one. Equivalent to the rank-4 tensor W^{s,s'}_{wl,wr} with s the
// outgoing and s' the incoming physical index.
struct MpoSiteTensor {
    int d = 0;
    Eigen::Index dl = 0, dr = 0;
    std::vector<ComplexMatrix> blocks;  // indexed wl * dr + wr

    MpoSiteTensor() = default;
    MpoSiteTensor(int d_, Eigen::Index dl_, Eigen::Index dr_);
    const ComplexMatrix& block(Eigen::Index wl, Eigen::Index wr) const {
        return blocks[static_cast<size_t>(wl * dr + wr)];
    }
    ComplexMatrix& block(Eigen::Index wl, Eigen::Index wr) {
        return blocks[static_cast<size_t>(wl * dr + wr)];
    }
};

// Open-boundary operator train, boundary operator-bond dimensions 1.
struct MpoTensorTrain {
    int d = 0;
    std::vector<MpoSiteTensor> sites;

    int num_sites() const { return static_cast<int>(sites.size()); }
    Eigen::Index bond_dim(int k) const;
    std::vector<Eigen::Index> bond_dims() const;
};

void validate_mpo(const MpoTensorTrain& op);

// Spin matrices for one site. spin1() gives the spin-1 set in the basis
// (m = +1, 0, -1): sz = diag(1, 0, -1), sp|m> = sqrt(2)|m+1> etc.
struct SpinOperators {
    ComplexMatrix sx, sy, sz, sp, sm, id;
    static SpinOperators spin1();
};

// Anisotropic Heisenberg couplings. jx = jy = j, jz = j * delta.
struct XxzCouplings {
    double j = 1.0;
    double delta = 1.2;
    double jx() const { return j; }
    double jy() const { return j; }
    double jz() const { return j * delta; }
};

// H = J sum_n [ (S+_n S-_{n+1} + S-_n S+_{n+1})/2 + Delta Sz_n Sz_{n+1} ]
// as a bond-dimension-5 train (transfer rows: identity, S+, S-, Sz, completed;
// the couplings sit on the second site of each bond term).
MpoTensorTrain build_xxz_spin1_hamiltonian(int n_sites, const XxzCouplings& c);

// Bond term h_n acting on sites (n, n+1), 1 <= n <= N-1.
MpoTensorTrain local_energy_mpo(int n, int n_sites, const XxzCouplings& c);

// Spin current j_n = J (Sx_{n-1} Sy_n - Sy_{n-1} Sx_n) on sites (n-1, n),
// 2 <= n <= N. Boundary indices outside that range are rejected.
MpoTensorTrain spin_current_mpo(int n, int n_sites, const XxzCouplings& c);

// Energy current on sites (n-1, n, n+1), 2 <= n <= N-1:
//   jx jy (Sy Sz Sx - Sx Sz Sy) + jy jz (Sz Sx Sy - Sy Sx Sz)
//                               + jz jx (Sx Sy Sz - Sz Sy Sx).
MpoTensorTrain energy_current_mpo(int n, int n_sites, const XxzCouplings& c);

// sum_n Sz_n as a bond-dimension-2 train (spin 1).
MpoTensorTrain build_total_sz_mpo(int n_sites);

MpoTensorTrain identity_mpo(int n_sites, int d);

// Entry-wise adjoint: the dense counterpart of the result is the dense
// adjoint of the input.
MpoTensorTrain adjoint_mpo(const MpoTensorTrain& op);

// Operator viewed as a state over the fused physical index sigma = s * d + s'
// (outgoing index major). inner(purify(a), purify(b)) = tr[a^dagger b].
MpsTensorTrain mpo_to_purified_mps(const MpoTensorTrain& op);

// Inverse of the purification view; requires d_loc to be a perfect square.
MpoTensorTrain purified_mps_to_mpo(const MpsTensorTrain& psi);

// Superoperator O -> -[H, O] on the fused index, built as the site-wise block
// direct sum of -H (x) 1 and 1 (x) H^T (second factor acting on the primed
// index), so interior bond dimensions double. The dense counterpart is
// Hermitian and annihilates the purified H itself.
MpoTensorTrain build_commutator_superoperator(const MpoTensorTrain& h);

// Dense (d^N x d^N) matrix, site-1 indices most significant. Guarded by a row
// cap because the cost is quadratic in d^N.
ComplexMatrix mpo_to_dense(const MpoTensorTrain& op, Eigen::Index cap = 729);

// Dense action on an amplitude vector of length d^N without materializing the
// dense matrix; used to check operators that exceed the matrix cap.
ComplexVector mpo_apply_dense_vector(const MpoTensorTrain& op, const ComplexVector& v);

// Reads a length-(d^2)^n amplitude vector in the fused-index order used by the
// purified trains back into the dense (d^n x d^n) operator it encodes.
ComplexMatrix purified_vector_to_dense(const ComplexVector& v, int n_sites, int d);

// tr[k o] for the dense counterparts, evaluated as a train contraction.
Complex trace_product(const MpoTensorTrain& k, const MpsTensorTrain& o);

// <bra|W|ket> by a left-to-right environment fold.
Complex mpo_expectation(const MpoTensorTrain& w, const MpsTensorTrain& bra,
                        const MpsTensorTrain& ket);
inline Complex mpo_expectation(const MpoTensorTrain& w, const MpsTensorTrain& psi) {
    return mpo_expectation(w, psi, psi);
}

// sqrt(tr[op^dagger op]) via the purified view; never materializes the dense
// matrix.
double mpo_frobenius_norm(const MpoTensorTrain& op);

// Serialization, rank-4 variant of the train container: magic "TNETMPO1",
// then N, d and the N+1 bond dimensions as little-endian u64, then per site
// the blocks in (wl, wr) order, each row-major over (s, s') with (real,
// imaginary) little-endian doubles.
void save_mpo(const std::filesystem::path& path, const MpoTensorTrain& op);
MpoTensorTrain load_mpo(const std::filesystem::path& path);

}  // namespace tnet
