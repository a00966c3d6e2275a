#include "tnet/mpo.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

#include "contraction.hpp"
#include "tnet/errors.hpp"

namespace tnet {

MpoSiteTensor::MpoSiteTensor(int d_, Eigen::Index dl_, Eigen::Index dr_)
    : d(d_), dl(dl_), dr(dr_),
      blocks(static_cast<size_t>(dl_ * dr_), ComplexMatrix::Zero(d_, d_)) {}

Eigen::Index MpoTensorTrain::bond_dim(int k) const {
    if (k < 0 || k > num_sites()) throw std::out_of_range("operator bond index out of range");
    return k == 0 ? sites.front().dl : sites[static_cast<size_t>(k - 1)].dr;
}

std::vector<Eigen::Index> MpoTensorTrain::bond_dims() const {
    std::vector<Eigen::Index> out;
    out.reserve(sites.size() + 1);
    out.push_back(sites.front().dl);
    for (const MpoSiteTensor& s : sites) out.push_back(s.dr);
    return out;
}

void validate_mpo(const MpoTensorTrain& op) {
    if (op.d < 1) throw std::invalid_argument("operator train needs a physical dimension of at least 1");
    if (op.sites.empty()) throw std::invalid_argument("operator train needs at least one site");
    if (op.sites.front().dl != 1 || op.sites.back().dr != 1)
        throw std::invalid_argument("operator train must have boundary bond dimension 1");
    for (size_t n = 0; n < op.sites.size(); ++n) {
        const MpoSiteTensor& s = op.sites[n];
        if (s.d != op.d) throw std::invalid_argument("operator site " + std::to_string(n) + " has the wrong physical dimension");
        if (s.dl < 1 || s.dr < 1) throw std::invalid_argument("operator site " + std::to_string(n) + " has an empty bond");
        if (n > 0 && op.sites[n - 1].dr != s.dl)
            throw std::invalid_argument("operator bond mismatch between sites " + std::to_string(n - 1) + " and " + std::to_string(n));
        if (static_cast<Eigen::Index>(s.blocks.size()) != s.dl * s.dr)
            throw std::invalid_argument("operator site " + std::to_string(n) + " has the wrong block count");
        for (const ComplexMatrix& b : s.blocks) {
            if (b.rows() != op.d || b.cols() != op.d)
                throw std::invalid_argument("operator site " + std::to_string(n) + " has a misshapen block");
            if (!b.allFinite())
                throw std::invalid_argument("operator site " + std::to_string(n) + " has non-finite entries");
        }
    }
}

SpinOperators SpinOperators::spin1() {
    SpinOperators s;
    const double r2 = std::sqrt(2.0);
    s.id = ComplexMatrix::Identity(3, 3);
    s.sz = ComplexMatrix::Zero(3, 3);
    s.sz(0, 0) = 1.0;
    s.sz(2, 2) = -1.0;
    s.sp = ComplexMatrix::Zero(3, 3);
    s.sp(0, 1) = r2;
    s.sp(1, 2) = r2;
    s.sm = s.sp.adjoint();
    s.sx = 0.5 * (s.sp + s.sm);
    s.sy = Complex(0.0, -0.5) * (s.sp - s.sm);
    return s;
}

namespace {

void check_couplings(const XxzCouplings& c) {
    if (!std::isfinite(c.j) || !std::isfinite(c.delta))
        throw std::invalid_argument("couplings must be finite");
}

// Train of bond dimension 1: given matrices on selected sites, identity
// elsewhere.
MpoTensorTrain scalar_chain(int n_sites, int d) {
    MpoTensorTrain op;
    op.d = d;
    op.sites.assign(static_cast<size_t>(n_sites), MpoSiteTensor(d, 1, 1));
    for (MpoSiteTensor& s : op.sites) s.block(0, 0) = ComplexMatrix::Identity(d, d);
    return op;
}

}  // namespace

MpoTensorTrain build_xxz_spin1_hamiltonian(int n_sites, const XxzCouplings& c) {
    if (n_sites < 2) throw std::invalid_argument("the chain Hamiltonian needs at least two sites");
    check_couplings(c);
    const SpinOperators s = SpinOperators::spin1();
    const double half_j = 0.5 * c.j;
    const double jz = c.jz();

    // Transfer rows: 0 carries identity, 1..3 an open S+, S-, Sz from the
    // previous site, 4 a completed term.
    MpoSiteTensor interior(3, 5, 5);
    interior.block(0, 0) = s.id;
    interior.block(0, 1) = s.sp;
    interior.block(0, 2) = s.sm;
    interior.block(0, 3) = s.sz;
    interior.block(1, 4) = half_j * s.sm;
    interior.block(2, 4) = half_j * s.sp;
    interior.block(3, 4) = jz * s.sz;
    interior.block(4, 4) = s.id;

    MpoTensorTrain op;
    op.d = 3;
    op.sites.reserve(static_cast<size_t>(n_sites));
    MpoSiteTensor first(3, 1, 5);
    for (Eigen::Index wr = 0; wr < 5; ++wr) first.block(0, wr) = interior.block(0, wr);
    op.sites.push_back(std::move(first));
    for (int n = 1; n + 1 < n_sites; ++n) op.sites.push_back(interior);
    MpoSiteTensor last(3, 5, 1);
    for (Eigen::Index wl = 0; wl < 5; ++wl) last.block(wl, 0) = interior.block(wl, 4);
    op.sites.push_back(std::move(last));
    return op;
}

MpoTensorTrain local_energy_mpo(int n, int n_sites, const XxzCouplings& c) {
    if (n_sites < 2) throw std::invalid_argument("bond terms need at least two sites");
    if (n < 1 || n > n_sites - 1)
        throw std::invalid_argument("bond term index must lie in [1, n_sites - 1]");
    check_couplings(c);
    const SpinOperators s = SpinOperators::spin1();
    MpoTensorTrain op = scalar_chain(n_sites, 3);

    MpoSiteTensor a(3, 1, 3);
    a.block(0, 0) = s.sp;
    a.block(0, 1) = s.sm;
    a.block(0, 2) = s.sz;
    MpoSiteTensor b(3, 3, 1);
    b.block(0, 0) = (0.5 * c.j) * s.sm;
    b.block(1, 0) = (0.5 * c.j) * s.sp;
    b.block(2, 0) = c.jz() * s.sz;
    op.sites[static_cast<size_t>(n - 1)] = std::move(a);
    op.sites[static_cast<size_t>(n)] = std::move(b);
    return op;
}

MpoTensorTrain spin_current_mpo(int n, int n_sites, const XxzCouplings& c) {
    if (n_sites < 2) throw std::invalid_argument("the spin current needs at least two sites");
    if (n < 2 || n > n_sites)
        throw std::invalid_argument("spin current index must lie in [2, n_sites]");
    check_couplings(c);
    const SpinOperators s = SpinOperators::spin1();
    MpoTensorTrain op = scalar_chain(n_sites, 3);

    MpoSiteTensor a(3, 1, 2);
    a.block(0, 0) = s.sx;
    a.block(0, 1) = s.sy;
    MpoSiteTensor b(3, 2, 1);
    b.block(0, 0) = c.j * s.sy;
    b.block(1, 0) = -c.j * s.sx;
    op.sites[static_cast<size_t>(n - 2)] = std::move(a);
    op.sites[static_cast<size_t>(n - 1)] = std::move(b);
    return op;
}

MpoTensorTrain energy_current_mpo(int n, int n_sites, const XxzCouplings& c) {
    if (n_sites < 3) throw std::invalid_argument("the energy current needs at least three sites");
    if (n < 2 || n > n_sites - 1)
        throw std::invalid_argument("energy current index must lie in [2, n_sites - 1]");
    check_couplings(c);
    const SpinOperators s = SpinOperators::spin1();
    const double cxy = c.jx() * c.jy(), cyz = c.jy() * c.jz(), czx = c.jz() * c.jx();
    MpoTensorTrain op = scalar_chain(n_sites, 3);

    MpoSiteTensor a(3, 1, 6);
    const ComplexMatrix firsts[6] = {s.sy, s.sx, s.sz, s.sy, s.sx, s.sz};
    for (Eigen::Index k = 0; k < 6; ++k) a.block(0, k) = firsts[k];
    MpoSiteTensor m(3, 6, 6);
    const ComplexMatrix mids[6] = {s.sz, s.sz, s.sx, s.sx, s.sy, s.sy};
    for (Eigen::Index k = 0; k < 6; ++k) m.block(k, k) = mids[k];
    MpoSiteTensor b(3, 6, 1);
    b.block(0, 0) = cxy * s.sx;
    b.block(1, 0) = -cxy * s.sy;
    b.block(2, 0) = cyz * s.sy;
    b.block(3, 0) = -cyz * s.sz;
    b.block(4, 0) = czx * s.sz;
    b.block(5, 0) = -czx * s.sx;
    op.sites[static_cast<size_t>(n - 2)] = std::move(a);
    op.sites[static_cast<size_t>(n - 1)] = std::move(m);
    op.sites[static_cast<size_t>(n)] = std::move(b);
    return op;
}

MpoTensorTrain build_total_sz_mpo(int n_sites) {
    if (n_sites < 1) throw std::invalid_argument("the chain needs at least one site");
    const SpinOperators s = SpinOperators::spin1();
    MpoTensorTrain op;
    op.d = 3;
    if (n_sites == 1) {
        MpoSiteTensor only(3, 1, 1);
        only.block(0, 0) = s.sz;
        op.sites.push_back(std::move(only));
        return op;
    }
    MpoSiteTensor first(3, 1, 2);
    first.block(0, 0) = s.id;
    first.block(0, 1) = s.sz;
    MpoSiteTensor interior(3, 2, 2);
    interior.block(0, 0) = s.id;
    interior.block(0, 1) = s.sz;
    interior.block(1, 1) = s.id;
    MpoSiteTensor last(3, 2, 1);
    last.block(0, 0) = s.sz;
    last.block(1, 0) = s.id;
    op.sites.push_back(std::move(first));
    for (int n = 1; n + 1 < n_sites; ++n) op.sites.push_back(interior);
    op.sites.push_back(std::move(last));
    return op;
}

MpoTensorTrain identity_mpo(int n_sites, int d) {
    if (n_sites < 1 || d < 1) throw std::invalid_argument("identity train needs positive sizes");
    return scalar_chain(n_sites, d);
}

MpoTensorTrain adjoint_mpo(const MpoTensorTrain& op) {
    validate_mpo(op);
    MpoTensorTrain out = op;
    for (MpoSiteTensor& s : out.sites)
        for (ComplexMatrix& b : s.blocks) b = b.adjoint().eval();
    return out;
}

MpsTensorTrain mpo_to_purified_mps(const MpoTensorTrain& op) {
    validate_mpo(op);
    const int d = op.d;
    MpsTensorTrain psi;
    psi.d_loc = d * d;
    psi.sites.reserve(op.sites.size());
    for (const MpoSiteTensor& w : op.sites) {
        SiteTensor t(static_cast<size_t>(d * d));
        for (int s = 0; s < d; ++s)
            for (int sp = 0; sp < d; ++sp) {
                ComplexMatrix m(w.dl, w.dr);
                for (Eigen::Index wl = 0; wl < w.dl; ++wl)
                    for (Eigen::Index wr = 0; wr < w.dr; ++wr)
                        m(wl, wr) = w.block(wl, wr)(s, sp);
                t[static_cast<size_t>(s * d + sp)] = std::move(m);
            }
        psi.sites.push_back(std::move(t));
    }
    return psi;
}

MpoTensorTrain purified_mps_to_mpo(const MpsTensorTrain& psi) {
    validate_train(psi);
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(psi.d_loc))));
    if (d * d != psi.d_loc)
        throw std::invalid_argument("the local dimension is not a perfect square");
    MpoTensorTrain op;
    op.d = d;
    op.sites.reserve(psi.sites.size());
    for (const SiteTensor& t : psi.sites) {
        MpoSiteTensor w(d, t[0].rows(), t[0].cols());
        for (int s = 0; s < d; ++s)
            for (int sp = 0; sp < d; ++sp) {
                const ComplexMatrix& m = t[static_cast<size_t>(s * d + sp)];
                for (Eigen::Index wl = 0; wl < w.dl; ++wl)
                    for (Eigen::Index wr = 0; wr < w.dr; ++wr)
                        w.block(wl, wr)(s, sp) = m(wl, wr);
            }
        op.sites.push_back(std::move(w));
    }
    return op;
}

MpoTensorTrain build_commutator_superoperator(const MpoTensorTrain& h) {
    validate_mpo(h);
    const int d = h.d, d2 = h.d * h.d;
    const int n_sites = h.num_sites();
    MpoTensorTrain out;
    out.d = d2;
    out.sites.reserve(h.sites.size());
    for (int n = 0; n < n_sites; ++n) {
        const MpoSiteTensor& w = h.sites[static_cast<size_t>(n)];
        const bool first = (n == 0), last = (n == n_sites - 1);
        MpoSiteTensor t(d2, first ? 1 : 2 * w.dl, last ? 1 : 2 * w.dr);
        const Eigen::Index ro = first ? 0 : w.dl;  // block offsets of the 1 (x) H^T half
        const Eigen::Index co = last ? 0 : w.dr;
        const double sign = first ? -1.0 : 1.0;
        for (Eigen::Index wl = 0; wl < w.dl; ++wl)
            for (Eigen::Index wr = 0; wr < w.dr; ++wr) {
                const ComplexMatrix& b = w.block(wl, wr);
                ComplexMatrix& b1 = t.block(wl, wr);
                ComplexMatrix& b2 = t.block(ro + wl, co + wr);
                for (int s = 0; s < d; ++s)
                    for (int si = 0; si < d; ++si) {
                        const Complex v = b(s, si);
                        if (v == Complex(0.0, 0.0)) continue;
                        // -H acting on the outgoing index, identity on the
                        // primed one; the overall -1 is absorbed at site 1.
                        for (int sp = 0; sp < d; ++sp)
                            b1(s * d + sp, si * d + sp) += sign * v;
                        // identity on the outgoing index, H^T on the primed
                        // one.
                        for (int sp = 0; sp < d; ++sp)
                            b2(sp * d + si, sp * d + s) += v;
                    }
            }
        out.sites.push_back(std::move(t));
    }
    return out;
}

ComplexMatrix mpo_to_dense(const MpoTensorTrain& op, Eigen::Index cap) {
    validate_mpo(op);
    if (cap < 1) throw std::invalid_argument("the dense row cap must be positive");
    Eigen::Index dim = 1;
    for (int n = 0; n < op.num_sites(); ++n) {
        if (dim > cap / op.d)
            throw CapacityError(-1, "dense operator would exceed the row cap");
        dim *= op.d;
    }
    if (dim > (Eigen::Index(1) << 26))
        throw CapacityError(-1, "dense operator would exceed the row cap");

    const ComplexVector v = to_dense_vector(mpo_to_purified_mps(op), dim * dim);
    return purified_vector_to_dense(v, op.num_sites(), static_cast<int>(op.d));
}

ComplexMatrix purified_vector_to_dense(const ComplexVector& v, int n_sites, int d) {
    if (n_sites < 1 || d < 1)
        throw std::invalid_argument("purified_vector_to_dense: need n_sites >= 1 and d >= 1");
    Eigen::Index dim = 1;
    for (int n = 0; n < n_sites; ++n) {
        if (dim > (Eigen::Index(1) << 26) / d)
            throw std::invalid_argument("purified_vector_to_dense: dimension too large");
        dim *= d;
    }
    if (v.size() != dim * dim)
        throw std::invalid_argument("purified_vector_to_dense: vector length is not (d^2)^n");
    const Eigen::Index d2 = static_cast<Eigen::Index>(d) * d;
    ComplexMatrix out(dim, dim);
    for (Eigen::Index idx = 0; idx < v.size(); ++idx) {
        Eigen::Index tmp = idx, i = 0, j = 0, stride = 1;
        for (int n = 0; n < n_sites; ++n) {
            const Eigen::Index sigma = tmp % d2;
            tmp /= d2;
            i += (sigma / d) * stride;
            j += (sigma % d) * stride;
            stride *= d;
        }
        out(i, j) = v(idx);
    }
    return out;
}

ComplexVector mpo_apply_dense_vector(const MpoTensorTrain& op, const ComplexVector& v) {
    validate_mpo(op);
    Eigen::Index dim = 1;
    for (int n = 0; n < op.num_sites(); ++n) {
        if (dim > v.size() / op.d)
            throw std::invalid_argument("vector length does not match the operator");
        dim *= op.d;
    }
    if (dim != v.size())
        throw std::invalid_argument("vector length does not match the operator");

    const Eigen::Index d = op.d;
    std::vector<ComplexVector> cur(1, v);
    Eigen::Index prefix = 1, suffix = dim / d;
    for (int n = 0; n < op.num_sites(); ++n) {
        const detail::CompiledMpoSite w = detail::compile_site(op.sites[static_cast<size_t>(n)]);
        std::vector<ComplexVector> next(static_cast<size_t>(w.dr));
        for (const detail::MpoEntry& e : w.entries) {
            const ComplexVector& src = cur[static_cast<size_t>(e.wl)];
            if (src.size() == 0) continue;
            ComplexVector& dst = next[static_cast<size_t>(e.wr)];
            if (dst.size() == 0) dst = ComplexVector::Zero(dim);
            for (Eigen::Index i = 0; i < prefix; ++i)
                dst.segment((i * d + e.s_out) * suffix, suffix) +=
                    e.v * src.segment((i * d + e.s_in) * suffix, suffix);
        }
        for (ComplexVector& x : next)
            if (x.size() == 0) x = ComplexVector::Zero(dim);
        cur = std::move(next);
        prefix *= d;
        suffix /= d;
    }
    return cur[0];
}

Complex trace_product(const MpoTensorTrain& k, const MpsTensorTrain& o) {
    validate_mpo(k);
    if (k.num_sites() != o.num_sites() || k.d * k.d != o.d_loc)
        throw std::invalid_argument("operator and purified state have incompatible shapes");
    return inner(mpo_to_purified_mps(adjoint_mpo(k)), o);
}

Complex mpo_expectation(const MpoTensorTrain& w, const MpsTensorTrain& bra,
                        const MpsTensorTrain& ket) {
    validate_mpo(w);
    validate_train(bra);
    validate_train(ket);
    if (w.num_sites() != bra.num_sites() || w.num_sites() != ket.num_sites() ||
        w.d != bra.d_loc || w.d != ket.d_loc)
        throw std::invalid_argument("operator and states have incompatible shapes");
    detail::EnvBlock env = detail::boundary_env();
    for (int n = 0; n < w.num_sites(); ++n)
        env = detail::update_left_env(env, detail::compile_site(w.sites[static_cast<size_t>(n)]),
                                      bra.sites[static_cast<size_t>(n)],
                                      ket.sites[static_cast<size_t>(n)]);
    return env[0](0, 0);
}

double mpo_frobenius_norm(const MpoTensorTrain& op) {
    return mps_norm(mpo_to_purified_mps(op));
}

namespace {

constexpr char kMpoMagic[8] = {'T', 'N', 'E', 'T', 'M', 'P', 'O', '1'};

void write_u64(std::ostream& os, uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint64_t read_u64(std::istream& is) {
    uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!is) throw std::runtime_error("operator file is truncated");
    return v;
}

}  // namespace

void save_mpo(const std::filesystem::path& path, const MpoTensorTrain& op) {
    validate_mpo(op);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os.write(kMpoMagic, sizeof kMpoMagic);
    write_u64(os, static_cast<uint64_t>(op.num_sites()));
    write_u64(os, static_cast<uint64_t>(op.d));
    for (Eigen::Index b : op.bond_dims()) write_u64(os, static_cast<uint64_t>(b));
    for (const MpoSiteTensor& s : op.sites)
        for (const ComplexMatrix& b : s.blocks)
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                for (Eigen::Index j = 0; j < b.cols(); ++j) {
                    const double re = b(i, j).real(), im = b(i, j).imag();
                    os.write(reinterpret_cast<const char*>(&re), sizeof re);
                    os.write(reinterpret_cast<const char*>(&im), sizeof im);
                }
    if (!os) throw std::runtime_error("failed writing " + path.string());
}

MpoTensorTrain load_mpo(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string() + " for reading");
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::string(magic, 8) != std::string(kMpoMagic, 8))
        throw std::runtime_error(path.string() + " is not an operator train file");
    const uint64_t n = read_u64(is);
    const uint64_t d = read_u64(is);
    if (n == 0 || d == 0 || n > (1u << 20) || d > (1u << 20))
        throw std::runtime_error(path.string() + " has an implausible header");
    std::vector<Eigen::Index> bonds(n + 1);
    for (uint64_t k = 0; k <= n; ++k) {
        const uint64_t b = read_u64(is);
        if (b == 0 || b > (1u << 20)) throw std::runtime_error(path.string() + " has an implausible bond dimension");
        bonds[k] = static_cast<Eigen::Index>(b);
    }
    MpoTensorTrain op;
    op.d = static_cast<int>(d);
    op.sites.reserve(n);
    for (uint64_t k = 0; k < n; ++k) {
        MpoSiteTensor s(op.d, bonds[k], bonds[k + 1]);
        for (ComplexMatrix& b : s.blocks)
            for (Eigen::Index i = 0; i < b.rows(); ++i)
                for (Eigen::Index j = 0; j < b.cols(); ++j) {
                    double re = 0.0, im = 0.0;
                    is.read(reinterpret_cast<char*>(&re), sizeof re);
                    is.read(reinterpret_cast<char*>(&im), sizeof im);
                    if (!is) throw std::runtime_error(path.string() + " is truncated");
                    b(i, j) = Complex(re, im);
                }
        op.sites.push_back(std::move(s));
    }
    is.peek();
    if (!is.eof()) throw std::runtime_error(path.string() + " has trailing bytes");
    validate_mpo(op);
    return op;
}

}  // namespace tnet
