#include "tnet/mps.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "internal.hpp"
#include "tnet/errors.hpp"
#include "tnet/random.hpp"

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

namespace tnet {

Eigen::Index MpsTensorTrain::bond_dim(int k) const {
    if (k < 0 || k > num_sites()) throw std::invalid_argument("bond_dim: index out of range");
    if (k < num_sites()) return sites[static_cast<size_t>(k)][0].rows();
    return sites.back()[0].cols();
}

std::vector<Eigen::Index> MpsTensorTrain::bond_dims() const {
    std::vector<Eigen::Index> d(static_cast<size_t>(num_sites()) + 1);
    for (int k = 0; k <= num_sites(); ++k) d[static_cast<size_t>(k)] = bond_dim(k);
    return d;
}

void validate_train(const MpsTensorTrain& psi) {
    if (psi.d_loc < 1) throw std::invalid_argument("train: d_loc must be >= 1");
    if (psi.sites.empty()) throw std::invalid_argument("train: no sites");
    Eigen::Index prev = 1;
    for (size_t i = 0; i < psi.sites.size(); ++i) {
        const SiteTensor& t = psi.sites[i];
        if (static_cast<int>(t.size()) != psi.d_loc)
            throw std::invalid_argument("train: site " + std::to_string(i + 1) +
                                        " has wrong physical dimension");
        for (const ComplexMatrix& m : t) {
            if (m.rows() != t[0].rows() || m.cols() != t[0].cols())
                throw std::invalid_argument("train: ragged site tensor at site " +
                                            std::to_string(i + 1));
            if (!m.allFinite())
                throw std::invalid_argument("train: non-finite entries at site " +
                                            std::to_string(i + 1));
        }
        if (t[0].rows() != prev)
            throw std::invalid_argument("train: bond mismatch entering site " +
                                        std::to_string(i + 1));
        prev = t[0].cols();
    }
    if (psi.sites.front()[0].rows() != 1 || prev != 1)
        throw std::invalid_argument("train: boundary bond dimensions must be 1");
}

MpsTensorTrain random_gaussian_mps(int n_sites, int d_loc,
                                   const std::vector<Eigen::Index>& bond_dims,
                                   std::uint64_t seed) {
    if (n_sites < 1) throw std::invalid_argument("random_gaussian_mps: n_sites must be >= 1");
    if (d_loc < 1) throw std::invalid_argument("random_gaussian_mps: d_loc must be >= 1");
    if (bond_dims.size() != static_cast<size_t>(n_sites) + 1)
        throw std::invalid_argument("random_gaussian_mps: need n_sites + 1 bond dims");
    if (bond_dims.front() != 1 || bond_dims.back() != 1)
        throw std::invalid_argument("random_gaussian_mps: boundary bond dims must be 1");
    for (Eigen::Index d : bond_dims)
        if (d < 1) throw std::invalid_argument("random_gaussian_mps: bond dims must be >= 1");

    GaussianRng rng(seed);
    MpsTensorTrain psi;
    psi.d_loc = d_loc;
    psi.sites.resize(static_cast<size_t>(n_sites));
    for (int i = 0; i < n_sites; ++i) {
        const Eigen::Index dl = bond_dims[static_cast<size_t>(i)];
        const Eigen::Index dr = bond_dims[static_cast<size_t>(i) + 1];
        SiteTensor t(static_cast<size_t>(d_loc));
        for (int s = 0; s < d_loc; ++s) {
            ComplexMatrix m(dl, dr);
            for (Eigen::Index r = 0; r < dl; ++r)
                for (Eigen::Index c = 0; c < dr; ++c) m(r, c) = rng.complex_normal();
            t[static_cast<size_t>(s)] = std::move(m);
        }
        psi.sites[static_cast<size_t>(i)] = std::move(t);
    }
    return psi;
}

MpsTensorTrain pad_bond_dims(const MpsTensorTrain& psi, const std::vector<Eigen::Index>& target) {
    validate_train(psi);
    const int n = psi.num_sites();
    if (target.size() != static_cast<size_t>(n) + 1)
        throw std::invalid_argument("pad_bond_dims: need n_sites + 1 target dims");
    if (target.front() != 1 || target.back() != 1)
        throw std::invalid_argument("pad_bond_dims: boundary target dims must be 1");
    for (int k = 0; k <= n; ++k)
        if (target[static_cast<size_t>(k)] < psi.bond_dim(k))
            throw std::invalid_argument("pad_bond_dims: target below current dimension at bond " +
                                        std::to_string(k));

    MpsTensorTrain out;
    out.d_loc = psi.d_loc;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SiteTensor& t = psi.sites[static_cast<size_t>(i)];
        SiteTensor p(t.size());
        for (size_t s = 0; s < t.size(); ++s) {
            ComplexMatrix m = ComplexMatrix::Zero(target[static_cast<size_t>(i)],
                                                  target[static_cast<size_t>(i) + 1]);
            m.topLeftCorner(t[s].rows(), t[s].cols()) = t[s];
            p[s] = std::move(m);
        }
        out.sites[static_cast<size_t>(i)] = std::move(p);
    }
    return out;
}

Complex inner(const MpsTensorTrain& bra, const MpsTensorTrain& ket) {
    validate_train(bra);
    validate_train(ket);
    if (bra.num_sites() != ket.num_sites() || bra.d_loc != ket.d_loc)
        throw std::invalid_argument("inner: shape mismatch between bra and ket");

    ComplexMatrix env = ComplexMatrix::Ones(1, 1);
    for (int i = 0; i < bra.num_sites(); ++i) {
        const SiteTensor& b = bra.sites[static_cast<size_t>(i)];
        const SiteTensor& k = ket.sites[static_cast<size_t>(i)];
        ComplexMatrix next = ComplexMatrix::Zero(b[0].cols(), k[0].cols());
        for (int s = 0; s < bra.d_loc; ++s)
            next.noalias() += b[static_cast<size_t>(s)].adjoint() * env * k[static_cast<size_t>(s)];
        env = std::move(next);
    }
    return env(0, 0);
}

double mps_norm(const MpsTensorTrain& psi) {
    return std::sqrt(std::max(0.0, std::real(inner(psi, psi))));
}

CanonicalResult left_normalize(const MpsTensorTrain& psi) {
    validate_train(psi);
    CanonicalResult out;
    out.train = psi;
    const int n = out.train.num_sites();
    for (int i = 0; i < n; ++i) {
        ComplexMatrix r = detail::split_left(out.train.sites[static_cast<size_t>(i)], i + 1);
        if (i + 1 < n) {
            for (ComplexMatrix& m : out.train.sites[static_cast<size_t>(i) + 1]) m = r * m;
        } else {
            out.norm = std::real(r(0, 0));  // real and >= 0 by the qr convention
        }
    }
    if (out.norm <= 0.0) throw std::domain_error("left_normalize: zero train");
    return out;
}

CanonicalResult right_normalize(const MpsTensorTrain& psi) {
    validate_train(psi);
    CanonicalResult out;
    out.train = psi;
    const int n = out.train.num_sites();
    for (int i = n - 1; i >= 0; --i) {
        ComplexMatrix l = detail::split_right(out.train.sites[static_cast<size_t>(i)], i + 1);
        if (i > 0) {
            for (ComplexMatrix& m : out.train.sites[static_cast<size_t>(i) - 1]) m = m * l;
        } else {
            out.norm = std::real(l(0, 0));
        }
    }
    if (out.norm <= 0.0) throw std::domain_error("right_normalize: zero train");
    return out;
}

MpsTensorTrain gauge_left(const MpsTensorTrain& psi) {
    CanonicalResult res = left_normalize(psi);
    for (ComplexMatrix& m : res.train.sites.back()) m *= res.norm;
    return std::move(res.train);
}

MpsTensorTrain gauge_right(const MpsTensorTrain& psi) {
    CanonicalResult res = right_normalize(psi);
    for (ComplexMatrix& m : res.train.sites.front()) m *= res.norm;
    return std::move(res.train);
}

MpsTensorTrain add(const MpsTensorTrain& a, const MpsTensorTrain& b) {
    validate_train(a);
    validate_train(b);
    if (a.num_sites() != b.num_sites() || a.d_loc != b.d_loc)
        throw std::invalid_argument("add: shape mismatch");
    const int n = a.num_sites();

    MpsTensorTrain out;
    out.d_loc = a.d_loc;
    out.sites.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const SiteTensor& ta = a.sites[static_cast<size_t>(i)];
        const SiteTensor& tb = b.sites[static_cast<size_t>(i)];
        SiteTensor t(ta.size());
        for (size_t s = 0; s < ta.size(); ++s) {
            if (n == 1) {
                t[s] = ta[s] + tb[s];
            } else if (i == 0) {
                ComplexMatrix m(1, ta[s].cols() + tb[s].cols());
                m << ta[s], tb[s];
                t[s] = std::move(m);
            } else if (i == n - 1) {
                ComplexMatrix m(ta[s].rows() + tb[s].rows(), 1);
                m << ta[s], tb[s];
                t[s] = std::move(m);
            } else {
                ComplexMatrix m = ComplexMatrix::Zero(ta[s].rows() + tb[s].rows(),
                                                      ta[s].cols() + tb[s].cols());
                m.topLeftCorner(ta[s].rows(), ta[s].cols()) = ta[s];
                m.bottomRightCorner(tb[s].rows(), tb[s].cols()) = tb[s];
                t[s] = std::move(m);
            }
        }
        out.sites[static_cast<size_t>(i)] = std::move(t);
    }
    return out;
}

namespace {

// extent of the leading nonzero block: columns of the tensor left of a bond
Eigen::Index used_cols(const SiteTensor& t) {
    Eigen::Index u = 0;
    for (const ComplexMatrix& m : t)
        for (Eigen::Index c = m.cols() - 1; c >= u; --c)
            if (!m.col(c).isZero(0.0)) {
                u = c + 1;
                break;
            }
    return u;
}

Eigen::Index used_rows(const SiteTensor& t) {
    Eigen::Index u = 0;
    for (const ComplexMatrix& m : t)
        for (Eigen::Index r = m.rows() - 1; r >= u; --r)
            if (!m.row(r).isZero(0.0)) {
                u = r + 1;
                break;
            }
    return u;
}

}  // namespace

MpsTensorTrain embed_into_padding(const MpsTensorTrain& host, const MpsTensorTrain& guest) {
    validate_train(host);
    validate_train(guest);
    if (host.num_sites() != guest.num_sites() || host.d_loc != guest.d_loc)
        throw std::invalid_argument("embed_into_padding: shape mismatch");
    const int n = host.num_sites();

    // offsets at interior bonds: the guest block starts right after the host's
    // used block; everything beyond the used block is exactly zero by scan
    std::vector<Eigen::Index> off(static_cast<size_t>(n) + 1, 0);
    for (int k = 1; k < n; ++k) {
        const Eigen::Index u = std::max(used_cols(host.sites[static_cast<size_t>(k) - 1]),
                                        used_rows(host.sites[static_cast<size_t>(k)]));
        if (u + guest.bond_dim(k) > host.bond_dim(k))
            throw CapacityError(k, "embed_into_padding: bond " + std::to_string(k) +
                                       " needs " + std::to_string(u + guest.bond_dim(k)) +
                                       " but host provides " + std::to_string(host.bond_dim(k)));
        off[static_cast<size_t>(k)] = u;
    }

    MpsTensorTrain out = host;
    for (int i = 0; i < n; ++i) {
        const SiteTensor& g = guest.sites[static_cast<size_t>(i)];
        for (size_t s = 0; s < g.size(); ++s)
            out.sites[static_cast<size_t>(i)][s].block(off[static_cast<size_t>(i)],
                                                       off[static_cast<size_t>(i) + 1],
                                                       g[s].rows(), g[s].cols()) += g[s];
    }
    return out;
}

MpsTensorTrain scale_per_site(const MpsTensorTrain& psi, double factor) {
    if (!std::isfinite(factor)) throw std::invalid_argument("scale_per_site: non-finite factor");
    MpsTensorTrain out = psi;
    for (SiteTensor& t : out.sites)
        for (ComplexMatrix& m : t) m *= factor;
    return out;
}

MpsTensorTrain scale_global(const MpsTensorTrain& psi, Complex factor) {
    if (!std::isfinite(factor.real()) || !std::isfinite(factor.imag()))
        throw std::invalid_argument("scale_global: non-finite factor");
    MpsTensorTrain out = psi;
    for (ComplexMatrix& m : out.sites.back()) m *= factor;
    return out;
}

SchmidtSpectrum schmidt_spectrum(const MpsTensorTrain& psi, int cut) {
    const int n = psi.num_sites();
    if (cut < 1 || cut > n - 1)
        throw std::invalid_argument("schmidt_spectrum: cut must lie in 1..N-1");

    MpsTensorTrain t = left_normalize(psi).train;  // rejects zero trains
    for (int i = n - 1; i > cut; --i) {
        ComplexMatrix l = detail::split_right(t.sites[static_cast<size_t>(i)], i + 1);
        for (ComplexMatrix& m : t.sites[static_cast<size_t>(i) - 1]) m = m * l;
    }
    // sites left of the cut are left-isometric, sites right of it are
    // right-isometric, so the center's singular values are the coefficients
    const ComplexMatrix center = detail::right_matricize(t.sites[static_cast<size_t>(cut)]);
    RealVector s = svd_full(center).s;
    const double nrm = s.norm();
    if (nrm <= 0.0) throw std::domain_error("schmidt_spectrum: zero train");
    SchmidtSpectrum out;
    out.cut = cut;
    out.coefficients = s / nrm;
    return out;
}

double von_neumann_entropy(const SchmidtSpectrum& spectrum) {
    const RealVector& c = spectrum.coefficients;
    if (c.size() == 0) throw std::invalid_argument("von_neumann_entropy: empty spectrum");
    double sum2 = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (!(c(i) >= 0.0)) throw std::invalid_argument("von_neumann_entropy: negative coefficient");
        sum2 += c(i) * c(i);
    }
    if (std::abs(sum2 - 1.0) > 1e-10)
        throw std::invalid_argument("von_neumann_entropy: spectrum not normalized (sum of squares " +
                                    std::to_string(sum2) + ")");
    double h = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        const double p = c(i) * c(i);
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

ComplexVector to_dense_vector(const MpsTensorTrain& psi, Eigen::Index cap) {
    validate_train(psi);
    const int n = psi.num_sites();
    Eigen::Index total = 1;
    for (int i = 0; i < n; ++i) {
        if (total > cap / psi.d_loc)
            throw std::invalid_argument("to_dense_vector: d_loc^N exceeds cap " +
                                        std::to_string(cap));
        total *= psi.d_loc;
    }

    // partial amplitudes, site-1 index most significant
    ComplexMatrix part = ComplexMatrix::Ones(1, 1);
    for (int i = 0; i < n; ++i) {
        const SiteTensor& t = psi.sites[static_cast<size_t>(i)];
        const Eigen::Index rows = part.rows();
        ComplexMatrix next(rows * psi.d_loc, t[0].cols());
        for (int s = 0; s < psi.d_loc; ++s) {
            const ComplexMatrix blk = part * t[static_cast<size_t>(s)];
            for (Eigen::Index r = 0; r < rows; ++r)
                next.row(r * psi.d_loc + s) = blk.row(r);
        }
        part = std::move(next);
    }
    return part.col(0);
}

// ============================ serialization ============================

namespace {

constexpr char kMpsMagic[8] = {'T', 'N', 'E', 'T', 'M', 'P', 'S', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw std::runtime_error("train file truncated in header");
    return v;
}

}  // namespace

void save_mps(const std::filesystem::path& path, const MpsTensorTrain& psi) {
    validate_train(psi);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("save_mps: cannot open " + path.string());
    os.write(kMpsMagic, sizeof(kMpsMagic));
    write_u64(os, static_cast<std::uint64_t>(psi.num_sites()));
    write_u64(os, static_cast<std::uint64_t>(psi.d_loc));
    for (int k = 0; k <= psi.num_sites(); ++k)
        write_u64(os, static_cast<std::uint64_t>(psi.bond_dim(k)));
    for (const SiteTensor& t : psi.sites)
        for (const ComplexMatrix& m : t)
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c) {
                    const double re = m(r, c).real(), im = m(r, c).imag();
                    os.write(reinterpret_cast<const char*>(&re), sizeof(re));
                    os.write(reinterpret_cast<const char*>(&im), sizeof(im));
                }
    if (!os) throw std::runtime_error("save_mps: write failed for " + path.string());
}

MpsTensorTrain load_mps(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load_mps: cannot open " + path.string());
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMpsMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load_mps: bad magic in " + path.string());

    const std::uint64_t n = read_u64(is);
    const std::uint64_t d = read_u64(is);
    if (n < 1 || n > 1 << 20 || d < 1 || d > 1 << 20)
        throw std::runtime_error("load_mps: implausible header in " + path.string());
    std::vector<Eigen::Index> dims(n + 1);
    for (auto& x : dims) {
        x = static_cast<Eigen::Index>(read_u64(is));
        if (x < 1) throw std::runtime_error("load_mps: bad bond dimension in " + path.string());
    }
    if (dims.front() != 1 || dims.back() != 1)
        throw std::runtime_error("load_mps: boundary bond dims must be 1 in " + path.string());

    MpsTensorTrain psi;
    psi.d_loc = static_cast<int>(d);
    psi.sites.resize(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SiteTensor t(d);
        for (std::uint64_t s = 0; s < d; ++s) {
            ComplexMatrix m(dims[i], dims[i + 1]);
            for (Eigen::Index r = 0; r < m.rows(); ++r)
                for (Eigen::Index c = 0; c < m.cols(); ++c) {
                    double re, im;
                    is.read(reinterpret_cast<char*>(&re), sizeof(re));
                    is.read(reinterpret_cast<char*>(&im), sizeof(im));
                    if (!is) throw std::runtime_error("load_mps: payload truncated in " +
                                                      path.string());
                    m(r, c) = Complex(re, im);
                }
            t[s] = std::move(m);
        }
        psi.sites[i] = std::move(t);
    }
    is.peek();
    if (!is.eof()) throw std::runtime_error("load_mps: trailing bytes in " + path.string());
    validate_train(psi);
    return psi;
}

}  // namespace tnet
