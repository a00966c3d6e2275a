#include "tnet/tdvp.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>
#include <utility>

#include "contraction.hpp"
#include "internal.hpp"

namespace tnet {

namespace {

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;
    void bytes(const void* p, size_t n) {
        const unsigned char* c = static_cast<const unsigned char*>(p);
        for (size_t i = 0; i < n; ++i) {
            h ^= c[i];
            h *= 1099511628211ull;
        }
    }
    void u64(std::uint64_t v) { bytes(&v, sizeof v); }
    void f64(double v) {
        std::uint64_t b = 0;
        std::memcpy(&b, &v, sizeof b);
        u64(b);
    }
    void matrix(const ComplexMatrix& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                f64(m(i, j).real());
                f64(m(i, j).imag());
            }
    }
};

// Site tensors travel through the Krylov solver as flat vectors: physical
// index major, column-major within each bond matrix.
ComplexVector flatten_site(const SiteTensor& t) {
    const Eigen::Index per = t[0].size();
    ComplexVector v(static_cast<Eigen::Index>(t.size()) * per);
    for (size_t s = 0; s < t.size(); ++s)
        v.segment(static_cast<Eigen::Index>(s) * per, per) =
            Eigen::Map<const ComplexVector>(t[s].data(), per);
    return v;
}

SiteTensor unflatten_site(const ComplexVector& v, size_t d, Eigen::Index dl, Eigen::Index dr) {
    SiteTensor t(d);
    const Eigen::Index per = dl * dr;
    for (size_t s = 0; s < d; ++s)
        t[s] = Eigen::Map<const ComplexMatrix>(v.data() + static_cast<Eigen::Index>(s) * per, dl, dr);
    return t;
}

void check_pair(const MpsTensorTrain& psi, const MpoTensorTrain& w) {
    validate_train(psi);
    validate_mpo(w);
    if (psi.num_sites() != w.num_sites() || psi.d_loc != w.d)
        throw std::invalid_argument("state and operator train shapes do not match");
}

// Sweeping engine. Between steps the train is right-canonical with the center
// at site 0 and the right environments fresh at every bond; each step is the
// symmetric forward-site / backward-bond composition of two half-sweeps, with
// one environment block updated per site move.
class SweepEngine {
public:
    SweepEngine(const MpsTensorTrain& psi, const MpoTensorTrain& w, const KrylovParams& kp)
        : psi_(gauge_right(psi)), krylov_(kp), n_(psi.num_sites()) {
        wc_.reserve(w.sites.size());
        for (const MpoSiteTensor& s : w.sites) wc_.push_back(detail::compile_site(s));
        left_.assign(static_cast<size_t>(n_) + 1, {});
        right_.assign(static_cast<size_t>(n_) + 1, {});
        left_[0] = detail::boundary_env();
        right_[static_cast<size_t>(n_)] = detail::boundary_env();
        for (int n = n_ - 1; n >= 1; --n)
            right_[static_cast<size_t>(n)] =
                detail::update_right_env(right_[static_cast<size_t>(n) + 1], wc_[static_cast<size_t>(n)],
                                         psi_.sites[static_cast<size_t>(n)], psi_.sites[static_cast<size_t>(n)]);
    }

    void step(double tau) {
        const double theta = 0.5 * tau;
        for (int n = 0; n < n_; ++n) {
            site_solve(n, theta);
            if (n + 1 < n_) {
                ComplexMatrix r = detail::split_left(psi_.sites[static_cast<size_t>(n)], n + 1);
                left_[static_cast<size_t>(n) + 1] =
                    detail::update_left_env(left_[static_cast<size_t>(n)], wc_[static_cast<size_t>(n)],
                                            psi_.sites[static_cast<size_t>(n)], psi_.sites[static_cast<size_t>(n)]);
                bond_solve(n, left_[static_cast<size_t>(n) + 1], right_[static_cast<size_t>(n) + 1], r, theta);
                for (ComplexMatrix& m : psi_.sites[static_cast<size_t>(n) + 1]) m = r * m;
            }
        }
        for (int n = n_ - 1; n >= 0; --n) {
            site_solve(n, theta);
            if (n > 0) {
                ComplexMatrix l = detail::split_right(psi_.sites[static_cast<size_t>(n)], n + 1);
                right_[static_cast<size_t>(n)] =
                    detail::update_right_env(right_[static_cast<size_t>(n) + 1], wc_[static_cast<size_t>(n)],
                                             psi_.sites[static_cast<size_t>(n)], psi_.sites[static_cast<size_t>(n)]);
                bond_solve(n, left_[static_cast<size_t>(n)], right_[static_cast<size_t>(n)], l, theta);
                for (ComplexMatrix& m : psi_.sites[static_cast<size_t>(n) - 1]) m = m * l;
            }
        }
    }

    // With every non-center tensor isometric, the train norm is the center's.
    double center_norm() const {
        double s = 0.0;
        for (const ComplexMatrix& m : psi_.sites[0]) s += m.squaredNorm();
        return std::sqrt(s);
    }

    // <psi|W|psi> evaluated through the center site; exact because the
    // environments are built from the current tensors.
    Complex center_energy() const {
        const SiteTensor y = detail::apply_site_map(left_[0], right_[1], wc_[0], psi_.sites[0]);
        Complex e(0.0, 0.0);
        for (size_t s = 0; s < y.size(); ++s)
            e += (psi_.sites[0][s].conjugate().cwiseProduct(y[s])).sum();
        return e;
    }

    const MpsTensorTrain& state() const { return psi_; }

private:
    void site_solve(int n, double theta) {
        SiteTensor& t = psi_.sites[static_cast<size_t>(n)];
        const size_t d = t.size();
        const Eigen::Index dl = t[0].rows(), dr = t[0].cols();
        const auto& lenv = left_[static_cast<size_t>(n)];
        const auto& renv = right_[static_cast<size_t>(n) + 1];
        const auto& w = wc_[static_cast<size_t>(n)];
        const LinearMap map = [&](const ComplexVector& x) {
            return flatten_site(detail::apply_site_map(lenv, renv, w, unflatten_site(x, d, dl, dr)));
        };
        const KrylovResult kr = krylov_expm_apply(map, flatten_site(t), Complex(0.0, -theta), krylov_);
        if (!kr.converged)
            throw IntegratorError(n + 1, "site solve did not converge at site " + std::to_string(n + 1) +
                                             " (Krylov dimension " + std::to_string(kr.dim) +
                                             ", residual " + std::to_string(kr.diff_norm) + ")");
        t = unflatten_site(kr.w, d, dl, dr);
    }

    void bond_solve(int site_for_error, const detail::EnvBlock& lenv, const detail::EnvBlock& renv,
                    ComplexMatrix& c, double theta) {
        const Eigen::Index rows = c.rows(), cols = c.cols();
        const LinearMap map = [&](const ComplexVector& x) {
            const Eigen::Map<const ComplexMatrix> xm(x.data(), rows, cols);
            const ComplexMatrix y = detail::apply_bond_map(lenv, renv, xm);
            return ComplexVector(Eigen::Map<const ComplexVector>(y.data(), y.size()));
        };
        const ComplexVector v = Eigen::Map<const ComplexVector>(c.data(), c.size());
        const KrylovResult kr = krylov_expm_apply(map, v, Complex(0.0, theta), krylov_);
        if (!kr.converged)
            throw IntegratorError(site_for_error + 1,
                                  "bond solve did not converge next to site " + std::to_string(site_for_error + 1) +
                                      " (Krylov dimension " + std::to_string(kr.dim) +
                                      ", residual " + std::to_string(kr.diff_norm) + ")");
        c = Eigen::Map<const ComplexMatrix>(kr.w.data(), rows, cols);
    }

    MpsTensorTrain psi_;
    KrylovParams krylov_;
    int n_ = 0;
    std::vector<detail::CompiledMpoSite> wc_;
    std::vector<detail::EnvBlock> left_, right_;
};

}  // namespace

std::uint64_t environment_source_tag(const MpsTensorTrain& psi, const MpoTensorTrain& w) {
    Fnv1a f;
    f.u64(static_cast<std::uint64_t>(psi.d_loc));
    f.u64(static_cast<std::uint64_t>(psi.num_sites()));
    for (const SiteTensor& t : psi.sites)
        for (const ComplexMatrix& m : t) f.matrix(m);
    f.u64(static_cast<std::uint64_t>(w.d));
    f.u64(static_cast<std::uint64_t>(w.num_sites()));
    for (const MpoSiteTensor& s : w.sites)
        for (const ComplexMatrix& b : s.blocks) f.matrix(b);
    return f.h;
}

EnvironmentBlocks build_environments(const MpsTensorTrain& psi, const MpoTensorTrain& w) {
    check_pair(psi, w);
    const int n_sites = psi.num_sites();
    EnvironmentBlocks env;
    env.left.assign(static_cast<size_t>(n_sites) + 1, {});
    env.right.assign(static_cast<size_t>(n_sites) + 1, {});
    env.left[0] = detail::boundary_env();
    env.right[static_cast<size_t>(n_sites)] = detail::boundary_env();
    for (int n = 0; n < n_sites; ++n)
        env.left[static_cast<size_t>(n) + 1] = detail::update_left_env(
            env.left[static_cast<size_t>(n)], detail::compile_site(w.sites[static_cast<size_t>(n)]),
            psi.sites[static_cast<size_t>(n)], psi.sites[static_cast<size_t>(n)]);
    for (int n = n_sites - 1; n >= 0; --n)
        env.right[static_cast<size_t>(n)] = detail::update_right_env(
            env.right[static_cast<size_t>(n) + 1], detail::compile_site(w.sites[static_cast<size_t>(n)]),
            psi.sites[static_cast<size_t>(n)], psi.sites[static_cast<size_t>(n)]);
    env.source_tag = environment_source_tag(psi, w);
    return env;
}

Complex environment_scalar(const EnvironmentBlocks& env, int n) {
    if (n < 0 || static_cast<size_t>(n) >= env.left.size() || env.left.size() != env.right.size())
        throw std::invalid_argument("environment cut index out of range");
    const BondEnvironment& l = env.left[static_cast<size_t>(n)];
    const BondEnvironment& r = env.right[static_cast<size_t>(n)];
    if (l.size() != r.size())
        throw std::invalid_argument("left and right blocks disagree on the operator bond");
    Complex s = 0.0;
    for (size_t w = 0; w < l.size(); ++w) {
        if (l[w].rows() != r[w].rows() || l[w].cols() != r[w].cols())
            throw std::invalid_argument("left and right blocks disagree on the state bond");
        s += l[w].cwiseProduct(r[w]).sum();
    }
    return s;
}

MpsTensorTrain tdvp_sweep_step(const MpsTensorTrain& psi, const MpoTensorTrain& w,
                               double tau, const KrylovParams& krylov) {
    check_pair(psi, w);
    if (!std::isfinite(tau)) throw std::invalid_argument("step size must be finite");
    SweepEngine engine(psi, w, krylov);
    engine.step(tau);
    return gauge_left(engine.state());
}

EvolveResult evolve(const MpsTensorTrain& psi, const MpoTensorTrain& w,
                    const TdvpRunParams& params, const MpsTensorTrain* physical_reference) {
    check_pair(psi, w);
    if (!(params.tau > 0.0) || !std::isfinite(params.tau))
        throw std::invalid_argument("the step size must be positive and finite");
    if (params.n_steps < 1) throw std::invalid_argument("at least one step is required");
    const bool want_physical = params.record.physical_energy;
    if (want_physical && physical_reference == nullptr)
        throw std::invalid_argument("recording the physical energy needs a reference train");
    if (physical_reference != nullptr) {
        validate_train(*physical_reference);
        if (physical_reference->num_sites() != psi.num_sites() ||
            physical_reference->d_loc != psi.d_loc)
            throw std::invalid_argument("the reference train does not match the state");
    }

    SweepEngine engine(psi, w, params.krylov);
    EvolveResult out;
    const auto record = [&](double t) {
        out.trace.times.push_back(t);
        if (params.record.norm) out.trace.norms.push_back(engine.center_norm());
        if (params.record.superop_energy) out.trace.superop_energies.push_back(engine.center_energy());
        if (want_physical)
            out.trace.physical_energies.push_back(inner(*physical_reference, engine.state()));
    };
    record(0.0);
    for (int k = 1; k <= params.n_steps; ++k) {
        engine.step(params.tau);
        record(static_cast<double>(k) * params.tau);
    }
    out.final_state = gauge_left(engine.state());
    return out;
}

AugmentedState make_augmented_state(const MpsTensorTrain& o, const MpoTensorTrain& h,
                                    double gamma_site_factor) {
    validate_train(o);
    validate_mpo(h);
    if (o.num_sites() != h.num_sites() || o.d_loc != h.d * h.d)
        throw std::invalid_argument("the operator train does not match the purified state");
    if (!std::isfinite(gamma_site_factor) || gamma_site_factor < 0.0)
        throw std::invalid_argument("the per-site augmentation factor must be finite and nonnegative");

    AugmentedState aug;
    aug.gamma_site_factor = gamma_site_factor;
    aug.h_state = mpo_to_purified_mps(h);
    // a zero guest occupies no bond slots, so skip the embedding entirely
    const CanonicalResult canon =
        gamma_site_factor == 0.0
            ? left_normalize(o)
            : left_normalize(
                  embed_into_padding(o, scale_per_site(aug.h_state, gamma_site_factor)));
    aug.x = canon.train;
    aug.x_norm = canon.norm;
    return aug;
}

MpsTensorTrain augmented_evolve(const AugmentedState& aug, const MpoTensorTrain& w,
                                const TdvpRunParams& params, ObservableTrace* trace_out) {
    validate_train(aug.h_state);
    if (aug.h_state.num_sites() != aug.x.num_sites() || aug.h_state.d_loc != aug.x.d_loc)
        throw std::invalid_argument("augmented state and conserved-operator train do not match");
    if (!(aug.x_norm > 0.0) || !std::isfinite(aug.x_norm))
        throw std::invalid_argument("the augmented state norm must be positive and finite");

    const MpsTensorTrain* ref = params.record.physical_energy ? &aug.h_state : nullptr;
    EvolveResult r = evolve(aug.x, w, params, ref);
    if (trace_out != nullptr) *trace_out = std::move(r.trace);

    const double gamma = std::pow(aug.gamma_site_factor, aug.x.num_sites());
    MpsTensorTrain scaled = scale_global(r.final_state, Complex(aug.x_norm, 0.0));
    if (gamma == 0.0) return scaled;
    return add(scaled, scale_global(aug.h_state, Complex(-gamma, 0.0)));
}

MultiAugmentResult multi_conserved_augment(const MpsTensorTrain& o,
                                           const std::vector<MultiAugmentTerm>& ks) {
    validate_train(o);
    MultiAugmentResult out;
    out.state = o;
    out.embedded.reserve(ks.size());
    for (const MultiAugmentTerm& term : ks) {
        validate_mpo(term.k);
        if (term.k.num_sites() != o.num_sites() || term.k.d * term.k.d != o.d_loc)
            throw std::invalid_argument("conserved-operator train does not match the purified state");
        if (!std::isfinite(term.gamma_site_factor) || term.gamma_site_factor < 0.0)
            throw std::invalid_argument("the per-site augmentation factor must be finite and nonnegative");
        const MpsTensorTrain guest = scale_per_site(mpo_to_purified_mps(term.k), term.gamma_site_factor);
        try {
            out.state = embed_into_padding(out.state, guest);
            out.embedded.push_back(true);
        } catch (const CapacityError&) {
            out.state = add(out.state, guest);
            out.embedded.push_back(false);
        }
    }
    return out;
}

MpsTensorTrain multi_conserved_subtract(const MpsTensorTrain& x,
                                        const std::vector<MultiAugmentTerm>& ks) {
    validate_train(x);
    MpsTensorTrain out = x;
    for (const MultiAugmentTerm& term : ks) {
        validate_mpo(term.k);
        if (term.k.num_sites() != x.num_sites() || term.k.d * term.k.d != x.d_loc)
            throw std::invalid_argument("conserved-operator train does not match the purified state");
        const double gamma = std::pow(term.gamma_site_factor, x.num_sites());
        if (gamma == 0.0) continue;
        out = add(out, scale_global(mpo_to_purified_mps(term.k), Complex(-gamma, 0.0)));
    }
    return out;
}

}  // namespace tnet
