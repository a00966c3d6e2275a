#include "contraction.hpp"

#include <stdexcept>

namespace tnet::detail {

CompiledMpoSite compile_site(const MpoSiteTensor& w) {
    CompiledMpoSite out;
    out.d = w.d;
    out.dl = w.dl;
    out.dr = w.dr;
    for (Eigen::Index wl = 0; wl < w.dl; ++wl)
        for (Eigen::Index wr = 0; wr < w.dr; ++wr) {
            const ComplexMatrix& b = w.block(wl, wr);
            for (int so = 0; so < w.d; ++so)
                for (int si = 0; si < w.d; ++si)
                    if (b(so, si) != Complex(0.0, 0.0))
                        out.entries.push_back({wl, wr, so, si, b(so, si)});
        }
    return out;
}

EnvBlock boundary_env() {
    return EnvBlock{ComplexMatrix::Ones(1, 1)};
}

namespace {

void check_env(const EnvBlock& env, Eigen::Index expect, const char* which) {
    if (static_cast<Eigen::Index>(env.size()) != expect)
        throw std::invalid_argument(std::string("environment block count does not match the operator bond (") + which + ")");
}

}  // namespace

EnvBlock update_left_env(const EnvBlock& env, const CompiledMpoSite& w,
                         const SiteTensor& bra, const SiteTensor& ket) {
    check_env(env, w.dl, "left");
    const int d = w.d;
    const Eigen::Index bl = bra[0].rows(), br = bra[0].cols();
    const Eigen::Index kl = ket[0].rows(), kr = ket[0].cols();

    ComplexMatrix env_stack(w.dl * bl, kl);
    for (Eigen::Index wl = 0; wl < w.dl; ++wl)
        env_stack.middleRows(wl * bl, bl) = env[static_cast<size_t>(wl)];
    ComplexMatrix ket_wide(kl, d * kr);
    for (int si = 0; si < d; ++si)
        ket_wide.middleCols(si * kr, kr) = ket[static_cast<size_t>(si)];
    const ComplexMatrix y = env_stack * ket_wide;

    std::vector<ComplexMatrix> z(static_cast<size_t>(w.dr));
    for (const MpoEntry& e : w.entries) {
        ComplexMatrix& zw = z[static_cast<size_t>(e.wr)];
        if (zw.size() == 0) zw = ComplexMatrix::Zero(bl, d * kr);
        zw.middleCols(e.s_out * kr, kr).noalias() +=
            e.v * y.block(e.wl * bl, e.s_in * kr, bl, kr);
    }

    EnvBlock next(static_cast<size_t>(w.dr));
    for (Eigen::Index wr = 0; wr < w.dr; ++wr) {
        ComplexMatrix acc = ComplexMatrix::Zero(br, kr);
        const ComplexMatrix& zw = z[static_cast<size_t>(wr)];
        if (zw.size() != 0)
            for (int so = 0; so < d; ++so)
                acc.noalias() += bra[static_cast<size_t>(so)].adjoint() * zw.middleCols(so * kr, kr);
        next[static_cast<size_t>(wr)] = std::move(acc);
    }
    return next;
}

EnvBlock update_right_env(const EnvBlock& env, const CompiledMpoSite& w,
                          const SiteTensor& bra, const SiteTensor& ket) {
    check_env(env, w.dr, "right");
    const int d = w.d;
    const Eigen::Index bl = bra[0].rows(), br = bra[0].cols();
    const Eigen::Index kl = ket[0].rows(), kr = ket[0].cols();

    ComplexMatrix env_stack(w.dr * br, kr);
    for (Eigen::Index wr = 0; wr < w.dr; ++wr)
        env_stack.middleRows(wr * br, br) = env[static_cast<size_t>(wr)];
    ComplexMatrix ket_tr_wide(kr, d * kl);
    for (int si = 0; si < d; ++si)
        ket_tr_wide.middleCols(si * kl, kl) = ket[static_cast<size_t>(si)].transpose();
    const ComplexMatrix y = env_stack * ket_tr_wide;

    std::vector<ComplexMatrix> z(static_cast<size_t>(w.dl));
    for (const MpoEntry& e : w.entries) {
        ComplexMatrix& zw = z[static_cast<size_t>(e.wl)];
        if (zw.size() == 0) zw = ComplexMatrix::Zero(br, d * kl);
        zw.middleCols(e.s_out * kl, kl).noalias() +=
            e.v * y.block(e.wr * br, e.s_in * kl, br, kl);
    }

    EnvBlock prev(static_cast<size_t>(w.dl));
    for (Eigen::Index wl = 0; wl < w.dl; ++wl) {
        ComplexMatrix acc = ComplexMatrix::Zero(bl, kl);
        const ComplexMatrix& zw = z[static_cast<size_t>(wl)];
        if (zw.size() != 0)
            for (int so = 0; so < d; ++so)
                acc.noalias() += bra[static_cast<size_t>(so)].conjugate() * zw.middleCols(so * kl, kl);
        prev[static_cast<size_t>(wl)] = std::move(acc);
    }
    return prev;
}

SiteTensor apply_site_map(const EnvBlock& lenv, const EnvBlock& renv,
                          const CompiledMpoSite& w, const SiteTensor& x) {
    check_env(lenv, w.dl, "left");
    check_env(renv, w.dr, "right");
    const int d = w.d;
    const Eigen::Index xl = x[0].rows(), xr = x[0].cols();
    const Eigen::Index ol = lenv[0].rows(), orr = renv[0].rows();

    ComplexMatrix l_stack(w.dl * ol, xl);
    for (Eigen::Index wl = 0; wl < w.dl; ++wl)
        l_stack.middleRows(wl * ol, ol) = lenv[static_cast<size_t>(wl)];
    ComplexMatrix x_wide(xl, d * xr);
    for (int si = 0; si < d; ++si)
        x_wide.middleCols(si * xr, xr) = x[static_cast<size_t>(si)];
    const ComplexMatrix y = l_stack * x_wide;

    std::vector<ComplexMatrix> z(static_cast<size_t>(w.dr));
    for (const MpoEntry& e : w.entries) {
        ComplexMatrix& zw = z[static_cast<size_t>(e.wr)];
        if (zw.size() == 0) zw = ComplexMatrix::Zero(ol, d * xr);
        zw.middleCols(e.s_out * xr, xr).noalias() +=
            e.v * y.block(e.wl * ol, e.s_in * xr, ol, xr);
    }

    SiteTensor out(static_cast<size_t>(d), ComplexMatrix::Zero(ol, orr));
    for (Eigen::Index wr = 0; wr < w.dr; ++wr) {
        const ComplexMatrix& zw = z[static_cast<size_t>(wr)];
        if (zw.size() == 0) continue;
        const ComplexMatrix rt = renv[static_cast<size_t>(wr)].transpose();
        for (int so = 0; so < d; ++so)
            out[static_cast<size_t>(so)].noalias() += zw.middleCols(so * xr, xr) * rt;
    }
    return out;
}

ComplexMatrix apply_bond_map(const EnvBlock& lenv, const EnvBlock& renv,
                             const ComplexMatrix& c) {
    if (lenv.size() != renv.size())
        throw std::invalid_argument("bond map needs matching environment block counts");
    const Eigen::Index ol = lenv[0].rows(), orr = renv[0].rows();
    ComplexMatrix out = ComplexMatrix::Zero(ol, orr);
    for (size_t w = 0; w < lenv.size(); ++w)
        out.noalias() += lenv[w] * c * renv[w].transpose();
    return out;
}

}  // namespace tnet::detail
