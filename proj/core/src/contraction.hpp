#pragma once

// Shared sparse-entry contraction kernels for operator trains. The operator
// site is compiled to its nonzero scalar entries once; every kernel then runs
// one stacked GEMM on the dense side, scalar axpys over the entries, and a
// final GEMM per operator-bond value. Not installed.

#include <vector>

#include "tnet/linalg.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"

namespace tnet::detail {

struct MpoEntry {
    Eigen::Index wl = 0, wr = 0;
    int s_out = 0, s_in = 0;
    Complex v;
};

struct CompiledMpoSite {
    int d = 0;
    Eigen::Index dl = 0, dr = 0;
    std::vector<MpoEntry> entries;
};

CompiledMpoSite compile_site(const MpoSiteTensor& w);

// Environment block: one (bra-bond x ket-bond) matrix per operator-bond value.
using EnvBlock = std::vector<ComplexMatrix>;

EnvBlock boundary_env();

// next[wr] = sum_entries v * bra[s_out]^dagger env[wl] ket[s_in]
EnvBlock update_left_env(const EnvBlock& env, const CompiledMpoSite& w,
                         const SiteTensor& bra, const SiteTensor& ket);

// prev[wl] = sum_entries v * conj(bra[s_out]) env[wr] ket[s_in]^T
EnvBlock update_right_env(const EnvBlock& env, const CompiledMpoSite& w,
                          const SiteTensor& bra, const SiteTensor& ket);

// y[s_out] = sum_entries v * lenv[wl] x[s_in] renv[wr]^T  (one-site map)
SiteTensor apply_site_map(const EnvBlock& lenv, const EnvBlock& renv,
                          const CompiledMpoSite& w, const SiteTensor& x);

// y = sum_w lenv[w] c renv[w]^T  (zero-site map on a bond matrix)
ComplexMatrix apply_bond_map(const EnvBlock& lenv, const EnvBlock& renv,
                             const ComplexMatrix& c);

}  // namespace tnet::detail
