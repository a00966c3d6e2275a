// Microbenchmarks for the hot kernels at the production problem size:
// spin-1 chain of six sites, purified local dimension 9, bond dimension 81.

#include <benchmark/benchmark.h>

#include <vector>

#include "contraction.hpp"
#include "tnet/linalg.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"
#include "tnet/tdvp.hpp"

namespace {

using namespace tnet;

struct Fixture {
    MpsTensorTrain psi;
    MpoTensorTrain w;
    EnvironmentBlocks env;
    detail::CompiledMpoSite site;
    int center = 3;

    Fixture() {
        const std::vector<Eigen::Index> dims = {1, 9, 81, 81, 81, 9, 1};
        psi = left_normalize(
                  pad_bond_dims(random_gaussian_mps(6, 9, {1, 2, 2, 2, 2, 2, 1}, 1), dims))
                  .train;
        w = build_commutator_superoperator(build_xxz_spin1_hamiltonian(6, XxzCouplings{}));
        env = build_environments(psi, w);
        site = detail::compile_site(w.sites[static_cast<size_t>(center)]);
    }
};

Fixture& fixture() {
    static Fixture f;
    return f;
}

ComplexVector flatten(const SiteTensor& t) {
    const Eigen::Index per = t[0].size();
    ComplexVector v(static_cast<Eigen::Index>(t.size()) * per);
    for (size_t s = 0; s < t.size(); ++s)
        v.segment(static_cast<Eigen::Index>(s) * per, per) =
            Eigen::Map<const ComplexVector>(t[s].data(), per);
    return v;
}

SiteTensor unflatten(const ComplexVector& v, size_t d, Eigen::Index dl, Eigen::Index dr) {
    SiteTensor t(d);
    const Eigen::Index per = dl * dr;
    for (size_t s = 0; s < d; ++s)
        t[s] = Eigen::Map<const ComplexMatrix>(v.data() + static_cast<Eigen::Index>(s) * per, dl, dr);
    return t;
}

void BM_EffectiveSiteApply(benchmark::State& state) {
    Fixture& f = fixture();
    const SiteTensor& x = f.psi.sites[static_cast<size_t>(f.center)];
    const auto& lenv = f.env.left[static_cast<size_t>(f.center)];
    const auto& renv = f.env.right[static_cast<size_t>(f.center) + 1];
    for (auto _ : state) {
        SiteTensor y = detail::apply_site_map(lenv, renv, f.site, x);
        benchmark::DoNotOptimize(y);
    }
}
BENCHMARK(BM_EffectiveSiteApply)->Unit(benchmark::kMillisecond);

void BM_KrylovSiteSolve(benchmark::State& state) {
    Fixture& f = fixture();
    const SiteTensor& x = f.psi.sites[static_cast<size_t>(f.center)];
    const auto& lenv = f.env.left[static_cast<size_t>(f.center)];
    const auto& renv = f.env.right[static_cast<size_t>(f.center) + 1];
    const Eigen::Index dl = x[0].rows(), dr = x[0].cols();
    const LinearMap map = [&](const ComplexVector& v) {
        return flatten(detail::apply_site_map(lenv, renv, f.site, unflatten(v, 9, dl, dr)));
    };
    const ComplexVector v0 = flatten(x);
    for (auto _ : state) {
        KrylovResult r = krylov_expm_apply(map, v0, Complex(0.0, -0.5 / 128.0), {40, 1e-13, true});
        benchmark::DoNotOptimize(r.w);
    }
}
BENCHMARK(BM_KrylovSiteSolve)->Unit(benchmark::kMillisecond);

void BM_QrSplitKernel(benchmark::State& state) {
    Fixture& f = fixture();
    const SiteTensor& x = f.psi.sites[static_cast<size_t>(f.center)];
    const Eigen::Index dl = x[0].rows(), dr = x[0].cols();
    ComplexMatrix stacked(9 * dl, dr);
    for (Eigen::Index s = 0; s < 9; ++s)
        stacked.middleRows(s * dl, dl) = x[static_cast<size_t>(s)];
    for (auto _ : state) {
        QrResult qr = qr_thin(stacked);
        benchmark::DoNotOptimize(qr.q);
    }
}
BENCHMARK(BM_QrSplitKernel)->Unit(benchmark::kMillisecond);

void BM_EnvironmentBuild(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state) {
        EnvironmentBlocks env = build_environments(f.psi, f.w);
        benchmark::DoNotOptimize(env.left.back());
    }
}
BENCHMARK(BM_EnvironmentBuild)->Unit(benchmark::kMillisecond);

void BM_SweepStep(benchmark::State& state) {
    Fixture& f = fixture();
    for (auto _ : state) {
        MpsTensorTrain out = tdvp_sweep_step(f.psi, f.w, 1.0 / 128.0, {40, 1e-13, true});
        benchmark::DoNotOptimize(out);
    }
}
BENCHMARK(BM_SweepStep)->Unit(benchmark::kSecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
