#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "test_helpers.hpp"
#include "tnet/ed.hpp"
#include "tnet/errors.hpp"
#include "tnet/mpo.hpp"
#include "tnet/mps.hpp"
#include "tnet/tdvp.hpp"

using namespace tnet;
using namespace testutil;

namespace {

MpoTensorTrain superop(int n_sites, const XxzCouplings& c = XxzCouplings{}) {
    return build_commutator_superoperator(build_xxz_spin1_hamiltonian(n_sites, c));
}

MpsTensorTrain normalized_random(int n_sites, const std::vector<Eigen::Index>& bond_dims,
                                 std::uint64_t seed) {
    return left_normalize(random_gaussian_mps(n_sites, 9, bond_dims, seed)).train;
}

// dense unitary propagator exp(-i tau W) applied through the eigenbasis
ComplexVector dense_propagate(const ComplexMatrix& wd, const ComplexVector& v, double tau,
                              SpectralCache& cache) {
    if (!cache.filled()) cache = spectral_cache(wd);
    ComplexVector phases(cache.evals.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases(i) = std::exp(Complex(0.0, -tau * cache.evals(i)));
    return cache.evecs * (phases.asDiagonal() * (cache.evecs.adjoint() * v));
}

double dense_distance(const MpsTensorTrain& a, const MpsTensorTrain& b) {
    return (to_dense_vector(a) - to_dense_vector(b)).norm();
}

// expand the left frames of a left-canonical train: frame[n] maps bond n into
// the fused space of the first n sites, site-1 digit most significant
std::vector<ComplexMatrix> left_frames(const MpsTensorTrain& psi) {
    const int n_sites = psi.num_sites();
    const Eigen::Index d = psi.d_loc;
    std::vector<ComplexMatrix> frames(static_cast<size_t>(n_sites) + 1);
    frames[0] = ComplexMatrix::Identity(1, 1);
    for (int n = 0; n < n_sites; ++n) {
        const SiteTensor& a = psi.sites[static_cast<size_t>(n)];
        const Eigen::Index rows = frames[static_cast<size_t>(n)].rows();
        const Eigen::Index dl = a[0].rows(), dr = a[0].cols();
        ComplexMatrix next = ComplexMatrix::Zero(rows * d, dr);
        for (Eigen::Index s = 0; s < d; ++s) {
            const ComplexMatrix contrib = frames[static_cast<size_t>(n)] * a[static_cast<size_t>(s)];
            for (Eigen::Index p = 0; p < rows; ++p) next.row(p * d + s) += contrib.row(p);
        }
        frames[static_cast<size_t>(n) + 1] = next;
        (void)dl;
    }
    return frames;
}

// right frames of a right-canonical tail: frame[n] maps bond n into the fused
// space of sites n+1..N
std::vector<ComplexMatrix> right_frames(const MpsTensorTrain& psi) {
    const int n_sites = psi.num_sites();
    const Eigen::Index d = psi.d_loc;
    std::vector<ComplexMatrix> frames(static_cast<size_t>(n_sites) + 1);
    frames[static_cast<size_t>(n_sites)] = ComplexMatrix::Identity(1, 1);
    for (int n = n_sites - 1; n >= 0; --n) {
        const SiteTensor& b = psi.sites[static_cast<size_t>(n)];
        const ComplexMatrix& tail = frames[static_cast<size_t>(n) + 1];
        const Eigen::Index rows = tail.rows();
        const Eigen::Index dl = b[0].rows();
        ComplexMatrix cur = ComplexMatrix::Zero(d * rows, dl);
        for (Eigen::Index s = 0; s < d; ++s)
            cur.middleRows(s * rows, rows) = tail * b[static_cast<size_t>(s)].transpose();
        frames[static_cast<size_t>(n)] = cur;
    }
    return frames;
}

}  // namespace

TEST_CASE("environment blocks of the identity operator are identities") {
    const MpsTensorTrain psi = normalized_random(3, {1, 6, 6, 1}, 11);
    const EnvironmentBlocks env = build_environments(psi, identity_mpo(3, 9));
    for (int n = 0; n <= 3; ++n) {
        REQUIRE(env.left[static_cast<size_t>(n)].size() == 1);
        const ComplexMatrix& block = env.left[static_cast<size_t>(n)][0];
        CHECK((block - ComplexMatrix::Identity(block.rows(), block.cols())).norm() < 1e-12);
    }
    CHECK(std::abs(environment_scalar(env, 1) - Complex(1.0, 0.0)) < 1e-12);
}

TEST_CASE("environment pairing reproduces the expectation value at every cut") {
    const MpsTensorTrain psi = normalized_random(4, {1, 5, 7, 5, 1}, 12);
    const MpoTensorTrain w = superop(4);
    const EnvironmentBlocks env = build_environments(psi, w);
    const Complex expect = mpo_expectation(w, psi);
    for (int n = 0; n <= 4; ++n)
        CHECK(std::abs(environment_scalar(env, n) - expect) < 1e-11 * std::abs(expect));
    CHECK_THROWS_AS(environment_scalar(env, 5), std::invalid_argument);
}

TEST_CASE("environment scalar matches the dense quadratic form") {
    const MpsTensorTrain psi = normalized_random(3, {1, 4, 4, 1}, 13);
    const MpoTensorTrain w = superop(3);
    const EnvironmentBlocks env = build_environments(psi, w);
    const ComplexVector v = to_dense_vector(psi);
    const Complex expect = v.dot(mpo_apply_dense_vector(w, v));
    CHECK(std::abs(environment_scalar(env, 2) - expect) < 1e-11 * std::abs(expect));
}

TEST_CASE("environment rebuilds are deterministic and tagged") {
    const MpsTensorTrain psi = normalized_random(3, {1, 5, 5, 1}, 14);
    const MpoTensorTrain w = superop(3);
    const EnvironmentBlocks a = build_environments(psi, w);
    const EnvironmentBlocks b = build_environments(psi, w);
    CHECK(a.source_tag == b.source_tag);
    CHECK(a.source_tag == environment_source_tag(psi, w));
    for (size_t n = 0; n < a.left.size(); ++n)
        for (size_t k = 0; k < a.left[n].size(); ++k)
            CHECK((a.left[n][k] - b.left[n][k]).norm() == 0.0);

    MpsTensorTrain other = psi;
    other.sites[1][0](0, 0) += 1.0;
    CHECK(environment_source_tag(other, w) != a.source_tag);
}

TEST_CASE("build_environments rejects mismatched shapes") {
    const MpsTensorTrain psi = normalized_random(3, {1, 4, 4, 1}, 15);
    CHECK_THROWS_AS(build_environments(psi, identity_mpo(4, 9)), std::invalid_argument);
    CHECK_THROWS_AS(build_environments(psi, identity_mpo(3, 3)), std::invalid_argument);
}

TEST_CASE("a zero operator train freezes the state") {
    const MpsTensorTrain psi = normalized_random(3, {1, 6, 6, 1}, 16);
    MpoTensorTrain zero = identity_mpo(3, 9);
    for (MpoSiteTensor& site : zero.sites)
        for (ComplexMatrix& b : site.blocks) b.setZero();
    const MpsTensorTrain out = tdvp_sweep_step(psi, zero, 0.1);
    CHECK(mps_norm(out) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner(out, psi)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("a sweep step at full rank reproduces the dense propagator") {
    const MpsTensorTrain psi = normalized_random(2, {1, 9, 1}, 17);
    const MpoTensorTrain w = superop(2);
    const ComplexMatrix wd = mpo_to_dense(w);
    SpectralCache cache;
    const double tau = 1.0 / 32.0;

    MpsTensorTrain cur = psi;
    ComplexVector ref = to_dense_vector(psi);
    for (int step = 0; step < 4; ++step) {
        cur = tdvp_sweep_step(cur, w, tau, {40, 1e-13, true});
        ref = dense_propagate(wd, ref, tau, cache);
        const ComplexVector got = to_dense_vector(cur);
        CHECK((got - ref).norm() < 1e-9 * ref.norm());
    }
}

TEST_CASE("sweep steps conserve the norm and the conserved quadratic form") {
    const MpsTensorTrain psi = normalized_random(3, {1, 7, 7, 1}, 18);
    const MpoTensorTrain w = superop(3);
    const double e0 = mpo_expectation(w, psi).real();
    MpsTensorTrain cur = psi;
    for (int step = 0; step < 5; ++step) {
        cur = tdvp_sweep_step(cur, w, 1.0 / 64.0, {40, 1e-13, true});
        CHECK(std::abs(mps_norm(cur) - 1.0) < 1e-10);
        CHECK(std::abs(mpo_expectation(w, cur).real() - e0) < 1e-9 * std::max(1.0, std::abs(e0)));
    }
}

TEST_CASE("a production-size sweep step holds its per-step drift bounds") {
    const MpsTensorTrain o0 = random_gaussian_mps(6, 9, {1, 2, 2, 2, 2, 2, 1}, 19);
    const MpsTensorTrain psi =
        left_normalize(pad_bond_dims(o0, {1, 9, 81, 81, 81, 9, 1})).train;
    const MpoTensorTrain w = superop(6);
    const double e0 = mpo_expectation(w, psi).real();
    const MpsTensorTrain out = tdvp_sweep_step(psi, w, 1.0 / 64.0, {40, 1e-14, true});
    CHECK(std::abs(mps_norm(out) - 1.0) < 1e-10);
    const double e1 = mpo_expectation(w, out).real();
    CHECK(std::abs(e1 - e0) < 1e-10 * std::max(1.0, std::abs(e0)));
}

TEST_CASE("sweep step rejects a non-finite step size") {
    const MpsTensorTrain psi = normalized_random(2, {1, 4, 1}, 20);
    CHECK_THROWS_AS(tdvp_sweep_step(psi, superop(2), std::nan("")), std::invalid_argument);
}

TEST_CASE("a local solver starved of iterations raises an integrator error") {
    const MpsTensorTrain psi = normalized_random(3, {1, 6, 6, 1}, 21);
    try {
        tdvp_sweep_step(psi, superop(3), 5.0, {2, 1e-16, true});
        FAIL("expected IntegratorError");
    } catch (const IntegratorError& e) {
        CHECK(e.site >= 1);
        CHECK(e.site <= 3);
        CHECK(std::string(e.what()).size() > 0);
    }
}

TEST_CASE("evolve records the observable series it is asked for") {
    const MpsTensorTrain psi = normalized_random(3, {1, 5, 5, 1}, 22);
    const MpoTensorTrain w = superop(3);
    TdvpRunParams params;
    params.tau = 1.0 / 32.0;
    params.n_steps = 3;
    params.krylov = {40, 1e-13, true};
    params.record.physical_energy = true;
    const MpsTensorTrain ref = mpo_to_purified_mps(build_xxz_spin1_hamiltonian(3, XxzCouplings{}));
    const EvolveResult r = evolve(psi, w, params, &ref);

    REQUIRE(r.trace.times.size() == 4);
    REQUIRE(r.trace.norms.size() == 4);
    REQUIRE(r.trace.superop_energies.size() == 4);
    REQUIRE(r.trace.physical_energies.size() == 4);
    for (size_t k = 0; k < 4; ++k)
        CHECK(r.trace.times[k] == doctest::Approx(static_cast<double>(k) / 32.0).epsilon(1e-15));
    for (double n : r.trace.norms) CHECK(std::abs(n - 1.0) < 1e-10);
    const Complex e0 = r.trace.superop_energies.front();
    for (const Complex& e : r.trace.superop_energies)
        CHECK(std::abs(e - e0) < 1e-9 * std::max(1.0, std::abs(e0)));
    CHECK(std::abs(r.trace.physical_energies.front() - inner(ref, psi)) <
          1e-10 * std::abs(inner(ref, psi)));
    CHECK(mps_norm(r.final_state) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("evolve validates its run parameters") {
    const MpsTensorTrain psi = normalized_random(2, {1, 4, 1}, 23);
    const MpoTensorTrain w = superop(2);
    TdvpRunParams params;
    params.tau = 0.1;
    params.n_steps = -1;
    CHECK_THROWS_AS(evolve(psi, w, params), std::invalid_argument);
    params.n_steps = 1;
    params.record.physical_energy = true;
    CHECK_THROWS_AS(evolve(psi, w, params, nullptr), std::invalid_argument);
}

TEST_CASE("halving the step size quarters the change in the final state") {
    // generic full-rank bonds; zero Schmidt values would sit at a
    // rank-deficient point of the projected flow and spoil the order
    const MpsTensorTrain o0 = random_gaussian_mps(4, 9, {1, 9, 27, 9, 1}, 24);
    const MpsTensorTrain psi = left_normalize(o0).train;
    const MpoTensorTrain w = superop(4);
    const double t = 0.25;

    std::vector<double> taus;
    std::vector<ComplexVector> finals;
    for (int k = 1; k <= 5; ++k) {
        TdvpRunParams params;
        params.tau = t / static_cast<double>(1 << k);
        params.n_steps = 1 << k;
        params.krylov = {40, 1e-13, true};
        const EvolveResult r = evolve(psi, w, params);
        taus.push_back(params.tau);
        finals.push_back(to_dense_vector(r.final_state));
    }
    // self-comparison ladder d(tau) = |E(tau) - E(tau/2)| cancels the
    // common projected-flow limit and isolates the splitting error
    std::vector<double> dists;
    for (size_t k = 0; k + 1 < finals.size(); ++k)
        dists.push_back((finals[k] - finals[k + 1]).norm());
    CHECK(dists.back() > 0.0);
    const double last_ratio = dists[dists.size() - 2] / dists.back();
    CHECK(last_ratio > 3.4);
    CHECK(last_ratio < 4.6);

    // log-log slope over the step-size ladder
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int m = static_cast<int>(dists.size());
    for (int i = 0; i < m; ++i) {
        const double x = std::log(taus[static_cast<size_t>(i)]);
        const double y = std::log(dists[static_cast<size_t>(i)]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    CHECK(slope > 1.7);
    CHECK(slope < 2.3);
}

TEST_CASE("the augmented tangent space contains the conserved operator") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 25), {1, 7, 7, 1});
    const AugmentedState aug = make_augmented_state(o, h, 0.05);
    const MpsTensorTrain x = aug.x;  // left-canonical
    const MpsTensorTrain xr = gauge_right(x);

    const std::vector<ComplexMatrix> lf = left_frames(x);
    const std::vector<ComplexMatrix> rf = right_frames(xr);
    const Eigen::Index dim = 729;
    const Eigen::Index d2 = 9;
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    for (int n = 1; n <= 3; ++n) {
        const ComplexMatrix mn =
            kron(kron(lf[static_cast<size_t>(n - 1)], ComplexMatrix::Identity(d2, d2)),
                 rf[static_cast<size_t>(n)]);
        p += mn * mn.adjoint();
    }
    for (int n = 1; n <= 2; ++n) {
        const ComplexMatrix nn = kron(lf[static_cast<size_t>(n)], rf[static_cast<size_t>(n)]);
        p -= nn * nn.adjoint();
    }
    // sanity: p is an orthogonal projector on the frames it was built from
    CHECK((p * p - p).norm() < 1e-10 * p.norm());

    const ComplexVector vh = to_dense_vector(mpo_to_purified_mps(h));
    CHECK((p * vh - vh).norm() < 1e-10 * vh.norm());

    // without the augmentation the conserved operator pokes out of the space
    const AugmentedState bare = make_augmented_state(o, h, 0.0);
    const std::vector<ComplexMatrix> lf0 = left_frames(bare.x);
    const std::vector<ComplexMatrix> rf0 = right_frames(gauge_right(bare.x));
    ComplexMatrix p0 = ComplexMatrix::Zero(dim, dim);
    for (int n = 1; n <= 3; ++n) {
        const ComplexMatrix mn =
            kron(kron(lf0[static_cast<size_t>(n - 1)], ComplexMatrix::Identity(d2, d2)),
                 rf0[static_cast<size_t>(n)]);
        p0 += mn * mn.adjoint();
    }
    for (int n = 1; n <= 2; ++n) {
        const ComplexMatrix nn = kron(lf0[static_cast<size_t>(n)], rf0[static_cast<size_t>(n)]);
        p0 -= nn * nn.adjoint();
    }
    CHECK((p0 * vh - vh).norm() > 1e-3 * vh.norm());
}

TEST_CASE("make_augmented_state realizes the advertised combination") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(4, XxzCouplings{});
    const MpsTensorTrain hp = mpo_to_purified_mps(h);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(4, 9, {1, 2, 2, 2, 1}, 26), {1, 7, 7, 7, 1});
    const double gs = 0.1;
    const double gamma = std::pow(gs, 4);
    const AugmentedState aug = make_augmented_state(o, h, gs);

    CHECK(aug.gamma_site_factor == gs);
    CHECK(aug.x.bond_dims() == o.bond_dims());
    CHECK(mps_norm(aug.x) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(aug.x_norm > 0.0);

    // x * x_norm = o + gamma |H> tested against random probes
    for (int k = 0; k < 10; ++k) {
        const MpsTensorTrain t =
            random_gaussian_mps(4, 9, {1, 3, 3, 3, 1}, 400 + static_cast<std::uint64_t>(k));
        const Complex lhs = inner(t, aug.x) * aug.x_norm;
        const Complex rhs = inner(t, o) + gamma * inner(t, hp);
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
    }

    // the energy pairing shifts by exactly gamma tr[H^2]
    const Complex shifted = inner(hp, aug.x) * aug.x_norm - inner(hp, o);
    const double h2 = mpo_frobenius_norm(h) * mpo_frobenius_norm(h);
    CHECK(std::abs(shifted - Complex(gamma * h2, 0.0)) < 1e-8 * gamma * h2);
}

TEST_CASE("make_augmented_state degenerates cleanly at gamma zero") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 27), {1, 7, 7, 1});
    const AugmentedState aug = make_augmented_state(o, h, 0.0);
    const CanonicalResult plain = left_normalize(o);
    CHECK(aug.x_norm == doctest::Approx(plain.norm).epsilon(1e-13));
    for (size_t n = 0; n < 3; ++n)
        for (size_t s = 0; s < 9; ++s)
            CHECK((aug.x.sites[n][s] - plain.train.sites[n][s]).norm() < 1e-14);
}

TEST_CASE("make_augmented_state needs enough padding") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 28), {1, 6, 6, 1});
    CHECK_THROWS_AS(make_augmented_state(o, h, 0.1), CapacityError);
}

TEST_CASE("augmented evolution with gamma zero is plain evolution") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpoTensorTrain w = build_commutator_superoperator(h);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 29), {1, 7, 7, 1});
    const AugmentedState aug = make_augmented_state(o, h, 0.0);
    TdvpRunParams params;
    params.tau = 1.0 / 32.0;
    params.n_steps = 2;
    params.krylov = {40, 1e-13, true};
    const MpsTensorTrain a = augmented_evolve(aug, w, params);
    const EvolveResult plain = evolve(left_normalize(o).train, w, params);
    const MpsTensorTrain b = scale_global(plain.final_state, Complex(left_normalize(o).norm, 0.0));
    REQUIRE(a.bond_dims() == b.bond_dims());
    for (size_t n = 0; n < 3; ++n)
        for (size_t s = 0; s < 9; ++s)
            CHECK((a.sites[n][s] - b.sites[n][s]).norm() < 1e-14 * std::max(1.0, b.sites[n][s].norm()));
}

TEST_CASE("the conserved operator itself is a fixed point of the augmented flow") {
    // purify(H) spans the kernel of the commutator map, so every effective
    // local map annihilates its center tensor and the sweep is the identity
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpoTensorTrain w = build_commutator_superoperator(h);
    const MpsTensorTrain o = mpo_to_purified_mps(h);
    const AugmentedState aug = make_augmented_state(o, h, 0.0);
    TdvpRunParams params;
    params.tau = 1.0 / 16.0;
    params.n_steps = 4;
    params.krylov = {40, 1e-13, true};
    const MpsTensorTrain out = augmented_evolve(aug, w, params);
    const double scale = mps_norm(o);
    CHECK(dense_distance(out, o) < 1e-10 * scale);
}

TEST_CASE("augmented evolution subtracts the conserved share it added") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpoTensorTrain w = build_commutator_superoperator(h);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 30), {1, 7, 7, 1});
    const AugmentedState aug = make_augmented_state(o, h, 0.1);
    TdvpRunParams params;
    params.tau = 1.0 / 32.0;
    params.n_steps = 4;
    params.krylov = {40, 1e-13, true};
    ObservableTrace trace;
    const MpsTensorTrain out = augmented_evolve(aug, w, params, &trace);
    REQUIRE(trace.times.size() == 5);
    // interior bonds grow by the subtraction add
    CHECK(out.bond_dims() == std::vector<Eigen::Index>{1, 12, 12, 1});

    // composition identity: result = norm * evolve(x) - gamma * |H>
    const double gamma = std::pow(0.1, 3);
    const EvolveResult plain = evolve(aug.x, w, params);
    const MpsTensorTrain composed =
        add(scale_global(plain.final_state, Complex(aug.x_norm, 0.0)),
            scale_global(aug.h_state, Complex(-gamma, 0.0)));
    REQUIRE(composed.bond_dims() == out.bond_dims());
    for (size_t n = 0; n < 3; ++n)
        for (size_t s = 0; s < 9; ++s)
            CHECK((out.sites[n][s] - composed.sites[n][s]).norm() <
                  1e-13 * std::max(1.0, composed.sites[n][s].norm()));
}

TEST_CASE("the augmentation weakly perturbs the evolved operator") {
    const XxzCouplings c{};
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(4, c);
    const MpoTensorTrain w = build_commutator_superoperator(h);
    const ComplexMatrix hd = mpo_to_dense(h);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(4, 9, {1, 2, 2, 2, 1}, 31), {1, 7, 7, 7, 1});
    const ComplexMatrix od = purified_vector_to_dense(to_dense_vector(o), 4, 3);
    const double t = 0.125;
    SpectralCache cache;
    const ComplexMatrix exact = dense_evolve(hd, od, t, &cache);

    TdvpRunParams params;
    params.tau = 1.0 / 32.0;
    params.n_steps = 4;
    params.krylov = {40, 1e-13, true};
    std::vector<double> dists;
    for (double gs : {1e-3, std::pow(10.0, -2.5)}) {
        const AugmentedState aug = make_augmented_state(o, h, gs);
        const MpsTensorTrain out = augmented_evolve(aug, w, params);
        const ComplexMatrix got = purified_vector_to_dense(to_dense_vector(out), 4, 3);
        dists.push_back(trace_distance(got, exact));
    }
    CHECK(std::abs(dists[0] - dists[1]) < 0.1 * std::max(dists[0], dists[1]));
}

TEST_CASE("multi_conserved_augment with no terms returns the input") {
    const MpsTensorTrain o = normalized_random(3, {1, 5, 5, 1}, 32);
    const MultiAugmentResult r = multi_conserved_augment(o, {});
    CHECK(r.embedded.empty());
    for (size_t n = 0; n < 3; ++n)
        for (size_t s = 0; s < 9; ++s)
            CHECK((r.state.sites[n][s] - o.sites[n][s]).norm() == 0.0);
}

TEST_CASE("multi_conserved_augment with one term matches the single-term path") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 33), {1, 7, 7, 1});
    const double gs = 0.1;
    const MultiAugmentResult r = multi_conserved_augment(o, {{h, gs}});
    REQUIRE(r.embedded.size() == 1);
    CHECK(r.embedded[0]);
    CHECK(r.state.bond_dims() == o.bond_dims());
    const AugmentedState aug = make_augmented_state(o, h, gs);
    const MpsTensorTrain t = normalized_random(3, {1, 4, 4, 1}, 34);
    const Complex lhs = inner(t, r.state);
    const Complex rhs = inner(t, aug.x) * aug.x_norm;
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
}

TEST_CASE("several conserved trains stack inside the padding") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(4, XxzCouplings{});
    const MpoTensorTrain sz = build_total_sz_mpo(4);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(4, 9, {1, 2, 2, 2, 1}, 35), {1, 9, 9, 9, 1});
    const double g1 = 0.1, g2 = 0.2;
    const MultiAugmentResult r = multi_conserved_augment(o, {{h, g1}, {sz, g2}});
    REQUIRE(r.embedded.size() == 2);
    CHECK(r.embedded[0]);
    CHECK(r.embedded[1]);
    CHECK(r.state.bond_dims() == o.bond_dims());
    const double gamma1 = std::pow(g1, 4), gamma2 = std::pow(g2, 4);
    const MpsTensorTrain hp = mpo_to_purified_mps(h);
    const MpsTensorTrain szp = mpo_to_purified_mps(sz);
    for (int k = 0; k < 5; ++k) {
        const MpsTensorTrain t =
            random_gaussian_mps(4, 9, {1, 3, 3, 3, 1}, 500 + static_cast<std::uint64_t>(k));
        const Complex lhs = inner(t, r.state);
        const Complex rhs = inner(t, o) + gamma1 * inner(t, hp) + gamma2 * inner(t, szp);
        CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
    }
}

TEST_CASE("both stacked trains are flow invariants of the dense superoperator") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpoTensorTrain w = build_commutator_superoperator(h);
    const double wf = mpo_frobenius_norm(w);
    for (const MpoTensorTrain& k : {h, build_total_sz_mpo(3)}) {
        const ComplexVector vk = to_dense_vector(mpo_to_purified_mps(k));
        CHECK(mpo_apply_dense_vector(w, vk).norm() < 1e-12 * wf * vk.norm());
    }
}

TEST_CASE("multi_conserved_augment falls back to bond growth when padding runs out") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpsTensorTrain o = normalized_random(3, {1, 3, 3, 1}, 36);
    const double gs = 0.1;
    const MultiAugmentResult r = multi_conserved_augment(o, {{h, gs}});
    REQUIRE(r.embedded.size() == 1);
    CHECK_FALSE(r.embedded[0]);
    CHECK(r.state.bond_dims() == std::vector<Eigen::Index>{1, 8, 8, 1});
    const double gamma = std::pow(gs, 3);
    const MpsTensorTrain hp = mpo_to_purified_mps(h);
    const MpsTensorTrain t = normalized_random(3, {1, 4, 4, 1}, 37);
    const Complex lhs = inner(t, r.state);
    const Complex rhs = inner(t, o) + gamma * inner(t, hp);
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(rhs));
}

TEST_CASE("multi_conserved_subtract undoes multi_conserved_augment") {
    const MpoTensorTrain h = build_xxz_spin1_hamiltonian(3, XxzCouplings{});
    const MpoTensorTrain sz = build_total_sz_mpo(3);
    const MpsTensorTrain o =
        pad_bond_dims(random_gaussian_mps(3, 9, {1, 2, 2, 1}, 38), {1, 9, 9, 1});
    const std::vector<MultiAugmentTerm> ks = {{h, 0.1}, {sz, 0.2}};
    const MultiAugmentResult r = multi_conserved_augment(o, ks);
    const MpsTensorTrain back = multi_conserved_subtract(r.state, ks);
    const MpsTensorTrain t = normalized_random(3, {1, 4, 4, 1}, 39);
    const Complex lhs = inner(t, back);
    const Complex rhs = inner(t, o);
    CHECK(std::abs(lhs - rhs) < 1e-10 * std::abs(rhs));
}
