#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include "test_helpers.hpp"
#include "tnet/linalg.hpp"
#include "tnet/random.hpp"

using namespace tnet;
using testutil::random_complex_matrix;
using testutil::random_hermitian;
using testutil::random_unitary;

TEST_CASE("qr_thin identity") {
    const ComplexMatrix m = ComplexMatrix::Identity(3, 3);
    const QrResult f = qr_thin(m);
    CHECK((f.q - m).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((f.r - m).norm() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("qr_thin single column") {
    ComplexMatrix m(2, 1);
    m << Complex(3.0, 0.0), Complex(4.0, 0.0);
    const QrResult f = qr_thin(m);
    CHECK(std::abs(f.q(0, 0) - Complex(0.6, 0.0)) < 1e-14);
    CHECK(std::abs(f.q(1, 0) - Complex(0.8, 0.0)) < 1e-14);
    CHECK(std::abs(f.r(0, 0) - Complex(5.0, 0.0)) < 1e-14);
}

TEST_CASE("qr_thin random complex tall matrix") {
    const ComplexMatrix m = random_complex_matrix(12, 7, 101);
    const QrResult f = qr_thin(m);
    REQUIRE(f.q.rows() == 12);
    REQUIRE(f.q.cols() == 7);
    REQUIRE(f.r.rows() == 7);
    REQUIRE(f.r.cols() == 7);
    CHECK((f.q * f.r - m).norm() / m.norm() < 1e-12);
    CHECK((f.q.adjoint() * f.q - ComplexMatrix::Identity(7, 7)).norm() < 1e-12);
    for (Eigen::Index i = 0; i < 7; ++i) {
        CHECK(f.r(i, i).imag() == doctest::Approx(0.0).epsilon(1e-13));
        CHECK(f.r(i, i).real() >= 0.0);
        for (Eigen::Index j = 0; j < i; ++j) CHECK(std::abs(f.r(i, j)) < 1e-13);
    }
}

TEST_CASE("qr_thin wide matrix shapes") {
    const ComplexMatrix m = random_complex_matrix(5, 9, 102);
    const QrResult f = qr_thin(m);
    REQUIRE(f.q.rows() == 5);
    REQUIRE(f.q.cols() == 5);
    REQUIRE(f.r.rows() == 5);
    REQUIRE(f.r.cols() == 9);
    CHECK((f.q * f.r - m).norm() / m.norm() < 1e-12);
}

TEST_CASE("qr_thin determinism across repeated calls") {
    const ComplexMatrix m = random_complex_matrix(8, 8, 103);
    const QrResult a = qr_thin(m);
    const QrResult b = qr_thin(m);
    CHECK((a.q - b.q).norm() == 0.0);
    CHECK((a.r - b.r).norm() == 0.0);
}

TEST_CASE("svd_full diagonal matrix") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 2.0;
    m(1, 1) = 1.0;
    const SvdResult f = svd_full(m);
    CHECK(f.s(0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(f.s(1) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("svd_full rank deficient real matrix") {
    ComplexMatrix m = ComplexMatrix::Zero(2, 2);
    m(0, 0) = 3.0;
    m(0, 1) = 4.0;
    const SvdResult f = svd_full(m);
    CHECK(f.s(0) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(std::abs(f.s(1)) < 1e-14);
}

TEST_CASE("svd_full frozen complex 2x2 values") {
    ComplexMatrix m(2, 2);
    m << Complex(1.0, 2.0), Complex(0.0, 0.0), Complex(0.0, 1.0), Complex(3.0, 0.0);
    const SvdResult f = svd_full(m);
    CHECK(f.s(0) == doctest::Approx(3.2945564141853274).epsilon(1e-13));
    CHECK(f.s(1) == doctest::Approx(2.0361478418205086).epsilon(1e-13));
}

TEST_CASE("svd_full frozen real 2x2 values") {
    ComplexMatrix m(2, 2);
    m << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(3.0, 0.0), Complex(4.0, 0.0);
    const SvdResult f = svd_full(m);
    CHECK(f.s(0) == doctest::Approx(5.464985704219043).epsilon(1e-13));
    CHECK(f.s(1) == doctest::Approx(0.3659661906262575).epsilon(1e-13));
}

TEST_CASE("svd_full random matrix reassembly and norms") {
    const ComplexMatrix m = random_complex_matrix(9, 6, 104);
    const SvdResult f = svd_full(m);
    REQUIRE(f.s.size() == 6);
    const ComplexMatrix back = f.u * f.s.cast<Complex>().asDiagonal() * f.vh;
    CHECK((back - m).norm() / m.norm() < 1e-12);
    CHECK((f.u.adjoint() * f.u - ComplexMatrix::Identity(6, 6)).norm() < 1e-12);
    CHECK((f.vh * f.vh.adjoint() - ComplexMatrix::Identity(6, 6)).norm() < 1e-12);
    for (Eigen::Index i = 0; i + 1 < f.s.size(); ++i) CHECK(f.s(i) >= f.s(i + 1));
    const double frob2 = m.squaredNorm();
    CHECK(f.s.squaredNorm() == doctest::Approx(frob2).epsilon(1e-12));
}

TEST_CASE("svd_full invariant under unitary rotations") {
    const ComplexMatrix m = random_complex_matrix(7, 7, 105);
    const ComplexMatrix u = random_unitary(7, 106);
    const ComplexMatrix v = random_unitary(7, 107);
    const SvdResult a = svd_full(m);
    const SvdResult b = svd_full(u * m * v);
    CHECK((a.s - b.s).norm() / a.s.norm() < 1e-10);
}

TEST_CASE("eigh diagonal matrix sorts ascending") {
    ComplexMatrix m = ComplexMatrix::Zero(3, 3);
    m(0, 0) = 1.0;
    m(2, 2) = -1.0;
    const EighResult f = eigh(m);
    CHECK(f.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(f.eigenvalues(1) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(f.eigenvalues(2) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("eigh spin-1 x component") {
    const EighResult f = eigh(testutil::dense_sx());
    CHECK(f.eigenvalues(0) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(f.eigenvalues(1)) < 1e-12);
    CHECK(f.eigenvalues(2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eigh random hermitian reconstruction") {
    const ComplexMatrix m = random_hermitian(50, 108);
    const EighResult f = eigh(m);
    const ComplexMatrix back =
        f.eigenvectors * f.eigenvalues.cast<Complex>().asDiagonal() * f.eigenvectors.adjoint();
    CHECK((back - m).norm() / m.norm() < 1e-10);
    CHECK((f.eigenvectors.adjoint() * f.eigenvectors - ComplexMatrix::Identity(50, 50)).norm() <
          1e-12);
    for (Eigen::Index i = 0; i + 1 < f.eigenvalues.size(); ++i)
        CHECK(f.eigenvalues(i) <= f.eigenvalues(i + 1));
}

TEST_CASE("eigh tridiagonal analytic spectrum") {
    const int k = 20;
    const double a = 0.3, b = 0.7;
    ComplexMatrix m = ComplexMatrix::Zero(k, k);
    for (int i = 0; i < k; ++i) {
        m(i, i) = a;
        if (i + 1 < k) {
            m(i, i + 1) = b;
            m(i + 1, i) = b;
        }
    }
    const EighResult f = eigh(m);
    std::vector<double> expect;
    for (int j = 1; j <= k; ++j) expect.push_back(a + 2.0 * b * std::cos(j * M_PI / (k + 1)));
    std::sort(expect.begin(), expect.end());
    for (int i = 0; i < k; ++i)
        CHECK(f.eigenvalues(i) == doctest::Approx(expect[static_cast<size_t>(i)]).epsilon(1e-10));
}

TEST_CASE("eigh rejects a matrix that is not hermitian") {
    ComplexMatrix m(2, 2);
    m << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0);
    CHECK_THROWS_AS(eigh(m), std::invalid_argument);
}

TEST_CASE("krylov_expm_apply zero map returns the input") {
    const ComplexVector v = random_complex_matrix(40, 1, 109).col(0);
    const LinearMap zero = [](const ComplexVector& x) {
        return ComplexVector(ComplexVector::Zero(x.size()));
    };
    const KrylovResult r = krylov_expm_apply(zero, v, Complex(0.0, -0.1));
    CHECK(r.converged);
    CHECK((r.w - v).norm() / v.norm() < 1e-13);
}

TEST_CASE("krylov_expm_apply eigenvector picks up a pure phase") {
    const int n = 12;
    RealVector diag(n);
    for (int i = 0; i < n; ++i) diag(i) = 0.25 * i - 1.0;
    const LinearMap apply = [&diag](const ComplexVector& x) {
        return ComplexVector(diag.cast<Complex>().asDiagonal() * x);
    };
    ComplexVector v = ComplexVector::Zero(n);
    v(3) = 1.0;
    const double tau = 0.3;
    const KrylovResult r = krylov_expm_apply(apply, v, Complex(0.0, -tau));
    const Complex phase = std::exp(Complex(0.0, -tau * diag(3)));
    CHECK(r.converged);
    CHECK((r.w - phase * v).norm() < 1e-12);
}

TEST_CASE("krylov_expm_apply matches dense propagator on a random hermitian map") {
    const int n = 200;
    const ComplexMatrix m = random_hermitian(n, 110);
    const ComplexVector v = random_complex_matrix(n, 1, 111).col(0);
    const LinearMap apply = [&m](const ComplexVector& x) { return ComplexVector(m * x); };
    const double tau = 0.05;
    const KrylovResult r = krylov_expm_apply(apply, v, Complex(0.0, -tau), {60, 1e-13, true});
    REQUIRE(r.converged);
    const EighResult f = eigh(m);
    ComplexVector phases(n);
    for (int i = 0; i < n; ++i) phases(i) = std::exp(Complex(0.0, -tau * f.eigenvalues(i)));
    const ComplexVector exact =
        f.eigenvectors * (phases.asDiagonal() * (f.eigenvectors.adjoint() * v));
    CHECK((r.w - exact).norm() / exact.norm() < 1e-10);
    // purely imaginary coefficient: unitary flow, norm preserved
    CHECK(std::abs(r.w.norm() - v.norm()) < 1e-10 * v.norm());
}

TEST_CASE("krylov_expm_apply real negative coefficient decays the norm") {
    const ComplexMatrix m = random_hermitian(30, 112) + 10.0 * ComplexMatrix::Identity(30, 30);
    const ComplexVector v = random_complex_matrix(30, 1, 113).col(0);
    const LinearMap apply = [&m](const ComplexVector& x) { return ComplexVector(m * x); };
    const KrylovResult r = krylov_expm_apply(apply, v, Complex(-0.2, 0.0), {40, 1e-13, true});
    REQUIRE(r.converged);
    const EighResult f = eigh(m);
    ComplexVector weights(30);
    for (int i = 0; i < 30; ++i) weights(i) = std::exp(Complex(-0.2 * f.eigenvalues(i), 0.0));
    const ComplexVector exact =
        f.eigenvectors * (weights.asDiagonal() * (f.eigenvectors.adjoint() * v));
    CHECK((r.w - exact).norm() / exact.norm() < 1e-10);
}

TEST_CASE("krylov_expm_apply reports non-convergence at a tiny subspace cap") {
    const ComplexMatrix m = 50.0 * random_hermitian(80, 114);
    const ComplexVector v = random_complex_matrix(80, 1, 115).col(0);
    const LinearMap apply = [&m](const ComplexVector& x) { return ComplexVector(m * x); };
    const KrylovResult r = krylov_expm_apply(apply, v, Complex(0.0, -1.0), {3, 1e-14, true});
    CHECK_FALSE(r.converged);
    CHECK(r.dim == 3);
}

TEST_CASE("krylov_expm_apply rejects a zero vector") {
    const ComplexVector v = ComplexVector::Zero(5);
    const LinearMap id = [](const ComplexVector& x) { return x; };
    CHECK_THROWS_AS(krylov_expm_apply(id, v, Complex(0.0, -0.1)), std::invalid_argument);
}

TEST_CASE("mt19937_64 sequence is the one the standard pins") {
    std::mt19937_64 eng;  // default seed 5489
    for (int i = 0; i < 9999; ++i) eng();
    CHECK(eng() == 9981545732273789042ull);
}

TEST_CASE("gaussian source is seeded and deterministic") {
    GaussianRng a(42), b(42), c(43);
    bool all_equal = true, any_diff = false;
    for (int i = 0; i < 100; ++i) {
        const double x = a.normal(), y = b.normal(), z = c.normal();
        all_equal = all_equal && (x == y);
        any_diff = any_diff || (x != z);
    }
    CHECK(all_equal);
    CHECK(any_diff);
}

TEST_CASE("gaussian variates have unit variance") {
    GaussianRng rng(7);
    const int n = 20000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    CHECK(var > 0.9);
    CHECK(var < 1.1);
    CHECK(std::abs(mean) < 0.05);
}
