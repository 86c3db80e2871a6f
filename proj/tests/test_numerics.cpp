#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "lqrac/errors.hpp"
#include "lqrac/numerics.hpp"
#include "lqrac/rng.hpp"
#include "support.hpp"

using namespace lqrac;
using lqrac::testing::series_fixed_point;

namespace {

Mat random_matrix(Eigen::Index r, Eigen::Index c, RngStream& rng, double scale = 1.0) {
    Mat M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = scale * rng.next_gaussian();
    return M;
}

// Random square matrix rescaled to a target spectral radius.
Mat random_with_radius(Eigen::Index n, double radius, RngStream& rng) {
    Mat M = random_matrix(n, n, rng);
    const double rho = spectral_radius(M);
    if (rho > 0) M *= radius / rho;
    return M;
}

}  // namespace

TEST_CASE("cholesky identity and diagonal cases") {
    CHECK((cholesky(Mat::Identity(2, 2)) - Mat::Identity(2, 2)).norm() == doctest::Approx(0.0));

    Mat D(2, 2);
    D << 4, 0, 0, 9;
    Mat L = cholesky(D);
    CHECK(L(0, 0) == doctest::Approx(2.0));
    CHECK(L(1, 1) == doctest::Approx(3.0));
    CHECK(L(0, 1) == doctest::Approx(0.0));

    // D_xi of the first example model is the identity.
    const LqrModel m1 = lqrac::testing::example1();
    CHECK((cholesky(m1.D_xi) - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("cholesky recovers a factor of L L^T") {
    RngStream rng(7, 0, 0, 0, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 2 + trial % 5;
        Mat G = random_matrix(n, n, rng);
        G.diagonal().array() += n;  // keep it comfortably positive definite
        const Mat M = G * G.transpose();
        const Mat L = cholesky(M);
        CHECK((L * L.transpose() - M).norm() <= 1e-10 * M.norm());
        CHECK(L.isLowerTriangular());
    }
}

TEST_CASE("cholesky rejects asymmetric and indefinite input") {
    Mat asym(2, 2);
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(cholesky(asym), NotPsd);

    Mat indef(2, 2);
    indef << 1, 0, 0, -1;
    CHECK_THROWS_AS(cholesky(indef, 1e-12), NotPsd);
}

TEST_CASE("cholesky jitter engages only on failure") {
    // Rank-one PSD matrix: plain LLT fails, jitter rescues it.
    Mat M(2, 2);
    M << 1, 1, 1, 1;
    const double jitter = 1e-8;
    const Mat L = cholesky(M, jitter);
    const Mat target = M + jitter * Mat::Identity(2, 2);
    CHECK((L * L.transpose() - target).norm() <= 1e-10 * target.norm());

    // Positive definite input must not be jittered.
    Mat P(2, 2);
    P << 2, 0, 0, 3;
    const Mat Lp = cholesky(P, 1.0);
    CHECK((Lp * Lp.transpose() - P).norm() < 1e-12);
}

TEST_CASE("spectral radius on explicit spectra") {
    CHECK(spectral_radius(Mat::Zero(3, 3)) == doctest::Approx(0.0));

    Mat D(2, 2);
    D << 0.5, 0, 0, -0.9;
    CHECK(spectral_radius(D) == doctest::Approx(0.9));

    // Complex pair: lambda^2 = -0.25, so |lambda| = 0.5.
    Mat C(2, 2);
    C << 0, 1, -0.25, 0;
    CHECK(spectral_radius(C) == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("spectral radius similarity identity rho(FG) = rho(GF)") {
    RngStream rng(11, 0, 0, 0, 0);
    for (int trial = 0; trial < 30; ++trial) {
        const Eigen::Index r = 2 + trial % 3;
        const Eigen::Index c = 2 + (trial / 3) % 4;
        const Mat F = random_matrix(r, c, rng);
        const Mat G = random_matrix(c, r, rng);
        CHECK(spectral_radius(F * G) == doctest::Approx(spectral_radius(G * F)).epsilon(1e-8));
    }
}

TEST_CASE("solve_kron_linear trivial and scalar cases") {
    const Mat I = Mat::Identity(3, 3);
    CHECK((solve_kron_linear(Mat::Zero(3, 3), Mat::Zero(3, 3), I) - I).norm() < 1e-14);

    // Scalar geometric series: sum 0.25^s = 4/3.
    Mat f = Mat::Constant(1, 1, 0.5), g = Mat::Constant(1, 1, 0.5), w = Mat::Constant(1, 1, 1.0);
    CHECK(solve_kron_linear(f, g, w)(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("solve_kron_linear matches the example-1 stationary covariance") {
    // A = 0.5 I means the fixed point is (4/3) D_eps entrywise.
    const LqrModel m = lqrac::testing::example1();
    const Mat D_eps = m.noise_cov_eff();
    const Mat F = 0.5 * Mat::Identity(2, 2);
    const Mat X = solve_kron_linear(F, F, D_eps);
    CHECK((X - (4.0 / 3.0) * D_eps).norm() < 1e-12);

    Mat expected_deps(2, 2);
    expected_deps << 1.05, 0.01, 0.01, 1.05;
    CHECK((D_eps - expected_deps).norm() < 1e-14);
}

TEST_CASE("solve_kron_linear fixed-point residual on random stable instances") {
    RngStream rng(13, 0, 0, 0, 0);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + trial % 5;
        const Mat F = random_with_radius(n, 0.2 + 0.7 * rng.next_double(), rng);
        const Mat G = random_with_radius(n, 0.2 + 0.7 * rng.next_double(), rng);
        const Mat W = random_matrix(n, n, rng);
        const Mat X = solve_kron_linear(F, G, W);
        CHECK((X - W - F * X * G).norm() <= 1e-12 * std::max(1.0, W.norm()));
    }
}

TEST_CASE("solve_kron_linear agrees with the truncated series oracle") {
    RngStream rng(17, 0, 0, 0, 0);
    for (int trial = 0; trial < 25; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const Mat F = random_with_radius(n, 0.3 + 0.4 * rng.next_double(), rng);
        const Mat G = random_with_radius(n, 0.3 + 0.4 * rng.next_double(), rng);
        const Mat W = random_matrix(n, n, rng);
        const Mat X = solve_kron_linear(F, G, W);
        const Mat X_series = series_fixed_point(F, G, W);
        CHECK((X - X_series).norm() <= 1e-10 * std::max(1.0, X.norm()));
    }
}

TEST_CASE("solve_kron_linear error reporting") {
    CHECK_THROWS_AS(solve_kron_linear(Mat::Identity(2, 2), Mat::Identity(2, 2),
                                      Mat::Identity(2, 2)),
                    SingularSystem);
    CHECK_THROWS_AS(solve_kron_linear(Mat::Identity(3, 3), Mat::Identity(2, 2),
                                      Mat::Identity(2, 2)),
                    DimensionMismatch);
}

TEST_CASE("norms and symmetrize") {
    CHECK(frobenius_norm(Mat::Identity(3, 3)) == doctest::Approx(std::sqrt(3.0)));

    Mat D(2, 2);
    D << 2, 0, 0, -5;
    CHECK(operator_norm(D) == doctest::Approx(5.0));

    Mat U(2, 2);
    U << 0, 2, 0, 0;
    Mat S = symmetrize(U);
    CHECK(S(0, 1) == doctest::Approx(1.0));
    CHECK(S(1, 0) == doctest::Approx(1.0));
    CHECK(S(0, 0) == doctest::Approx(0.0));

    // Operator norm as the largest singular value on a random rectangle.
    RngStream rng(5, 0, 0, 0, 0);
    const Mat M = random_matrix(3, 5, rng);
    Eigen::JacobiSVD<Mat> svd(M);
    CHECK(operator_norm(M) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-10));
}

TEST_CASE("rng streams are deterministic and path-separated") {
    RngStream a(123, 1, 2, 3, 4);
    RngStream b(123, 1, 2, 3, 4);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(123, 1, 2, 3, 5);
    bool any_diff = false;
    RngStream a2(123, 1, 2, 3, 4);
    for (int i = 0; i < 10; ++i) any_diff = any_diff || (a2.next_u64() != c.next_u64());
    CHECK(any_diff);
}

TEST_CASE("rng gaussians have first and second moments") {
    RngStream rng(99, 0, 0, 0, 0);
    const int n = 200000;
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < n; ++i) {
        const double g = rng.next_gaussian();
        sum += g;
        sum_sq += g * g;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    CHECK(std::abs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
}
