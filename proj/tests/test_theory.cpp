#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <random>

#include "bolt/theory.hpp"
#include "oracles.hpp"

using namespace bolt;

TEST(Mills, FrozenHighPrecisionValues) {
    // phi(z)/Q(z) - z at 50 digits
    const std::pair<double, double> cases[] = {{0.0, 0.79788456080286535588}, {1.0, 0.52513527616098120909},
                                               {3.0, 0.28309865493043650693}, {5.0, 0.18650396712584211562},
                                               {10.0, 0.098093233962511962844}, {30.0, 0.033259667433677037071},
                                               {-2.0, 2.0552478626789899591}};
    for (auto [z, v] : cases) EXPECT_NEAR(mills_excess(z), v, 1e-13 * v) << z;
    EXPECT_NEAR(mills_excess(1e6) * 1e6, 1.0, 1e-9);
}

TEST(Mills, ContinuousAcrossBranch) {
    EXPECT_NEAR(mills_excess(std::nextafter(3.0, 0.0)), mills_excess(3.0), 1e-13);
}

TEST(Regret, TruncatedMeanMatchesQuadrature) {
    // E[X | X > 0] for X ~ N(mu, sigma^2)
    for (auto [mu, s] : {std::pair{0.3, 0.7}, std::pair{-1.0, 0.5}, std::pair{2.0, 1.5}}) {
        const double num = oracle::simpson([&](double x) { return x * std::exp(-0.5 * std::pow((x - mu) / s, 2)); }, 0.0, mu + 12 * s, 20000);
        const double den = oracle::simpson([&](double x) { return std::exp(-0.5 * std::pow((x - mu) / s, 2)); }, 0.0, mu + 12 * s, 20000);
        EXPECT_NEAR(expected_truncated_regret(mu, s), num / den, 1e-8);
    }
    EXPECT_NEAR(expected_truncated_regret(0.3, 0.7), 0.68258361246182, 1e-13);
    EXPECT_THROW(expected_truncated_regret(0.0, 0.0), InvalidParameter);
}

TEST(Regret, ZeroLipschitzLimit) {
    for (double s : {0.01, 0.4, 3.0}) EXPECT_NEAR(regret_slope_from_sigma(s, 0.0, 4), s * std::sqrt(2 / std::numbers::pi), 1e-15);
}

TEST(Regret, SigmaMatchesDefinition) {
    TheoryParams p;
    p.d = 3;
    p.signal_variance = 2.0;
    p.spatial = {KernelFamily::matern52(), 0.8};
    p.temporal = {KernelFamily::rbf(), 1.5};
    p.cost = 0.2;
    const double ks = oracle::matern52(std::sqrt(3.0), 0.8);
    const double tail = std::erfc(std::numbers::sqrt2 * std::numbers::pi * 1.5 * 5.0);
    EXPECT_NEAR(sigma_c_sq(p), 2 * 2.0 * (1 + ks) * tail, 1e-15);
}

TEST(Regret, NonIncreasingInFrequency) {
    for (auto fam : {KernelFamily::matern12(), KernelFamily::matern32(), KernelFamily::matern52(), KernelFamily::rbf(),
                     KernelFamily::rational_quadratic(2.0)}) {
        TheoryParams p;
        p.d = 4;
        p.temporal = {fam, 1.0};
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 40; ++i) {
            p.cost = 1.0 / std::pow(10.0, -1.0 + 3.0 * i / 40.0);
            const double e = regret_slope(p);
            EXPECT_LE(e, prev * (1 + 1e-12)) << fam.name();
            EXPECT_GE(e, 0.0);
            const double sc = std::sqrt(sigma_c_sq(p));
            if (sc > 0) {
                EXPECT_LE(e, expected_truncated_regret(-p.lipschitz * 2.0, sc) * (1 + 1e-12));
            }
            prev = e;
        }
    }
}

TEST(ResponseNorm, MatchesDirectSum) {
    const KernelComponent kt{KernelFamily::matern32(), 5.0};
    const ResponseTimeFn r = [](long n) { return 0.1 + 1e-4 * n * n; };
    for (long n : {1L, 7L, 40L}) {
        double s = 0;
        for (long i = 1; i <= n; ++i) s += std::pow(oracle::matern32(i * r(n), 5.0), 2);
        EXPECT_NEAR(u_norm_sq(kt, r, n), s, 1e-12);
    }
    EXPECT_THROW(u_norm_sq(kt, r, 0), InvalidArgument);
    EXPECT_THROW(u_norm_sq(kt, [](long) { return 0.0; }, 3), InvalidParameter);
}

TEST(RecommendedSize, MatchesExhaustiveArgmax) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const KernelFamily fams[] = {KernelFamily::matern12(), KernelFamily::matern32(), KernelFamily::matern52(),
                                 KernelFamily::rbf(), KernelFamily::rational_quadratic(1.5)};
    for (int rep = 0; rep < 10; ++rep) {
        const KernelComponent kt{fams[rep % 5], 1.0 + 30 * u(rng)};
        const double r0 = 0.01 + u(rng), g = std::pow(10.0, -7 + 2 * u(rng));
        const ResponseTimeFn r = [=](long n) { return r0 + g * std::pow(static_cast<double>(n), 3); };
        long best = 1;
        double bv = -1;
        for (long n = 1; n <= 500; ++n) {
            const double v = u_norm_sq(kt, r, n);
            if (v > bv) {
                bv = v;
                best = n;
            }
        }
        const auto rec = recommended_size(kt, r, 500);
        if (best < 500) {
            EXPECT_EQ(rec.n, best) << rep;
            EXPECT_FALSE(rec.diverged);
        } else {
            EXPECT_TRUE(rec.diverged);
        }
    }
}

TEST(RecommendedSize, ConstantResponseDiverges) {
    const auto rec = recommended_size({KernelFamily::rbf(), 2.0}, [](long) { return 0.5; }, 300);
    EXPECT_EQ(rec.n, 300);
    EXPECT_TRUE(rec.diverged);
    EXPECT_THROW(recommended_size({KernelFamily::rbf(), 2.0}, [](long) { return 0.5; }, 0), InvalidArgument);
}

TEST(UpperBound, FormulaAndEdgeCases) {
    TheoryParams p;
    p.d = 2;
    p.signal_variance = 1.5;
    p.noise_variance = 0.1;
    EXPECT_NEAR(upper_bound(p, 4.0, 100, 10, 0.0), 2 + 2 * 100 * std::sqrt(1.5 * 4.0), 1e-10);
    const double ks = oracle::matern52(std::sqrt(2.0), 1.0);
    const double expect = 2 + std::sqrt(4 * 1.5 * 4.0 * 100 * (100 - 1.5 * ks * ks * 3.0 / 1.6));
    EXPECT_NEAR(upper_bound(p, 4.0, 100, 10, 3.0), expect, 1e-10);
    EXPECT_THROW(upper_bound(p, 4.0, 5, 10, 3.0), PreconditionError);
}

TEST(Circulant, EigenvaluesMatchDenseSolver) {
    for (auto fam : {KernelFamily::matern32(), KernelFamily::rbf()}) {
        const std::size_t n = 24;
        const double c = 0.3, l = 1.1;
        Eigen::MatrixXd m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const std::size_t d = (j + n - i) % n;
                m(i, j) = oracle::by_name(fam.name(), c * d, l) + oracle::by_name(fam.name(), c * (n - d), l);
            }
        Eigen::VectorXd dense = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
        auto eig = circulant_eigs<double>(fam, l, c, n);
        std::sort(eig.begin(), eig.end());
        for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(eig[i], dense(static_cast<Eigen::Index>(i)), 1e-11);
        // trace identity
        double tr = 0;
        for (double e : eig) tr += e;
        EXPECT_NEAR(tr, n * (1.0 + oracle::by_name(fam.name(), c * n, l)), 1e-8);
    }
}

TEST(Circulant, LowFrequencyApproximationIsClose) {
    const std::size_t n = 512;
    const auto eig = circulant_eigs<double>(KernelFamily::matern32(), 3.0, 0.05, n);
    for (std::size_t j : {0u, 1u, 5u, 20u}) {
        const double a = circulant_eig_approximation<double>(KernelFamily::matern32(), 3.0, 0.05, n, j);
        EXPECT_NEAR(eig[j] / a, 1.0, 0.05) << j;
    }
}
