#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bolt/kernels.hpp"
#include "oracles.hpp"

using namespace bolt;

namespace {
const char* const kFamilies[] = {"matern12", "matern32", "matern52", "rbf", "rq"};
}

TEST(Kernels, CorrelationMatchesClosedForms) {
    for (const char* name : kFamilies) {
        const auto fam = KernelFamily::parse(name, 2.5);
        for (double l : {0.3, 1.0, 4.0})
            for (double r : {0.0, 0.01, 0.5, 1.0, 3.0, 10.0})
                EXPECT_NEAR(correlation(fam, l, r), oracle::by_name(name, r, l, 2.5), 1e-14) << name << " l=" << l << " r=" << r;
    }
}

TEST(Kernels, CorrelationAtZeroIsOneAndDecreasing) {
    for (const char* name : kFamilies) {
        const auto fam = KernelFamily::parse(name, 1.0);
        EXPECT_EQ(correlation(fam, 0.7, 0.0), 1.0);
        double prev = 1.0;
        for (int i = 1; i < 50; ++i) {
            const double k = correlation(fam, 0.7, 0.1 * i);
            EXPECT_LT(k, prev);
            prev = k;
        }
    }
}

TEST(Kernels, DerivativeMatchesFiniteDifference) {
    for (const char* name : kFamilies) {
        const auto fam = KernelFamily::parse(name, 1.5);
        for (double r : {0.2, 0.9, 2.0}) {
            const double h = 1e-6;
            const double fd = (oracle::by_name(name, r + h, 0.8, 1.5) - oracle::by_name(name, r - h, 0.8, 1.5)) / (2 * h);
            EXPECT_NEAR(correlation_derivative(fam, 0.8, r), fd, 1e-7) << name;
        }
    }
}

TEST(Kernels, RejectsBadParameters) {
    EXPECT_THROW(correlation(KernelFamily::rbf(), 0.0, 1.0), InvalidParameter);
    EXPECT_THROW(correlation(KernelFamily::rbf(), -1.0, 1.0), InvalidParameter);
    EXPECT_THROW(KernelFamily::rational_quadratic(0.0), InvalidParameter);
    EXPECT_THROW(KernelFamily::parse("cosine"), InvalidArgument);
    KernelSpec s;
    s.noise_variance = -1.0;
    EXPECT_THROW(s.validate(), InvalidParameter);
}

TEST(Kernels, SpatioTemporalIsSeparableProduct) {
    KernelSpec s{{KernelFamily::matern52(), 0.4}, KernelComponent{KernelFamily::matern12(), 3.0}, 2.0, 0.1};
    Eigen::VectorXd a(2), b(2);
    a << 0.1, 0.2;
    b << 0.5, 0.9;
    const double expect = 2.0 * oracle::matern52((a - b).norm(), 0.4) * oracle::matern12(1.5, 3.0);
    EXPECT_NEAR(spatio_temporal_cov(s, {a, 1.0}, {b, 2.5}), expect, 1e-14);
    s.temporal.reset();
    EXPECT_NEAR(spatio_temporal_cov(s, {a, 1.0}, {b, 100.0}), 2.0 * oracle::matern52((a - b).norm(), 0.4), 1e-14);
}

// Two-sided density: S integrates to k(0) = 1 over the real line and its
// cosine transform gives k back.
TEST(Kernels, SpectralDensityIsFourierPair) {
    for (const char* name : kFamilies) {
        const auto fam = KernelFamily::parse(name, 3.0);
        const double l = 0.7;
        // substitute f = tan(u) to cover the half-line; the integrand has a
        // finite limit at pi/2 (non-zero for Matern-1/2), taken just inside
        auto half = [&](auto g) {
            return oracle::simpson([&](double u) {
                u = std::min(u, std::numbers::pi / 2 - 1e-9);
                const double f = std::tan(u);
                return g(f) / (std::cos(u) * std::cos(u));
            }, 0.0, std::numbers::pi / 2, 20000);
        };
        EXPECT_NEAR(2.0 * half([&](double f) { return spectral_density(fam, l, f); }), 1.0, 2e-6) << name;
        for (double r : {0.3, 1.0}) {
            const double back = 2.0 * oracle::simpson([&](double f) {
                return spectral_density(fam, l, f) * std::cos(2 * std::numbers::pi * f * r);
            }, 0.0, 200.0, 400000);
            EXPECT_NEAR(back, oracle::by_name(name, r, l, 3.0), 2e-4) << name << " r=" << r;
        }
    }
}

TEST(Kernels, Matern12SpectralClosedForm) {
    // S(f) = 2l / (1 + (2 pi f l)^2), F(c) = (2/pi) atan(2 pi c l)
    for (double f : {0.0, 0.1, 1.0, 7.0}) {
        const double w = 2 * std::numbers::pi * f * 1.3;
        EXPECT_NEAR(spectral_density(KernelFamily::matern12(), 1.3, f), 2 * 1.3 / (1 + w * w), 1e-13);
        EXPECT_NEAR(power_spectral_distribution(KernelFamily::matern12(), 1.3, f), 2 / std::numbers::pi * std::atan(w), 1e-13);
    }
}

TEST(Kernels, DistributionAndTailAreComplementary) {
    for (const char* name : kFamilies) {
        const auto fam = KernelFamily::parse(name, 2.0);
        double prev = 0.0;
        for (double c : {0.01, 0.1, 0.5, 1.0, 3.0, 10.0}) {
            const double F = power_spectral_distribution(fam, 1.0, c);
            const double T = power_spectral_tail(fam, 1.0, c);
            EXPECT_NEAR(F + T, 1.0, 1e-9) << name;
            EXPECT_GE(F, prev);
            EXPECT_GE(T, 0.0);
            prev = F;
            // numerical oracle for F: 2 * int_0^c S
            const double num = 2.0 * oracle::simpson([&](double f) { return spectral_density(fam, 1.0, f); }, 0.0, c, 4000);
            EXPECT_NEAR(F, num, 1e-7) << name << " c=" << c;
        }
        EXPECT_EQ(power_spectral_distribution(fam, 1.0, 0.0), 0.0);
        EXPECT_EQ(power_spectral_tail(fam, 1.0, 0.0), 1.0);
    }
}

TEST(Kernels, RbfTailIsErfc) {
    EXPECT_NEAR(power_spectral_tail(KernelFamily::rbf(), 1.0, 0.5), std::erfc(std::numbers::sqrt2 * std::numbers::pi * 0.5), 1e-15);
}
