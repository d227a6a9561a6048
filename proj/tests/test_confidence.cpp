#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "safeprob/confidence.hpp"
#include "safeprob/error.hpp"
#include "support/oracles.hpp"

namespace sp = safeprob;
namespace cf = sp::confidence;

TEST(SpecialFunctions, NormalCdf) {
    EXPECT_EQ(cf::normal_cdf(0), 0.5);
    EXPECT_NEAR(cf::normal_cdf(1.96), 0.9750021, 1e-6);
    for (double x = -6; x <= 6; x += 0.37) {
        EXPECT_NEAR(cf::normal_cdf(x), static_cast<double>(sp::oracle::normal_cdf(x)), 1e-12) << x;
    }
    EXPECT_LT(cf::normal_cdf(-8), 1e-12);
    EXPECT_GT(cf::normal_cdf(8), 1 - 1e-12);
    EXPECT_THROW(cf::normal_cdf(std::nan("")), sp::Error);
}

TEST(SpecialFunctions, RegularizedGamma) {
    for (const double x : {0.1, 1.0, 5.0}) {
        EXPECT_NEAR(cf::gamma_reg(1, x), 1 - std::exp(-x), 1e-10);
    }
    for (const int n : {2, 5, 10, 30}) {
        for (const double x : {0.01, 0.5, 2.0, 5.0, 9.0, 20.0, 45.0}) {
            const double ref = static_cast<double>(sp::oracle::gamma_reg_integer(n, x));
            EXPECT_NEAR(cf::gamma_reg(n, x), ref, 1e-10 * std::max(ref, 1e-300) + 1e-15) << n << " " << x;
        }
    }
    EXPECT_EQ(cf::gamma_reg(3, 0), 0);
    EXPECT_THROW(cf::gamma_reg(0, 1), sp::Error);
    EXPECT_THROW(cf::gamma_reg(1, -1), sp::Error);
}

TEST(ConfidenceCdf, NormalLocationClosedForm) {
    const auto fam = cf::ParametricFamily1D::normal_location(10);
    // F~(theta | v) = Phi(sqrt(n) (theta - v)).
    EXPECT_NEAR(cf::confidence_cdf(fam, 0.3, 0.3), 0.5, 1e-15);
    EXPECT_NEAR(cf::confidence_cdf(fam, 0.3, 0.5),
                static_cast<double>(sp::oracle::normal_cdf(0.2L * std::sqrt(10.0L))), 1e-12);
    const auto expm = cf::ParametricFamily1D::exponential_mean(5);
    EXPECT_THROW(cf::confidence_cdf(expm, -1, 1), sp::Error);
    EXPECT_THROW(cf::confidence_cdf(expm, 1, 0), sp::Error);
}

TEST(ConfidenceCdf, IsAValidCdfInTheta) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> vpos(0.2, 20);
    std::uniform_real_distribution<double> vreal(-5, 5);
    for (int trial = 0; trial < 100; ++trial) {
        for (const auto& fam : {cf::ParametricFamily1D::normal_location(1 + trial % 12),
                                cf::ParametricFamily1D::exponential_mean(1 + trial % 7)}) {
            const bool positive = fam.name() == "expmean";
            const double v = positive ? vpos(rng) : vreal(rng);
            double prev = -1;
            const double lo = positive ? 1e-6 : -1e3;
            // F~(mu|s) = 1 - P(n, s/mu) approaches 1 only like (s/mu)^n.
            const double hi = positive ? 1e12 : 1e3;
            for (int k = 0; k <= 200; ++k) {
                const double theta = positive ? lo * std::pow(hi / lo, k / 200.0) : lo + (hi - lo) * k / 200.0;
                const double f = cf::confidence_cdf(fam, v, theta);
                EXPECT_GE(f, prev);
                prev = f;
            }
            EXPECT_LT(cf::confidence_cdf(fam, v, lo), 1e-9);
            EXPECT_GT(cf::confidence_cdf(fam, v, hi), 1 - 1e-9);
        }
    }
}

TEST(ConfidenceCdf, NormalShiftConsistency) {
    const auto fam = cf::ParametricFamily1D::normal_location(7);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> d(-3, 3);
    for (int trial = 0; trial < 500; ++trial) {
        const double theta = d(rng);
        const double v = d(rng);
        const double c = d(rng);
        EXPECT_NEAR(cf::confidence_cdf(fam, v, theta), cf::confidence_cdf(fam, v + c, theta + c), 1e-12);
    }
}

TEST(CredibleInterval, Examples) {
    const auto n1 = cf::ParametricFamily1D::normal_location(1);
    const auto ci = cf::credible_interval(n1, 0, 0.025, 0.975);
    EXPECT_NEAR(ci.lower, -1.959964, 1e-6);
    EXPECT_NEAR(ci.upper, 1.959964, 1e-6);

    const auto n10 = cf::ParametricFamily1D::normal_location(10);
    const auto ci10 = cf::credible_interval(n10, 0.4, 0.025, 0.975);
    EXPECT_NEAR(ci10.upper - ci10.lower, 2 * 1.959964 / std::sqrt(10.0), 1e-6);
    EXPECT_NEAR((ci10.upper + ci10.lower) / 2, 0.4, 1e-9);

    const auto full = cf::credible_interval(n1, 2, 0, 1);
    EXPECT_TRUE(std::isinf(full.lower) && full.lower < 0);
    EXPECT_TRUE(std::isinf(full.upper) && full.upper > 0);

    const auto expm = cf::ParametricFamily1D::exponential_mean(5);
    const auto ce = cf::credible_interval(expm, 5, 0.05, 0.95);
    EXPECT_NEAR(cf::confidence_cdf(expm, 5, ce.lower), 0.05, 1e-8);
    EXPECT_NEAR(cf::confidence_cdf(expm, 5, ce.upper), 0.95, 1e-8);
    EXPECT_GT(ce.lower, 0);

    EXPECT_THROW(cf::credible_interval(n1, 0, 0.5, 0.5), sp::Error);
    EXPECT_THROW(cf::credible_interval(n1, 0, -0.1, 0.5), sp::Error);
}

TEST(CredibleInterval, RoundTripAtRandomLevels) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lvl(0.001, 0.999);
    std::uniform_real_distribution<double> vpos(0.05, 50);
    for (int trial = 0; trial < 200; ++trial) {
        double a = lvl(rng);
        double b = lvl(rng);
        if (a > b) {
            std::swap(a, b);
        }
        if (b - a < 1e-3) {
            continue;
        }
        const auto fam = trial % 2 ? cf::ParametricFamily1D::exponential_mean(1 + trial % 9)
                                   : cf::ParametricFamily1D::normal_location(1 + trial % 9);
        const double v = trial % 2 ? vpos(rng) : vpos(rng) - 25;
        const auto ci = cf::credible_interval(fam, v, a, b);
        EXPECT_NEAR(cf::confidence_cdf(fam, v, ci.lower), a, 1e-8);
        EXPECT_NEAR(cf::confidence_cdf(fam, v, ci.upper), b, 1e-8);
    }
}

TEST(Coverage, Examples) {
    const auto n10 = cf::ParametricFamily1D::normal_location(10);
    const auto c = cf::coverage_estimate(n10, 0.7, 0.025, 0.975, 100000, 1);
    EXPECT_NEAR(c.coverage, 0.95, 0.01);
    EXPECT_NEAR(c.standard_error, std::sqrt(c.coverage * (1 - c.coverage) / 1e5), 1e-12);
    EXPECT_EQ(c.endpoint_checks, 1000U);
    EXPECT_EQ(c.endpoint_mismatches, 0U);

    EXPECT_EQ(cf::coverage_estimate(n10, 0.7, 0, 1, 1000, 2).coverage, 1.0);

    const auto e = cf::coverage_estimate(cf::ParametricFamily1D::exponential_mean(5), 2.0, 0.05, 0.95, 100000, 3);
    EXPECT_NEAR(e.coverage, 0.90, 0.01);
    EXPECT_EQ(e.endpoint_mismatches, 0U);

    const auto again = cf::coverage_estimate(n10, 0.7, 0.025, 0.975, 100000, 1);
    EXPECT_EQ(again.coverage, c.coverage);
    EXPECT_THROW(cf::coverage_estimate(n10, 0.7, 0.5, 0.2, 10, 1), sp::Error);
    EXPECT_THROW(cf::coverage_estimate(n10, 0.7, 0.1, 0.2, 0, 1), sp::Error);
}

TEST(Coverage, PivotUniformityAtRandomParameters) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> t(-4, 4);
    std::uniform_real_distribution<double> mu(0.1, 10);
    for (int trial = 0; trial < 4; ++trial) {
        EXPECT_LE(cf::pivot_uniformity(cf::ParametricFamily1D::normal_location(1 + trial), t(rng), 100000, trial), 0.01);
        EXPECT_LE(cf::pivot_uniformity(cf::ParametricFamily1D::exponential_mean(1 + 2 * trial), mu(rng), 100000, trial),
                  0.01);
    }
}

TEST(FromPivot, MatchesTheBuiltInFamilies) {
    const int n = 4;
    const auto normal = cf::ParametricFamily1D::normal_location(n);
    const double root_n = std::sqrt(static_cast<double>(n));
    // sqrt(n)(theta - v) ~ N(0,1), increasing in theta.
    const auto adapted = cf::ParametricFamily1D::from_pivot(
        "normal-pivot", {}, {}, n, [root_n](double theta, double v) { return root_n * (theta - v); }, cf::normal_cdf,
        true, [normal](double theta, std::mt19937_64& rng) { return normal.sample(theta, rng); },
        [](double v) { return v; });

    const auto expm = cf::ParametricFamily1D::exponential_mean(n);
    const cf::OpenInterval positive{0.0, std::numeric_limits<double>::infinity()};
    // s / mu ~ Gamma(n, 1), decreasing in mu.
    const auto adapted_exp = cf::ParametricFamily1D::from_pivot(
        "expmean-pivot", positive, positive, n, [](double mu, double s) { return s / mu; },
        [n](double x) { return cf::gamma_reg(n, std::max(x, 0.0)); }, false,
        [expm](double mu, std::mt19937_64& rng) { return expm.sample(mu, rng); },
        [n](double s) { return s / n; });

    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> d(-3, 3);
    std::uniform_real_distribution<double> pos(0.1, 10);
    for (int trial = 0; trial < 300; ++trial) {
        const double theta = d(rng);
        const double v = d(rng);
        EXPECT_NEAR(cf::confidence_cdf(adapted, v, theta), cf::confidence_cdf(normal, v, theta), 1e-14);
        const double mu = pos(rng);
        const double s = pos(rng);
        EXPECT_NEAR(cf::confidence_cdf(adapted_exp, s, mu), cf::confidence_cdf(expm, s, mu), 1e-14);
    }
    const auto c = cf::coverage_estimate(adapted_exp, 1.5, 0.05, 0.95, 20000, 4);
    EXPECT_LE(std::abs(c.coverage - 0.9), 3 * c.standard_error + 1e-12);
}
