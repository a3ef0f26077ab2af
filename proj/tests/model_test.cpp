#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lppl/model.hpp"

using namespace lppl;

namespace {

// Independent long-double evaluation of the (C, phi) form.
long double lppl_reference(long double tc, long double m, long double omega, long double phi, long double A,
                           long double B, long double C, long double t) {
    const long double dt = tc - t;
    return A + B * std::pow(dt, m) + C * std::pow(dt, m) * std::cos(omega * std::log(dt) - phi);
}

} // namespace

TEST(LpplLogPrice, ConstantCase) {
    const LpplParams p{100.0, 0.7, 8.0, 0.3, 4.2, 0.0, 0.0};
    for (double t : {-50.0, 0.0, 99.9}) EXPECT_DOUBLE_EQ(lppl_log_price(p, t), 4.2);
}

TEST(LpplLogPrice, PowerLawOnly) {
    const LpplParams p{10.0, 0.5, 6.0, 0.0, 10.0, -1.0, 0.0};
    EXPECT_DOUBLE_EQ(lppl_log_price(p, 6.0), 8.0);
}

TEST(LpplLogPrice, FullFormAgainstHighPrecision) {
    const double e = std::numbers::e;
    const LpplParams p{e, 0.5, 6.0, 0.0, 10.0, -1.0, 0.1};
    const long double expected = 10.0L - std::exp(0.5L) + 0.1L * std::exp(0.5L) * std::cos(6.0L);
    EXPECT_NEAR(lppl_log_price(p, 0.0), static_cast<double>(expected), 1e-12);
    EXPECT_NEAR(static_cast<double>(lppl_reference(e, 0.5, 6.0, 0.0, 10.0, -1.0, 0.1, 0.0)),
                static_cast<double>(expected), 1e-12);
}

TEST(LpplLogPrice, DomainError) {
    const LpplParams p{10.0, 0.5, 6.0, 0.0, 1.0, -1.0, 0.1};
    EXPECT_THROW(lppl_log_price(p, 10.0), DomainError);
    EXPECT_THROW(lppl_log_price(p, 11.0), DomainError);
    try {
        lppl_log_price(p, 10.0);
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("t_c = 10"), std::string::npos);
    }
}

TEST(LpplBasis, AnalyticCases) {
    const auto b0 = lppl_basis(5.0, 0.0, 3.7, 4.0);
    EXPECT_DOUBLE_EQ(b0[0], 1.0);
    EXPECT_DOUBLE_EQ(b0[1], 1.0);
    EXPECT_DOUBLE_EQ(b0[2], 1.0);
    EXPECT_DOUBLE_EQ(b0[3], 0.0);

    const double e = std::numbers::e;
    const auto b1 = lppl_basis(e, 1.0, 2.0 * std::numbers::pi, 0.0);
    EXPECT_DOUBLE_EQ(b1[0], 1.0);
    EXPECT_NEAR(b1[1], e, 1e-15);
    EXPECT_NEAR(b1[2], e, 1e-14);
    EXPECT_NEAR(b1[3], 0.0, 1e-14);

    EXPECT_THROW(lppl_basis(1.0, 0.5, 6.0, 1.0), DomainError);
}

TEST(LpplBasis, DotProductMatchesDirectEvaluation) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double tc = 100.0 + 50.0 * u(rng);
        const double m = 0.05 + 0.9 * u(rng);
        const double omega = 2.0 + 13.0 * u(rng);
        const double A = 10.0 * u(rng);
        const double B = -2.0 + 4.0 * u(rng);
        const double C1 = -0.2 + 0.4 * u(rng);
        const double C2 = -0.2 + 0.4 * u(rng);
        const double t = tc - 0.01 - 99.0 * u(rng);
        const auto b = lppl_basis(tc, m, omega, t);
        const double dot = A * b[0] + B * b[1] + C1 * b[2] + C2 * b[3];
        const auto p = LpplParams::from_linear(tc, m, omega, A, B, C1, C2);
        worst = std::max(worst, std::abs(dot - lppl_log_price(p, t)));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(LpplParams, LinearFormRoundTrip) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double C1 = u(rng), C2 = u(rng);
        const auto p = LpplParams::from_linear(1, 0.5, 6, 0, 0, C1, C2);
        EXPECT_GE(p.phi, 0.0);
        EXPECT_LT(p.phi, 2.0 * std::numbers::pi);
        EXPECT_NEAR(p.c1(), C1, 1e-12);
        EXPECT_NEAR(p.c2(), C2, 1e-12);
    }
}

TEST(LpplLogPrice, PhaseSymmetries) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        LpplParams p{200.0, 0.1 + 0.8 * u(rng), 2.0 + 13.0 * u(rng), 2.0 * std::numbers::pi * u(rng),
                     5.0 * u(rng), -u(rng), 0.3 * u(rng)};
        const double t = 200.0 - 0.5 - 150.0 * u(rng);
        LpplParams flipped = p;
        flipped.C = -p.C;
        flipped.phi = p.phi + std::numbers::pi;
        LpplParams wrapped = p;
        wrapped.phi = p.phi + 2.0 * std::numbers::pi;
        EXPECT_NEAR(lppl_log_price(p, t), lppl_log_price(flipped, t), 1e-12);
        EXPECT_NEAR(lppl_log_price(p, t), lppl_log_price(wrapped, t), 1e-12);
    }
}

TEST(LpplLogPrice, PowerLawIsIncreasingWithDivergingSlope) {
    const LpplParams p{100.0, 0.5, 6.0, 0.0, 5.0, -0.5, 0.0};
    double prev = lppl_log_price(p, 0.0);
    for (double t = 0.5; t < 100.0; t += 0.5) {
        const double v = lppl_log_price(p, t);
        EXPECT_GT(v, prev);
        prev = v;
    }
    double prev_slope = 0.0;
    for (double gap : {1.0, 1e-2, 1e-4, 1e-6, 1e-8}) {
        const double h = gap / 10.0;
        const double t = 100.0 - gap;
        const double slope = (lppl_log_price(p, t) - lppl_log_price(p, t - h)) / h;
        EXPECT_GT(slope, 5.0 * prev_slope);
        prev_slope = slope;
    }
    EXPECT_GT(prev_slope, 1e3);
}

TEST(ScalingRatio, Values) {
    EXPECT_NEAR(scaling_ratio(2.0 * std::numbers::pi), std::numbers::e, 1e-15);
    EXPECT_NEAR(scaling_ratio(2.0 * std::numbers::pi / std::log(3.0)), 3.0, 1e-12);
    EXPECT_NEAR(scaling_ratio(2.0 * std::numbers::pi / std::log(4.0)), 4.0, 1e-12);
    EXPECT_NEAR(2.0 * std::numbers::pi / std::log(3.0), 5.7192, 1e-4);
    EXPECT_NEAR(2.0 * std::numbers::pi / std::log(4.0), 4.5324, 1e-4);
    EXPECT_THROW(scaling_ratio(0.0), DomainError);
    EXPECT_THROW(scaling_ratio(-1.0), DomainError);
}

TEST(GordonShapiro, PriceExamples) {
    EXPECT_NEAR(gordon_shapiro_price({100, 0.08, 0.04}), 2500.0, 1e-9);
    EXPECT_NEAR(gordon_shapiro_price({100, 0.06, 0.04}), 5000.0, 1e-9);
    EXPECT_NEAR(gordon_shapiro_price({100, 0.10, 0.0}), 1000.0, 1e-9);
    EXPECT_THROW(gordon_shapiro_price({100, 0.04, 0.04}), DomainError);
    EXPECT_THROW(gordon_shapiro_price({100, 0.03, 0.04}), DomainError);
    try {
        gordon_shapiro_price({100, 0.03, 0.04});
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("no finite price"), std::string::npos);
    }
}

TEST(GordonShapiro, ReturnExamples) {
    EXPECT_NEAR(gordon_shapiro_return(100, 2500, 0.04), 0.08, 1e-15);
    EXPECT_NEAR(gordon_shapiro_return(100, 5000, 0.04), 0.06, 1e-15);
    EXPECT_NEAR(gordon_shapiro_return(1, 100, 0.0), 0.01, 1e-15);
    EXPECT_THROW(gordon_shapiro_return(1, 0, 0.0), DomainError);
}

TEST(GordonShapiro, RoundTrip) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double g = -0.05 + 0.1 * u(rng);
        const DividendModel dm{0.1 + 100.0 * u(rng), g + 0.001 + 0.2 * u(rng), g};
        const double p = gordon_shapiro_price(dm);
        EXPECT_NEAR(gordon_shapiro_return(dm.dividend, p, dm.growth), dm.total_return, 1e-12);
    }
}

TEST(Cascade, FirstRowsMatchTable) {
    const auto rows = cascade(2.0, 0.02, 3);
    ASSERT_EQ(rows.size(), 3u);
    const double expected_doubling[] = {34.657, 17.329, 8.664};
    const double expected_pop[] = {2, 4, 8};
    const double expected_rate[] = {0.02, 0.04, 0.08};
    for (int k = 0; k < 3; ++k) {
        EXPECT_NEAR(rows[k].doubling_time, expected_doubling[k], 1e-3);
        EXPECT_DOUBLE_EQ(rows[k].population, expected_pop[k]);
        EXPECT_DOUBLE_EQ(rows[k].rate, expected_rate[k]);
    }
    EXPECT_DOUBLE_EQ(rows[0].time, 0.0);
    EXPECT_NEAR(rows[1].time, 34.65, 0.01);
    EXPECT_NEAR(rows[2].time, 51.98, 0.01);
}

TEST(Cascade, SingleRow) {
    const auto rows = cascade(1.0, 0.1, 1);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].time, 0.0);
}

TEST(Cascade, TenthRowAgainstGeometricSeries) {
    const auto rows = cascade(2.0, 0.02, 10);
    const double first = std::numbers::ln2 / 0.02;
    // Start of the tenth row (index 9) is first * (1 + 1/2 + ... + 1/2^8).
    EXPECT_NEAR(rows[9].time, first * (2.0 - std::pow(2.0, -8)), 1e-10);
    EXPECT_NEAR(rows[9].time, 69.18, 0.005);
    // Elapsed after ten doublings.
    EXPECT_NEAR(cascade_elapsed(rows), first * (2.0 - std::pow(2.0, -9)), 1e-10);
}

TEST(Cascade, DoublingTimesHalveAndTimesConverge) {
    const auto rows = cascade(2.0, 0.02, 40);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_NEAR(rows[k].doubling_time, rows[k - 1].doubling_time / 2.0, 1e-15);
        EXPECT_NEAR(rows[k].doubling_time, std::numbers::ln2 / rows[k].rate, 1e-15);
        EXPECT_LT(rows[k].time, singular_time(0.02));
    }
    EXPECT_NEAR(cascade_elapsed(rows), singular_time(0.02), 1e-6);
    EXPECT_THROW(cascade(0.0, 0.02, 3), DomainError);
    EXPECT_THROW(cascade(2.0, 0.0, 3), DomainError);
    EXPECT_THROW(cascade(2.0, 0.02, 0), DomainError);
}

TEST(SingularTime, Values) {
    EXPECT_NEAR(singular_time(0.02), 69.31, 0.05);
    EXPECT_NEAR(singular_time(std::numbers::ln2), 2.0, 1e-15);
    EXPECT_THROW(singular_time(0.0), DomainError);
}

TEST(Growth, Exponential) {
    for (double t : {0.0, 3.0, 100.0}) EXPECT_DOUBLE_EQ(growth_value(ExponentialGrowth{0.0, 7.0}, t), 7.0);
    EXPECT_NEAR(growth_value(ExponentialGrowth{0.1, 2.0}, 10.0), 2.0 * std::exp(1.0), 1e-12);
}

TEST(Growth, LogisticBoundedByCapacity) {
    const LogisticGrowth g{0.5, 1000.0, 1.0};
    for (double t = 0.0; t < 200.0; t += 1.0) EXPECT_LE(growth_value(g, t), 1000.0);
    EXPECT_NEAR(growth_value(g, 200.0), 1000.0, 1e-9 * 1000.0);
    EXPECT_DOUBLE_EQ(growth_value(g, 0.0), 1.0);
    EXPECT_THROW(growth_value(LogisticGrowth{0.5, 1.0, 2.0}, 0.0), DomainError);
}

TEST(Growth, HyperbolicDiverges) {
    const HyperbolicGrowth g{100.0, 1.0, 50.0};
    for (double bound : {1e3, 1e6, 1e9}) {
        // scale / (tc - t) > bound once tc - t < scale / bound.
        const double t = 100.0 - 0.5 * 50.0 / bound;
        EXPECT_GT(growth_value(g, t), bound);
    }
    EXPECT_THROW(growth_value(g, 100.0), DomainError);
    EXPECT_THROW(growth_value(HyperbolicGrowth{100.0, 0.0, 1.0}, 0.0), DomainError);
}

TEST(Growth, HyperbolicCrossesMatchedExponentialOnce) {
    // Singularity at step 100; the exponential starts at the same value and
    // has the hyperbolic's mean log-growth rate over the first 90 steps.
    const HyperbolicGrowth hyper{100.0, 1.0, 100.0};
    const double h0 = growth_value(hyper, 0.0);
    const ExponentialGrowth expo{std::log(growth_value(hyper, 90.0) / h0) / 90.0, h0};
    auto diff = [&](double t) { return growth_value(hyper, t) - growth_value(expo, t); };

    int sign_changes = 0;
    double lo = 0.0, hi = 0.0;
    const double step = 0.01;
    for (double t = step; t + step <= 99.0; t += step) {
        if ((diff(t) > 0) != (diff(t + step) > 0)) {
            ++sign_changes;
            lo = t;
            hi = t + step;
        }
    }
    ASSERT_EQ(sign_changes, 1);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((diff(mid) > 0) == (diff(hi) > 0) ? hi : lo) = mid;
    }
    EXPECT_NEAR(lo, 90.0, 1e-9);
    for (double t = step; t < lo - step; t += 1.0) EXPECT_LT(diff(t), 0.0);
    for (double t = lo + step; t <= 99.0; t += 0.5) EXPECT_GT(diff(t), 0.0);
}
