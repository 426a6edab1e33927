#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mnjs/means.hpp"

using namespace mnjs;

TEST(Means, WorkedValues) {
    EXPECT_NEAR(WeightedMean::harmonic().evaluate(0.1, 0.5, 0.5), 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(WeightedMean::geometric().evaluate(4.0, 1.0, 0.5), 2.0, 1e-15);
    EXPECT_NEAR(WeightedMean::power(2.0).evaluate(1.0, 3.0, 0.25), std::sqrt(3.0), 1e-15);
    const WeightedMean sq = QuasiArithmeticMean{[](double u) { return u * u; }, [](double v) { return std::sqrt(v); }, "square"};
    EXPECT_NEAR(sq.evaluate(1.0, 3.0, 0.25), std::sqrt(3.0), 1e-15);
}

TEST(Means, Endpoints) {
    for (const auto& m : {WeightedMean::arithmetic(), WeightedMean::geometric(), WeightedMean::harmonic(), WeightedMean::power(-2.5)}) {
        EXPECT_EQ(m.evaluate(0.3, 7.0, 0.0), 0.3);
        EXPECT_EQ(m.evaluate(0.3, 7.0, 1.0), 7.0);
    }
}

TEST(Means, DomainErrors) {
    EXPECT_THROW(WeightedMean::arithmetic().evaluate(1.0, 2.0, 1.5), DomainError);
    EXPECT_THROW(WeightedMean::arithmetic().evaluate(1.0, 2.0, -0.1), DomainError);
    EXPECT_THROW(WeightedMean::geometric().evaluate(0.0, 2.0, 0.5), DomainError);
    EXPECT_THROW(WeightedMean::harmonic().evaluate(-1.0, 2.0, 0.5), DomainError);
    EXPECT_THROW(WeightedMean::parse("median"), DomainError);
    EXPECT_THROW((WeightedMean(QuasiArithmeticMean{[](double u) { return u; }, {}, "broken"})), DomainError);
}

TEST(Means, Parse) {
    EXPECT_TRUE(WeightedMean::parse("H").is_harmonic());
    EXPECT_TRUE(WeightedMean::parse("geometric").is_geometric());
    EXPECT_TRUE(WeightedMean::parse("power:0").is_geometric());
    EXPECT_NEAR(WeightedMean::parse("power:2").evaluate(1.0, 3.0, 0.25), std::sqrt(3.0), 1e-15);
}

TEST(Means, PowerTendsToGeometric) {
    const double g = WeightedMean::geometric().evaluate(0.7, 3.1, 0.4);
    for (double p : {1e-6, -1e-6, 1e-4, -1e-4}) {
        EXPECT_NEAR(WeightedMean::power(p).evaluate(0.7, 3.1, 0.4), g, std::abs(p) * g) << p;
    }
    EXPECT_TRUE(WeightedMean::power(1e-7).is_geometric());
}

TEST(Means, Dominance) {
    EXPECT_TRUE(dominates(WeightedMean::arithmetic(), WeightedMean::geometric()));
    EXPECT_TRUE(dominates(WeightedMean::geometric(), WeightedMean::harmonic()));
    EXPECT_FALSE(dominates(WeightedMean::harmonic(), WeightedMean::arithmetic()));
    EXPECT_TRUE(dominates(WeightedMean::power(2.0), WeightedMean::arithmetic()));
}

TEST(MeansProperty, InBetweennessAghSymmetry) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> le(-10.0, 10.0), ua(0.0, 1.0);
    const std::vector<WeightedMean> means = {WeightedMean::arithmetic(), WeightedMean::geometric(), WeightedMean::harmonic(),
                                             WeightedMean::power(2.0), WeightedMean::power(-1.5)};
    for (int i = 0; i < 10000; ++i) {
        const double x = std::exp(le(rng)), y = std::exp(le(rng)), a = ua(rng);
        for (const auto& m : means) {
            const double r = m.evaluate(x, y, a);
            ASSERT_GE(r, std::min(x, y) * (1.0 - 1e-12));
            ASSERT_LE(r, std::max(x, y) * (1.0 + 1e-12));
            ASSERT_NEAR(m.evaluate(y, x, 1.0 - a), r, 1e-12 * r);
        }
        const double A = means[0].evaluate(x, y, a), G = means[1].evaluate(x, y, a), H = means[2].evaluate(x, y, a);
        ASSERT_LE(H, G * (1.0 + 1e-12));
        ASSERT_LE(G, A * (1.0 + 1e-12));
    }
}

TEST(MeansProperty, QuasiArithmeticReproducesGeometricAndHarmonic) {
    const WeightedMean qlog = QuasiArithmeticMean{[](double u) { return std::log(u); }, [](double v) { return std::exp(v); }, "log"};
    const WeightedMean qinv = QuasiArithmeticMean{[](double u) { return 1.0 / u; }, [](double v) { return 1.0 / v; }, "inv"};
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> le(-5.0, 5.0), ua(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = std::exp(le(rng)), y = std::exp(le(rng)), a = ua(rng);
        const double g = WeightedMean::geometric().evaluate(x, y, a), h = WeightedMean::harmonic().evaluate(x, y, a);
        ASSERT_NEAR(qlog.evaluate(x, y, a), g, 1e-12 * g);
        ASSERT_NEAR(qinv.evaluate(x, y, a), h, 1e-12 * h);
    }
}

TEST(MeansProperty, LogEvaluateMatchesEvaluate) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> le(-20.0, 20.0), ua(0.0, 1.0);
    const std::vector<WeightedMean> means = {WeightedMean::arithmetic(), WeightedMean::geometric(), WeightedMean::harmonic(),
                                             WeightedMean::power(3.0), WeightedMean::power(-0.5)};
    for (int i = 0; i < 1000; ++i) {
        const double lx = le(rng), ly = le(rng), a = ua(rng);
        for (const auto& m : means) {
            ASSERT_NEAR(m.log_evaluate(lx, ly, a), std::log(m.evaluate(std::exp(lx), std::exp(ly), a)), 1e-11) << m.name();
        }
    }
    // Underflowed arguments stay finite in log space.
    EXPECT_NEAR(WeightedMean::arithmetic().log_evaluate(-2000.0, -2000.0, 0.3), -2000.0, 1e-9);
    EXPECT_NEAR(WeightedMean::harmonic().log_evaluate(-1000.0, -1000.0, 0.5), -1000.0, 1e-9);
}
