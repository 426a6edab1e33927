#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mnjs/divergences.hpp"
#include "mnjs/wmixture.hpp"

using namespace mnjs;

namespace {

Vec v1(double a) {
    Vec v(1);
    v << a;
    return v;
}

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

WMixtureFamily gaussian_family() {
    return WMixtureFamily({normal_density(-1.0, 0.7), normal_density(0.5, 1.0), normal_density(2.0, 0.5)});
}

std::vector<double> cat_mix(const std::vector<std::vector<double>>& comps, const std::vector<double>& w) {
    std::vector<double> out(comps[0].size(), 0.0);
    for (std::size_t j = 0; j < comps.size(); ++j)
        for (std::size_t c = 0; c < out.size(); ++c) out[c] += w[j] * comps[j][c];
    return out;
}

double cat_jsd(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) s += 0.5 * p[i] * std::log(p[i] / m);
        if (q[i] > 0.0) s += 0.5 * q[i] * std::log(q[i] / m);
    }
    return s;
}

Vec random_interior(std::size_t d, std::mt19937_64& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> w(d + 1);
    double s = 0.0;
    for (auto& x : w) s += (x = g(rng) + 0.02);
    Vec t(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) t[static_cast<Eigen::Index>(i)] = w[i + 1] / s;
    return t;
}

}  // namespace

TEST(MixtureDensity, Examples) {
    const WMixtureFamily fam = gaussian_family();
    const Density m0 = fam.mixture_density(v2(0.0, 0.0));
    for (double x : {-2.0, 0.0, 1.3}) EXPECT_NEAR(m0.eval(x), fam.components()[0].eval(x), 1e-15);
    const Vec t1 = v2(0.2, 0.3), t2 = v2(0.6, 0.1);
    const Density a = fam.mixture_density(t1), b = fam.mixture_density(t2), mid = fam.mixture_density(0.5 * (t1 + t2));
    for (double x : {-2.0, 0.0, 1.3, 4.0}) EXPECT_NEAR(mid.eval(x), 0.5 * (a.eval(x) + b.eval(x)), 1e-15);
    EXPECT_NEAR(total_mass(a, OracleConfig{}).value, 1.0, 1e-9);
    EXPECT_THROW(fam.mixture_density(v2(0.7, 0.7)), DomainError);
    EXPECT_THROW(fam.mixture_density(v2(-0.1, 0.5)), DomainError);
    EXPECT_THROW(fam.mixture_density(v1(0.5)), DomainError);
}

TEST(MixtureDensity, CategoricalCells) {
    const WMixtureFamily fam({categorical_density({1, 0, 0}), categorical_density({0, 1, 0}), categorical_density({0, 0, 1})});
    EXPECT_TRUE(fam.categorical());
    const Density m = fam.mixture_density(v2(0.25, 0.35));
    const auto& p = m.family_as<CategoricalPoint>()->probs();
    EXPECT_NEAR(p[0], 0.4, 1e-15);
    EXPECT_NEAR(p[1], 0.25, 1e-15);
    EXPECT_NEAR(p[2], 0.35, 1e-15);
}

TEST(MixtureFamily, Validation) {
    EXPECT_THROW(WMixtureFamily({normal_density(0, 1)}), DomainError);
    EXPECT_THROW(WMixtureFamily({categorical_density({0.5, 0.5}), normal_density(0, 1)}), DomainError);
    const WMixtureFamily fam = gaussian_family();
    EXPECT_FALSE(fam.in_domain(v2(0.0, 0.5)));
    EXPECT_FALSE(fam.in_domain(v2(0.5, 0.5)));
    EXPECT_TRUE(fam.in_domain(v2(0.5, 0.4999)));
    EXPECT_THROW(wmix_kl(fam, v2(1e-10, 0.5), v2(0.3, 0.3)), DomainError);
}

TEST(Negentropy, Examples) {
    const WMixtureFamily bin({categorical_density({1, 0}), categorical_density({0, 1})});
    EXPECT_NEAR(negentropy(bin, v1(0.5)), -std::log(2.0), 1e-15);
    // Disjoint uniforms of width 2: F(t) = (1 - t) log(1 - t) + t log t - log 2.
    const WMixtureFamily dis({uniform_density(0.0, 2.0), uniform_density(5.0, 7.0)});
    for (double t : {0.1, 0.5, 0.77}) {
        EXPECT_NEAR(negentropy(dis, v1(t)), (1.0 - t) * std::log(1.0 - t) + t * std::log(t) - std::log(2.0), 1e-10) << t;
    }
    EXPECT_NEAR(negentropy(dis, v1(0.0)), -std::log(2.0), 1e-10);
}

TEST(Negentropy, StrictMidpointConvexity) {
    const WMixtureFamily fam = gaussian_family();
    std::mt19937_64 rng(41);
    for (int i = 0; i < 200; ++i) {
        const Vec a = random_interior(2, rng), b = random_interior(2, rng);
        ASSERT_LT(negentropy(fam, 0.5 * (a + b)), 0.5 * (negentropy(fam, a) + negentropy(fam, b)));
    }
}

TEST(Negentropy, GradientRoutesAgree) {
    const WMixtureFamily fam = gaussian_family();
    std::mt19937_64 rng(42);
    for (int i = 0; i < 5; ++i) {
        const Vec t = random_interior(2, rng);
        const Vec fd = fam.gradient(t), an = fam.gradient_analytic(t);
        EXPECT_LE((fd - an).cwiseAbs().maxCoeff(), 1e-6) << fd.transpose() << " vs " << an.transpose();
    }
}

TEST(WmixDivergences, Identity) {
    const WMixtureFamily fam = gaussian_family();
    EXPECT_EQ(wmix_kl(fam, v2(0.2, 0.3), v2(0.2, 0.3)), 0.0);
    EXPECT_EQ(wmix_jsd(fam, v2(0.2, 0.3), v2(0.2, 0.3)), 0.0);
}

TEST(WmixDivergences, CategoricalMatchesFiniteSum) {
    const std::vector<std::vector<double>> comps = {{0.6, 0.3, 0.1, 0.0}, {0.1, 0.2, 0.3, 0.4}, {0.25, 0.25, 0.25, 0.25}};
    const WMixtureFamily fam({categorical_density(comps[0]), categorical_density(comps[1]), categorical_density(comps[2])});
    std::mt19937_64 rng(43);
    for (int i = 0; i < 20; ++i) {
        const Vec a = random_interior(2, rng), b = random_interior(2, rng);
        const auto p = cat_mix(comps, fam.weights(a)), q = cat_mix(comps, fam.weights(b));
        EXPECT_NEAR(wmix_jsd(fam, a, b), cat_jsd(p, q), 1e-12);
        double kl_sum = 0.0;
        for (std::size_t c = 0; c < p.size(); ++c) kl_sum += p[c] * std::log(p[c] / q[c]);
        EXPECT_NEAR(wmix_kl(fam, a, b), kl_sum, 1e-8);
    }
}

TEST(WmixDivergences, ContinuousMatchesOracle) {
    const WMixtureFamily fam = gaussian_family();
    std::mt19937_64 rng(44);
    for (int i = 0; i < 5; ++i) {
        const Vec a = random_interior(2, rng), b = random_interior(2, rng);
        const Density p = fam.mixture_density(a), q = fam.mixture_density(b);
        EXPECT_NEAR(wmix_jsd(fam, a, b), jsd(p, q), 1e-5);
        EXPECT_NEAR(wmix_kl(fam, a, b), kl(p, q), 1e-5);
    }
}

TEST(BregmanCentroid, Examples) {
    const WMixtureFamily fam = gaussian_family();
    const Vec a = v2(0.2, 0.3), b = v2(0.5, 0.1);
    EXPECT_LE((bregman_centroid_right(fam, {a}, {1.0}) - a).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((bregman_centroid_right(fam, {a, b}, {1.0, 1.0}) - 0.5 * (a + b)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(bregman_centroid_right(fam, {a, b}, {1.0}), DomainError);
    EXPECT_THROW(bregman_centroid_right(fam, {a}, {0.0}), DomainError);
}

TEST(BregmanCentroid, LocalGridOptimality) {
    const WMixtureFamily fam({categorical_density({0.7, 0.2, 0.1}), categorical_density({0.1, 0.3, 0.6}), categorical_density({0.3, 0.5, 0.2})});
    const std::vector<Vec> ts = {v2(0.2, 0.3), v2(0.5, 0.1), v2(0.1, 0.7)};
    const std::vector<double> ws = {0.5, 0.3, 0.2};
    const Vec c = bregman_centroid_right(fam, ts, ws);
    auto cost = [&](const Vec& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < ts.size(); ++i) s += ws[i] * wmix_kl(fam, ts[i], x);
        return s;
    };
    const double best = cost(c);
    for (int i = -2; i <= 2; ++i) {
        for (int j = -2; j <= 2; ++j) {
            if (i == 0 && j == 0) continue;
            EXPECT_GT(cost(c + v2(0.01 * i, 0.01 * j)), best);
        }
    }
}
