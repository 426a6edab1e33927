#pragma once

// Closed-form-versus-oracle suites. Each case carries both numbers and the tolerance it was held to.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "mnjs/cauchy.hpp"
#include "mnjs/densities.hpp"
#include "mnjs/divergences.hpp"
#include "mnjs/expfam.hpp"
#include "mnjs/wmixture.hpp"

namespace mnjs {

struct VerifyCase {
    std::string suite;
    std::string name;
    double closed = 0.0;
    double oracle = 0.0;
    double abs_diff = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

namespace detail {

inline VerifyCase make_case(std::string suite, std::string name, double closed, double oracle, double tol) {
    VerifyCase c{std::move(suite), std::move(name), closed, oracle, std::abs(closed - oracle), tol, false};
    c.pass = std::isfinite(c.abs_diff) && c.abs_diff <= tol;
    return c;
}

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

/// Random d-variate normal: mu ~ N(0, 1), Sigma = A A^T + 0.5 I with A ~ N(0, 1/2).
inline MvnParam random_mvn(std::size_t d, Rng& rng) {
    std::normal_distribution<double> n01;
    const auto n = static_cast<Eigen::Index>(d);
    Vec mu(n);
    Mat a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) mu[i] = n01(rng);
    for (Eigen::Index i = 0; i < n * n; ++i) a.data()[i] = n01(rng) * std::sqrt(0.5);
    return MvnParam::ordinary(mu, a * a.transpose() + 0.5 * Mat::Identity(n, n));
}

}  // namespace detail

/// Geometric JSD of random MVN pairs: closed form against the oracle (quadrature for d = 1, Monte Carlo with
/// a 3-sigma band otherwise). The oracle works on untagged densities, so the mixture is normalized numerically.
inline std::vector<VerifyCase> verify_gjs_mvn(std::size_t dim = 1, std::size_t count = 50, std::uint64_t seed = 0,
                                              const OracleConfig& cfg = {}) {
    Rng rng(seed);
    std::uniform_real_distribution<double> ua(0.1, 0.9);
    const auto spec = mvn_spec(dim);
    std::vector<VerifyCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        MvnParam p1 = detail::random_mvn(dim, rng);
        MvnParam p2 = detail::random_mvn(dim, rng);
        if (dim == 1) {
            // Keep the 1D pairs in the range where a 1e-7 quadrature comparison is meaningful.
            std::uniform_real_distribution<double> um(-2.0, 2.0), us(0.3, 3.0);
            Vec m1(1), m2(1);
            m1 << um(rng);
            m2 << um(rng);
            const double s1 = us(rng), s2 = us(rng);
            p1 = MvnParam::ordinary(m1, Mat::Constant(1, 1, s1 * s1));
            p2 = MvnParam::ordinary(m2, Mat::Constant(1, 1, s2 * s2));
        }
        const double alpha = ua(rng);
        const double closed = g_jsd(*spec, mvn_natural_flat(p1), mvn_natural_flat(p2), alpha);
        const Density d1 = untagged(mvn_density(p1));
        const Density d2 = untagged(mvn_density(p2));
        OracleConfig c = cfg;
        c.seed = cfg.seed + i;
        const MMixture m = m_mixture(d1, d2, WeightedMean::geometric(), alpha, c);
        const KlEstimate k1 = kl_estimate(d1, m.density, c);
        const KlEstimate k2 = kl_estimate(d2, m.density, c);
        const double oracle = (1.0 - alpha) * k1.value + alpha * k2.value;
        double tol = 1e-7;
        if (dim >= 2) tol = 3.0 * ((1.0 - alpha) * k1.abs_error + alpha * k2.abs_error);
        out.push_back(detail::make_case("gjs-mvn", "d=" + std::to_string(dim) + " pair " + std::to_string(i) +
                                                       " alpha=" + detail::fmt(alpha),
                                        closed, oracle, tol));
    }
    return out;
}

/// Harmonic mixtures of Cauchy scale densities: normalizer and harmonic JSD against quadrature.
inline std::vector<VerifyCase> verify_hjs_cauchy(std::size_t count = 20, std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9},
                                                 std::uint64_t seed = 0, const OracleConfig& cfg = {}) {
    Rng rng(seed);
    std::uniform_real_distribution<double> ulog(std::log(0.05), std::log(5.0));
    std::vector<VerifyCase> out;
    for (std::size_t i = 0; i < count; ++i) {
        const CauchyScale g1(std::exp(ulog(rng)));
        const CauchyScale g2(std::exp(ulog(rng)));
        const Density d1 = untagged(cauchy_density(g1));
        const Density d2 = untagged(cauchy_density(g2));
        for (double alpha : alphas) {
            const std::string tag = "(" + detail::fmt(g1.gamma) + "," + detail::fmt(g2.gamma) + ") alpha=" + detail::fmt(alpha);
            const MMixture m = m_mixture(d1, d2, WeightedMean::harmonic(), alpha, cfg);
            out.push_back(detail::make_case("hjs-cauchy", "Z " + tag, harmonic_mixture(g1, g2, alpha).Z, m.Z.value, 1e-7));
            const double oracle = (1.0 - alpha) * kl(d1, m.density, cfg) + alpha * kl(d2, m.density, cfg);
            out.push_back(detail::make_case("hjs-cauchy", "JSD " + tag, harmonic_jsd(g1, g2, alpha), oracle, 1e-7));
        }
    }
    return out;
}

/// Bhattacharyya distance by quadrature against the skew Jensen divergence of the natural parameters.
inline std::vector<VerifyCase> verify_bhat_jensen(std::size_t pairs = 4, std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9},
                                                  std::uint64_t seed = 0, const OracleConfig& cfg = {}) {
    Rng rng(seed);
    std::uniform_real_distribution<double> um(-2.0, 2.0), us(0.3, 3.0);
    std::vector<VerifyCase> out;
    const auto gauss = mvn_spec(1);
    const auto fixed = fixed_variance_gaussian_spec(1.0);
    for (std::size_t i = 0; i < pairs; ++i) {
        const Vec t1 = mvn_natural_flat(MvnParam::ordinary(scalar(um(rng)), Mat::Constant(1, 1, std::pow(us(rng), 2))));
        const Vec t2 = mvn_natural_flat(MvnParam::ordinary(scalar(um(rng)), Mat::Constant(1, 1, std::pow(us(rng), 2))));
        const Vec f1 = scalar(um(rng)), f2 = scalar(um(rng));
        for (double alpha : alphas) {
            const std::string a = " alpha=" + detail::fmt(alpha);
            out.push_back(detail::make_case(
                "bhat-jensen", "gaussian pair " + std::to_string(i) + a, jensen_skew(*gauss, t1, t2, alpha).value,
                bhattacharyya(untagged(expfam_density(gauss, t1)), untagged(expfam_density(gauss, t2)), alpha, cfg), 1e-7));
            out.push_back(detail::make_case(
                "bhat-jensen", "fixed-variance pair " + std::to_string(i) + a, jensen_skew(*fixed, f1, f2, alpha).value,
                bhattacharyya(untagged(expfam_density(fixed, f1)), untagged(expfam_density(fixed, f2)), alpha, cfg), 1e-7));
        }
    }
    return out;
}

namespace detail {

inline Vec random_simplex_interior(std::size_t d, Rng& rng) {
    std::gamma_distribution<double> g(1.0, 1.0);
    std::vector<double> w(d + 1);
    double total = 0.0;
    for (auto& v : w) {
        v = g(rng) + 0.05;
        total += v;
    }
    Vec t(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) t[static_cast<Eigen::Index>(i)] = w[i + 1] / total;
    return t;
}

}  // namespace detail

/// Jensen gap of the negentropy against the plain JSD of the two mixtures:
/// finite sums for categorical families (1e-12), quadrature for two-component continuous ones (1e-5).
inline std::vector<VerifyCase> verify_wmix_jsd(std::size_t categorical_cases = 10, std::size_t continuous_cases = 5,
                                               std::uint64_t seed = 0, const OracleConfig& cfg = {}) {
    Rng rng(seed);
    std::vector<VerifyCase> out;
    std::gamma_distribution<double> g(1.0, 1.0);
    for (std::size_t i = 0; i < categorical_cases; ++i) {
        const std::size_t cells = 3 + i % 6;
        const std::size_t d = 1 + i % 3;
        std::vector<Density> comps;
        for (std::size_t j = 0; j <= d; ++j) {
            std::vector<double> p(cells);
            double total = 0.0;
            for (auto& v : p) {
                v = g(rng);
                total += v;
            }
            for (auto& v : p) v /= total;
            comps.push_back(categorical_density(p));
        }
        const WMixtureFamily fam(comps);
        const Vec t1 = detail::random_simplex_interior(d, rng);
        const Vec t2 = detail::random_simplex_interior(d, rng);
        const std::vector<double> p1 = fam.mixture_density(t1).family_as<CategoricalPoint>()->probs();
        const std::vector<double> p2 = fam.mixture_density(t2).family_as<CategoricalPoint>()->probs();
        out.push_back(detail::make_case("wmix-jsd", "categorical " + std::to_string(i) + " (" + std::to_string(cells) + " cells)",
                                        wmix_jsd(fam, t1, t2), categorical_jsd(p1, p2), 1e-12));
    }
    std::uniform_real_distribution<double> um(-3.0, 3.0), us(0.3, 2.0), ut(0.05, 0.95);
    for (std::size_t i = 0; i < continuous_cases; ++i) {
        const WMixtureFamily fam({normal_density(um(rng), us(rng)), normal_density(um(rng), us(rng))});
        const Vec t1 = scalar(ut(rng));
        const Vec t2 = scalar(ut(rng));
        out.push_back(detail::make_case("wmix-jsd", "gaussian components " + std::to_string(i), wmix_jsd(fam, t1, t2),
                                        jsd(fam.mixture_density(t1), fam.mixture_density(t2), cfg), 1e-5));
    }
    return out;
}

}  // namespace mnjs
