#pragma once

// Plain densities used as oracle inputs: normal, uniform and categorical.

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mnjs/oracle.hpp"

namespace mnjs {

inline Density normal_density(double mu, double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(mu)) throw DomainError("normal density needs finite mu and sigma > 0");
    Density d;
    d.log_pdf = [mu, sigma](Point x) {
        const double z = (x[0] - mu) / sigma;
        return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
    };
    d.sampler = [mu, sigma](Rng& rng, std::span<double> out) { out[0] = std::normal_distribution<double>(mu, sigma)(rng); };
    d.features = {{mu, sigma}};
    d.label = "normal(" + std::to_string(mu) + "," + std::to_string(sigma) + ")";
    return d;
}

inline Density uniform_density(double a, double b) {
    if (!(b > a)) throw DomainError("uniform density needs a < b");
    Density d;
    const double lw = -std::log(b - a);
    d.log_pdf = [a, b, lw](Point x) {
        return (x[0] >= a && x[0] <= b) ? lw : -std::numeric_limits<double>::infinity();
    };
    d.sampler = [a, b](Rng& rng, std::span<double> out) { out[0] = std::uniform_real_distribution<double>(a, b)(rng); };
    d.features = {{0.5 * (a + b), 0.5 * (b - a)}};
    d.label = "uniform(" + std::to_string(a) + "," + std::to_string(b) + ")";
    return d;
}

class CategoricalPoint;
inline Density categorical_density(std::vector<double> probs);

/// A categorical distribution over {0, ..., n-1}. Categoricals form a mixture family, so they are closed
/// under arithmetic mixing and have closed-form KL.
class CategoricalPoint : public FamilyPoint {
public:
    explicit CategoricalPoint(std::vector<double> probs) : probs_(std::move(probs)) {}
    std::string family() const override { return "categorical"; }
    const std::vector<double>& probs() const { return probs_; }

    std::optional<ClosedMixture> mix(const FamilyPoint& other, const WeightedMean& mean, double alpha) const override {
        const auto* q = dynamic_cast<const CategoricalPoint*>(&other);
        if (q == nullptr || q->probs_.size() != probs_.size() || !mean.is_arithmetic()) return std::nullopt;
        std::vector<double> m(probs_.size());
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = (1.0 - alpha) * probs_[i] + alpha * q->probs_[i];
        return ClosedMixture{categorical_density(std::move(m)), 1.0};
    }

    std::optional<double> kl(const FamilyPoint& other) const override {
        const auto* q = dynamic_cast<const CategoricalPoint*>(&other);
        if (q == nullptr || q->probs_.size() != probs_.size()) return std::nullopt;
        double s = 0.0;
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            if (probs_[i] == 0.0) continue;
            if (q->probs_[i] == 0.0) return std::numeric_limits<double>::infinity();
            s += probs_[i] * std::log(probs_[i] / q->probs_[i]);
        }
        return std::max(s, 0.0);
    }

private:
    std::vector<double> probs_;
};

inline Density categorical_density(std::vector<double> probs) {
    if (probs.empty()) throw DomainError("categorical needs at least one cell");
    double total = 0.0;
    for (double v : probs) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("categorical masses must be finite and nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DomainError("categorical masses must sum to 1");
    Density d;
    d.support = Support::finite_alphabet(probs.size());
    auto point = std::make_shared<const CategoricalPoint>(probs);
    d.log_pdf = [point](Point x) {
        const auto& p = point->probs();
        const double i = std::round(x[0]);
        if (i < 0.0 || i >= static_cast<double>(p.size())) return -std::numeric_limits<double>::infinity();
        const double v = p[static_cast<std::size_t>(i)];
        return v > 0.0 ? std::log(v) : -std::numeric_limits<double>::infinity();
    };
    d.sampler = [point](Rng& rng, std::span<double> out) {
        const auto& p = point->probs();
        out[0] = static_cast<double>(std::discrete_distribution<std::size_t>(p.begin(), p.end())(rng));
    };
    d.family = point;
    d.label = "categorical";
    return d;
}

/// Plain finite-sum JSD between two categoricals with the 0 log 0 = 0 convention.
inline double categorical_jsd(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw DomainError("categorical_jsd: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = p[i] + q[i];
        if (p[i] > 0.0) s += p[i] * std::log(2.0 * p[i] / m);
        if (q[i] > 0.0) s += q[i] * std::log(2.0 * q[i] / m);
    }
    return 0.5 * s;
}

}  // namespace mnjs
