#pragma once

// Mixture families with prescribed components m_theta = (1 - sum theta_i) p_0 + sum theta_i p_i.
// The negentropy F(theta) = -h(m_theta) is a Bregman generator: KL between members is B_F and
// the JSD is the Jensen gap of F.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mnjs/densities.hpp"
#include "mnjs/divergences.hpp"
#include "mnjs/expfam.hpp"
#include "mnjs/oracle.hpp"

namespace mnjs {

class WMixtureFamily {
public:
    static constexpr double kDomainMargin = 1e-9;
    static constexpr double kFdStep = 1e-5;

    /// `cfg` drives the negentropy quadrature; a tight abs_tol keeps the finite-difference gradient clean.
    explicit WMixtureFamily(std::vector<Density> components, OracleConfig cfg = tight_config())
        : components_(std::move(components)), cfg_(cfg), cache_(std::make_shared<Cache>()) {
        if (components_.size() < 2) throw DomainError("a w-mixture family needs at least two components");
        for (const auto& c : components_) {
            if (c.dim != components_[0].dim) throw DomainError("w-mixture components have different dimensions");
            detail::joint_support(components_[0], c);
        }
        categorical_ = true;
        for (const auto& c : components_) categorical_ = categorical_ && c.family_as<CategoricalPoint>() != nullptr;
    }

    static OracleConfig tight_config() {
        OracleConfig c;
        c.abs_tol = 1e-13;
        return c;
    }

    std::size_t dim() const { return components_.size() - 1; }
    const std::vector<Density>& components() const { return components_; }
    const OracleConfig& config() const { return cfg_; }
    bool categorical() const { return categorical_; }

    /// Weight vector (1 - sum theta, theta_1, ..., theta_D); theta must lie in the closed simplex.
    std::vector<double> weights(const Vec& theta) const {
        if (static_cast<std::size_t>(theta.size()) != dim()) throw DomainError("w-mixture parameter has the wrong length");
        double s = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            if (!(theta[i] >= 0.0)) throw DomainError("w-mixture weights must be nonnegative");
            s += theta[i];
        }
        if (s > 1.0 + 1e-15) throw DomainError("w-mixture weights must sum to at most 1");
        std::vector<double> w(components_.size());
        w[0] = std::max(0.0, 1.0 - s);
        for (Eigen::Index i = 0; i < theta.size(); ++i) w[static_cast<std::size_t>(i) + 1] = theta[i];
        return w;
    }

    /// Open-domain check used by the Bregman operations: every theta_i >= 1e-9 and sum <= 1 - 1e-9.
    void require_domain(const Vec& theta) const {
        if (static_cast<std::size_t>(theta.size()) != dim()) throw DomainError("w-mixture parameter has the wrong length");
        double s = 0.0;
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            if (!(theta[i] >= kDomainMargin)) throw DomainError("w-mixture parameter is too close to the simplex boundary");
            s += theta[i];
        }
        if (s > 1.0 - kDomainMargin) throw DomainError("w-mixture parameter is too close to the simplex boundary");
    }

    bool in_domain(const Vec& theta) const {
        try {
            require_domain(theta);
            return true;
        } catch (const DomainError&) {
            return false;
        }
    }

    Density mixture_density(const Vec& theta) const {
        const std::vector<double> w = weights(theta);
        if (categorical_) {
            std::vector<double> cells(components_[0].support.size, 0.0);
            for (std::size_t j = 0; j < components_.size(); ++j) {
                const auto& pj = components_[j].family_as<CategoricalPoint>()->probs();
                for (std::size_t c = 0; c < cells.size(); ++c) cells[c] += w[j] * pj[c];
            }
            return categorical_density(std::move(cells));
        }
        Density d;
        d.dim = components_[0].dim;
        d.support = components_[0].support;
        for (const auto& c : components_) d.support = detail::joint_support(d, c);
        const auto comps = components_;
        d.log_pdf = [comps, w](Point x) {
            double acc = -kInf;
            for (std::size_t j = 0; j < comps.size(); ++j) {
                if (w[j] == 0.0) continue;
                acc = detail::log_sum_exp(acc, std::log(w[j]) + comps[j].log_eval(x));
            }
            return acc;
        };
        bool samplers = true;
        for (const auto& c : comps) samplers = samplers && static_cast<bool>(c.sampler);
        if (samplers) {
            d.sampler = [comps, w](Rng& rng, std::span<double> out) {
                const std::size_t j = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
                comps[j].sampler(rng, out);
            };
        }
        for (std::size_t j = 0; j < comps.size(); ++j) {
            if (w[j] > 0.0) d.features.insert(d.features.end(), comps[j].features.begin(), comps[j].features.end());
        }
        d.label = "w-mixture";
        return d;
    }

    /// F(theta) = -h(m_theta), the integral of m log m. Cached per parameter.
    double negentropy(const Vec& theta) const {
        std::vector<double> key(theta.data(), theta.data() + theta.size());
        {
            std::shared_lock lock(cache_->mutex);
            if (auto it = cache_->values.find(key); it != cache_->values.end()) return it->second;
        }
        const double v = negentropy_uncached(theta);
        std::unique_lock lock(cache_->mutex);
        cache_->values.emplace(std::move(key), v);
        return v;
    }

    /// Central differences of F with one Richardson step (one-sided near the simplex boundary).
    Vec gradient(const Vec& theta) const {
        const auto n = theta.size();
        Vec g(n);
        const double h = kFdStep;
        const double total = theta.sum();
        for (Eigen::Index i = 0; i < n; ++i) {
            auto shifted = [&](double t) {
                Vec x = theta;
                x[i] += t;
                return negentropy(x);
            };
            const bool down = theta[i] - h >= 0.0;
            const bool up = total + h <= 1.0;
            if (down && up) {
                const double d1 = (shifted(h) - shifted(-h)) / (2.0 * h);
                const double d2 = (shifted(h / 2) - shifted(-h / 2)) / h;
                g[i] = (4.0 * d2 - d1) / 3.0;
            } else {
                const double s = up ? 1.0 : -1.0;
                const double f0 = negentropy(theta);
                const double d1 = (shifted(s * h) - f0) / (s * h);
                const double d2 = (shifted(s * h / 2) - f0) / (s * h / 2);
                g[i] = 2.0 * d2 - d1;
            }
        }
        return g;
    }

    /// grad F_i = integral of (p_i - p_0) log m_theta, used as an independent check of gradient().
    Vec gradient_analytic(const Vec& theta) const {
        const Density m = mixture_density(theta);
        Vec g(theta.size());
        for (Eigen::Index i = 0; i < theta.size(); ++i) {
            const Density& pi = components_[static_cast<std::size_t>(i) + 1];
            const Density& p0 = components_[0];
            auto f = [&](Point x) {
                const double lm = m.log_eval(x);
                if (lm == -kInf) return 0.0;
                return (pi.eval(x) - p0.eval(x)) * lm;
            };
            std::vector<Feature> features = m.features;
            g[i] = integrate(f, m.support, cfg_, features, m.dim >= 2 ? &m : nullptr).value;
        }
        return g;
    }

    /// Sampled independence check: the Gram matrix of component inner products must have min eigenvalue > 1e-10.
    bool looks_independent() const {
        const std::size_t k = components_.size();
        Mat gram(k, k);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i; j < k; ++j) {
                auto h = [](double la, double lb) {
                    if (la == -kInf || lb == -kInf) return 0.0;
                    return std::exp(la + lb);
                };
                const double v = detail::pair_integral(components_[i], components_[j], h, cfg_).value;
                gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        }
        const double min_eig = Eigen::SelfAdjointEigenSolver<Mat>(gram).eigenvalues().minCoeff();
        if (!(min_eig > 1e-10)) {
            warn("w-mixture components look linearly dependent (Gram min eigenvalue " + std::to_string(min_eig) + ")");
            return false;
        }
        return true;
    }

private:
    struct Cache {
        std::shared_mutex mutex;
        std::map<std::vector<double>, double> values;
    };

    double negentropy_uncached(const Vec& theta) const {
        const Density m = mixture_density(theta);
        if (categorical_) {
            const auto& cells = m.family_as<CategoricalPoint>()->probs();
            double s = 0.0;
            for (double c : cells) {
                if (c > 0.0) s += c * std::log(c);
            }
            return s;
        }
        auto f = [&m](Point x) {
            const double lm = m.log_eval(x);
            return lm == -kInf ? 0.0 : lm;
        };
        return expectation(m, f, cfg_).value;
    }

    std::vector<Density> components_;
    OracleConfig cfg_;
    bool categorical_ = false;
    std::shared_ptr<Cache> cache_;
};

inline Density mixture_density(const WMixtureFamily& fam, const Vec& theta) { return fam.mixture_density(theta); }

inline double negentropy(const WMixtureFamily& fam, const Vec& theta) {
    fam.weights(theta);
    return fam.negentropy(theta);
}

/// KL(m_theta1 : m_theta2) = B_F(theta1 : theta2) with a finite-difference gradient.
inline double wmix_kl(const WMixtureFamily& fam, const Vec& theta1, const Vec& theta2) {
    fam.require_domain(theta1);
    fam.require_domain(theta2);
    if (theta1 == theta2) return 0.0;
    const double v = fam.negentropy(theta1) - fam.negentropy(theta2) - (theta1 - theta2).dot(fam.gradient(theta2));
    return std::max(0.0, v);
}

/// JSD(m_theta1, m_theta2) = (F(theta1) + F(theta2))/2 - F((theta1 + theta2)/2).
inline double wmix_jsd(const WMixtureFamily& fam, const Vec& theta1, const Vec& theta2) {
    fam.require_domain(theta1);
    fam.require_domain(theta2);
    if (theta1 == theta2) return 0.0;
    const Vec mid = 0.5 * (theta1 + theta2);
    return std::max(0.0, 0.5 * (fam.negentropy(theta1) + fam.negentropy(theta2)) - fam.negentropy(mid));
}

/// Right-sided Bregman centroid: the weighted arithmetic mean of the parameters, whatever F is.
inline Vec bregman_centroid_right(const WMixtureFamily& fam, const std::vector<Vec>& thetas, const std::vector<double>& weights) {
    if (thetas.empty() || thetas.size() != weights.size()) throw DomainError("bregman_centroid_right: need one weight per point");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("bregman_centroid_right: weights must have positive sum");
    Vec c = Vec::Zero(static_cast<Eigen::Index>(fam.dim()));
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        fam.require_domain(thetas[i]);
        if (!(weights[i] >= 0.0)) throw DomainError("bregman_centroid_right: weights must be nonnegative");
        c += (weights[i] / total) * thetas[i];
    }
    return c;
}

}  // namespace mnjs
