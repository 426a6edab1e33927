#pragma once

// Statistical distances between densities and the symmetrization combinators built on M-mixtures.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "mnjs/means.hpp"
#include "mnjs/oracle.hpp"

namespace mnjs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class DivergentNormalizer : public OracleError {
public:
    using OracleError::OracleError;
};

class DominanceViolation : public DomainError {
public:
    using DomainError::DomainError;
};

class DegenerateInput : public DomainError {
public:
    using DomainError::DomainError;
};

namespace detail {

inline Support joint_support(const Density& p, const Density& q) {
    if (p.dim != q.dim) throw DomainError("densities have different dimensions");
    if (p.support.kind == Support::Kind::FiniteAlphabet || q.support.kind == Support::Kind::FiniteAlphabet) {
        if (!(p.support == q.support)) throw DomainError("finite-alphabet densities need the same alphabet");
        return p.support;
    }
    if (p.support.kind == Support::Kind::PositiveHalfLine && q.support.kind == Support::Kind::PositiveHalfLine) {
        return p.support;
    }
    return Support::real_line(p.dim);
}

/// (1 - w) p + w q as a sampling proposal; only the sampler and log density are set.
inline Density arithmetic_proposal(const Density& p, const Density& q, double w) {
    if (!p.sampler || !q.sampler) throw OracleError("Monte Carlo proposal needs samplers on both densities");
    Density d;
    d.dim = p.dim;
    d.support = joint_support(p, q);
    d.log_pdf = [p, q, w](Point x) { return WeightedMean::arithmetic().log_evaluate(p.log_eval(x), q.log_eval(x), w); };
    d.sampler = [p, q, w](Rng& rng, std::span<double> out) {
        if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < w) {
            q.sampler(rng, out);
        } else {
            p.sampler(rng, out);
        }
    };
    return d;
}

/// Integral of h(log p(x), log q(x)). Monte Carlo in dimension >= 2 draws from `proposal` (default p).
template <class H>
IntegralEstimate pair_integral(const Density& p, const Density& q, const H& h, const OracleConfig& cfg,
                               const Density* proposal = nullptr) {
    const Support s = joint_support(p, q);
    Integrand f = [&](Point x) { return h(p.log_eval(x), q.log_eval(x)); };
    if (p.dim >= 2) return integrate(f, s, cfg, {}, proposal != nullptr ? proposal : &p);
    const auto features = merged_features(p, q);
    return integrate(f, s, cfg, features);
}

inline double clamp_nonneg(double v) { return v < 0.0 ? 0.0 : v; }

/// N_beta(a, b) for nonnegative a, b. Means that vanish when an argument vanishes
/// (geometric, harmonic, power with p < 0) return 0 there.
inline double mean_of_nonneg(const WeightedMean& n, double a, double b, double beta) {
    check_alpha(beta);
    a = clamp_nonneg(a);
    b = clamp_nonneg(b);
    if (beta == 0.0) return a;
    if (beta == 1.0) return b;
    if (std::isinf(a) || std::isinf(b)) {
        if (n.is_arithmetic()) return kInf;
        if (n.is_harmonic() && !(std::isinf(a) && std::isinf(b))) return std::isinf(a) ? b / beta : a / (1.0 - beta);
        return kInf;
    }
    if (a > 0.0 && b > 0.0) return n.evaluate(a, b, beta);
    if (n.is_arithmetic()) return (1.0 - beta) * a + beta * b;
    if (const auto* pm = std::get_if<PowerMean>(&n.kind()); pm != nullptr && pm->p > 0.0) {
        return std::pow((1.0 - beta) * std::pow(a, pm->p) + beta * std::pow(b, pm->p), 1.0 / pm->p);
    }
    if (std::holds_alternative<QuasiArithmeticMean>(n.kind())) {
        constexpr double floor = 1e-300;
        return n.evaluate(std::max(a, floor), std::max(b, floor), beta);
    }
    return 0.0;
}

}  // namespace detail

// ---------------------------------------------------------------------------------------------
// Kullback-Leibler and entropies

struct KlEstimate {
    double value = 0.0;  // +inf when q vanishes on a set where p has mass
    double abs_error = 0.0;
    bool infinite = false;
    /// Integral with log q floored at log(density_floor) where q vanishes.
    IntegralEstimate partial;
};

inline KlEstimate kl_estimate(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    std::atomic<bool> hit{false};
    const double lfloor = std::log(cfg.density_floor);
    auto h = [&](double lp, double lq) {
        if (lp == -kInf) return 0.0;
        const double pv = std::exp(lp);
        if (pv == 0.0) return 0.0;
        if (lq == -kInf) {
            if (lp > lfloor) hit.store(true, std::memory_order_relaxed);
            lq = lfloor;
        }
        return pv * (lp - lq);
    };
    KlEstimate out;
    out.partial = detail::pair_integral(p, q, h, cfg);
    out.abs_error = out.partial.abs_error + p.log_norm_error + q.log_norm_error;
    if (hit.load()) {
        out.infinite = true;
        out.value = kInf;
    } else {
        out.value = out.partial.value;
    }
    return out;
}

/// KL(p:q) by the oracle; +inf when the supports do not match.
inline double kl(const Density& p, const Density& q, const OracleConfig& cfg = {}) { return kl_estimate(p, q, cfg).value; }

/// Closed-form KL when both densities carry parameters of a family that provides one.
inline std::optional<double> kl_closed(const Density& p, const Density& q) {
    if (!p.family || !q.family) return std::nullopt;
    return p.family->kl(*q.family);
}

inline double kl_auto(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    if (auto v = kl_closed(p, q)) return *v;
    return kl(p, q, cfg);
}

inline double cross_entropy(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    auto h = [](double lp, double lq) {
        if (lp == -kInf) return 0.0;
        const double pv = std::exp(lp);
        if (pv == 0.0) return 0.0;
        if (lq == -kInf) return kInf;
        return -pv * lq;
    };
    try {
        return detail::pair_integral(p, q, h, cfg).value;
    } catch (const NonFiniteIntegrand&) {
        return kInf;
    }
}

inline double entropy(const Density& p, const OracleConfig& cfg = {}) {
    auto f = [&p](Point x) {
        const double lp = p.log_eval(x);
        return lp == -kInf ? 0.0 : -lp;
    };
    return expectation(p, f, cfg).value;
}

// ---------------------------------------------------------------------------------------------
// f-divergences

/// Convex generator f on (0, inf) with f(1) = 0. I_f(p:q) = integral of p f(q/p).
struct FGenerator {
    std::function<double(double)> f;
    std::function<double(double)> f_prime;  // optional
    std::string name = "f";
    /// lim f(u)/u as u -> inf, used where p vanishes; estimated when unset.
    std::optional<double> slope_inf;

    FGenerator() = default;
    FGenerator(std::function<double(double)> fn, std::string label, std::function<double(double)> fp = {})
        : f(std::move(fn)), f_prime(std::move(fp)), name(std::move(label)) {
        validate();
    }

    double operator()(double u) const { return f(u); }

    void validate() const {
        if (!f) throw DomainError("f-generator has no function");
        const double f1 = f(1.0);
        if (!(std::abs(f1) <= 1e-12)) throw DomainError("f-generator must satisfy f(1) = 0, got " + std::to_string(f1));
    }

    double slope_at_infinity() const {
        if (slope_inf) return *slope_inf;
        const double s1 = f(1e12) / 1e12;
        const double s2 = f(1e15) / 1e15;
        if (!std::isfinite(s2) || s2 - s1 > 1e-3 * std::max(1.0, std::abs(s1))) return kInf;
        return s2;
    }

    /// Midpoint convexity on a log-spaced grid of (0, inf). Returns false (after a warning) on failure.
    bool spot_check_convexity() const {
        std::vector<double> grid;
        for (int i = -12; i <= 12; ++i) grid.push_back(std::pow(10.0, i / 4.0));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            for (std::size_t j = i + 1; j < grid.size(); ++j) {
                const double a = grid[i], b = grid[j];
                const double lhs = f(0.5 * (a + b));
                const double rhs = 0.5 * (f(a) + f(b));
                if (lhs > rhs + 1e-12 * std::max(1.0, std::abs(rhs))) {
                    warn("generator '" + name + "' fails the midpoint convexity check at u=" + std::to_string(a) +
                         ", v=" + std::to_string(b));
                    return false;
                }
            }
        }
        return true;
    }

    static FGenerator kl() {
        return {[](double u) { return -std::log(u); }, "kl", [](double u) { return -1.0 / u; }};
    }
    static FGenerator reverse_kl() {
        return {[](double u) { return u == 0.0 ? 0.0 : u * std::log(u); }, "reverse-kl",
                [](double u) { return std::log(u) + 1.0; }};
    }
    static FGenerator jeffreys() {
        return {[](double u) { return (u - 1.0) * std::log(u); }, "jeffreys",
                [](double u) { return std::log(u) + 1.0 - 1.0 / u; }};
    }
    static FGenerator jensen_shannon() {
        FGenerator g{[](double u) {
                         const double a = u == 0.0 ? 0.0 : u * std::log(u);
                         return 0.5 * (a - (u + 1.0) * std::log((1.0 + u) / 2.0));
                     },
                     "js"};
        g.slope_inf = 0.5 * std::log(2.0);
        return g;
    }
    static FGenerator squared_hellinger() {
        FGenerator g{[](double u) { return 0.5 * (std::sqrt(u) - 1.0) * (std::sqrt(u) - 1.0); }, "hellinger2"};
        g.slope_inf = 0.5;
        return g;
    }
};

/// f_conj(u) = u f(1/u); I_{f_conj}(p:q) = I_f(q:p).
inline FGenerator conjugate_generator(const FGenerator& g) {
    auto f = g.f;
    FGenerator out{[f](double u) { return u == 0.0 ? 0.0 : u * f(1.0 / u); }, g.name + "-conj"};
    if (g.f_prime) {
        auto fp = g.f_prime;
        out.f_prime = [f, fp](double u) { return f(1.0 / u) - fp(1.0 / u) / u; };
    }
    return out;
}

/// Generator of the JS-symmetrization: (1 - a) f(a u + 1 - a) + a u f(a + (1 - a)/u).
inline FGenerator js_skew_generator(const FGenerator& g, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("js_skew_generator needs alpha in (0, 1)");
    auto f = g.f;
    FGenerator out{[f, alpha](double u) {
                       const double a = (1.0 - alpha) * f(alpha * u + 1.0 - alpha);
                       if (u == 0.0) return a;
                       return a + alpha * u * f(alpha + (1.0 - alpha) / u);
                   },
                   g.name + "-js"};
    const double s = g.slope_at_infinity();
    if (std::isfinite(s)) out.slope_inf = (1.0 - alpha) * alpha * s + alpha * f(alpha);
    return out;
}

/// Generator of the skew J-symmetrization: (1 - a) f(u) + a f_conj(u).
inline FGenerator j_skew_generator(const FGenerator& g, double alpha) {
    detail::check_alpha(alpha);
    auto f = g.f;
    return {[f, alpha](double u) { return (1.0 - alpha) * f(u) + (u == 0.0 ? 0.0 : alpha * u * f(1.0 / u)); },
            g.name + "-j"};
}

inline double f_divergence(const FGenerator& g, const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    g.validate();
    g.spot_check_convexity();
    const double slope = g.slope_at_infinity();
    std::atomic<bool> infinite{false};
    auto h = [&](double lp, double lq) {
        const double pv = lp == -kInf ? 0.0 : std::exp(lp);
        const double qv = lq == -kInf ? 0.0 : std::exp(lq);
        if (pv == 0.0) {
            if (qv == 0.0) return 0.0;
            if (std::isinf(slope)) {
                infinite.store(true, std::memory_order_relaxed);
                return 0.0;
            }
            return qv * slope;
        }
        const double u = qv == 0.0 ? 0.0 : std::exp(lq - lp);
        if (std::isinf(u)) {
            if (std::isinf(slope)) {
                infinite.store(true, std::memory_order_relaxed);
                return 0.0;
            }
            return qv * slope;
        }
        const double v = g.f(u);
        if (std::isinf(v)) {
            infinite.store(true, std::memory_order_relaxed);
            return 0.0;
        }
        return pv * v;
    };
    const double v = detail::pair_integral(p, q, h, cfg).value;
    return infinite.load() ? kInf : v;
}

// ---------------------------------------------------------------------------------------------
// Functionals

struct DivergenceFunctional {
    std::string name;
    std::function<double(const Density&, const Density&)> apply;
    bool closed_form = false;

    double operator()(const Density& p, const Density& q) const { return apply(p, q); }
};

enum class KlBackend { Oracle, ClosedForm, Auto };

inline DivergenceFunctional kl_functional(const OracleConfig& cfg = {}, KlBackend backend = KlBackend::Auto) {
    switch (backend) {
        case KlBackend::Oracle:
            return {"kl", [cfg](const Density& p, const Density& q) { return kl(p, q, cfg); }, false};
        case KlBackend::ClosedForm:
            return {"kl",
                    [](const Density& p, const Density& q) {
                        auto v = kl_closed(p, q);
                        if (!v) throw DomainError("no closed-form KL between '" + p.label + "' and '" + q.label + "'");
                        return *v;
                    },
                    true};
        case KlBackend::Auto:
            break;
    }
    return {"kl", [cfg](const Density& p, const Density& q) { return kl_auto(p, q, cfg); }, false};
}

/// D*(p:q) = D(q:p).
inline DivergenceFunctional reverse(const DivergenceFunctional& d) {
    auto apply = d.apply;
    return {d.name + "*", [apply](const Density& p, const Density& q) { return apply(q, p); }, d.closed_form};
}

inline DivergenceFunctional f_functional(const FGenerator& g, const OracleConfig& cfg = {}) {
    return {"f:" + g.name, [g, cfg](const Density& p, const Density& q) { return f_divergence(g, p, q, cfg); }, false};
}

// ---------------------------------------------------------------------------------------------
// M-mixtures

/// Normalized (pq)^M_alpha = M_alpha(p, q) / Z.
struct MMixture {
    Density base_p;
    Density base_q;
    WeightedMean mean;
    double alpha = 0.5;
    IntegralEstimate Z;
    Density density;
    bool closed_form = false;

    double log_eval(Point x) const { return density.log_eval(x); }
    double eval(Point x) const { return density.eval(x); }
    double log_eval(double x) const { return density.log_eval(x); }
    double eval(double x) const { return density.eval(x); }
};

inline MMixture m_mixture(const Density& p, const Density& q, const WeightedMean& mean, double alpha,
                          const OracleConfig& cfg = {}) {
    detail::check_alpha(alpha);
    const Support support = detail::joint_support(p, q);
    MMixture m{p, q, mean, alpha, {1.0, 0.0, 0}, {}, true};
    if (alpha == 0.0) {
        m.density = p;
        return m;
    }
    if (alpha == 1.0) {
        m.density = q;
        return m;
    }
    if (p.family && q.family) {
        if (auto cm = p.family->mix(*q.family, mean, alpha)) {
            m.density = std::move(cm->density);
            m.Z = {cm->normalizer, 0.0, 0};
            return m;
        }
    }
    Density d;
    d.dim = p.dim;
    d.support = support;
    d.features = merged_features(p, q);
    d.label = mean.name() + "-mixture(" + p.label + "," + q.label + ")";
    if (mean.is_arithmetic()) {
        d.log_pdf = [p, q, alpha](Point x) {
            return WeightedMean::arithmetic().log_evaluate(p.log_eval(x), q.log_eval(x), alpha);
        };
        if (p.sampler && q.sampler) d.sampler = detail::arithmetic_proposal(p, q, alpha).sampler;
        d.log_norm_error = p.log_norm_error + q.log_norm_error;
        m.density = std::move(d);
        return m;
    }
    auto log_unnormalized = [p, q, mean, alpha](Point x) { return mean.log_evaluate(p.log_eval(x), q.log_eval(x), alpha); };
    auto integrand = [&log_unnormalized](Point x) {
        const double l = log_unnormalized(x);
        return l == -kInf ? 0.0 : std::exp(l);
    };
    IntegralEstimate z;
    try {
        if (d.dim >= 2) {
            const Density proposal = detail::arithmetic_proposal(p, q, alpha);
            z = integrate(integrand, support, cfg, {}, &proposal);
        } else {
            z = integrate(integrand, support, cfg, d.features);
        }
    } catch (const BudgetExceeded& e) {
        throw DivergentNormalizer("normalizer of the " + mean.name() + " mixture did not converge (partial " +
                                  std::to_string(e.partial().value) + ")");
    } catch (const NonFiniteIntegrand&) {
        throw DivergentNormalizer("normalizer of the " + mean.name() + " mixture hit a non-finite integrand");
    }
    if (!(z.value > 0.0) || !std::isfinite(z.value)) {
        throw DivergentNormalizer("normalizer of the " + mean.name() + " mixture is not a positive finite number");
    }
    const double log_z = std::log(z.value);
    d.log_pdf = [log_unnormalized, log_z](Point x) { return log_unnormalized(x) - log_z; };
    d.log_norm_error = z.abs_error / z.value + p.log_norm_error + q.log_norm_error;
    m.Z = z;
    m.density = std::move(d);
    m.closed_form = false;
    return m;
}

// ---------------------------------------------------------------------------------------------
// Symmetrizations

/// (1 - a) D(p : (pq)^M_a) + a D(q : (pq)^M_a). Returns 0 at a in {0, 1}, where the mixture collapses onto one argument.
inline double js_symmetrization(const DivergenceFunctional& d, const WeightedMean& mean, double alpha, const Density& p,
                                const Density& q, const OracleConfig& cfg = {}) {
    detail::check_alpha(alpha);
    if (alpha == 0.0 || alpha == 1.0) return 0.0;
    const MMixture m = m_mixture(p, q, mean, alpha, cfg);
    return (1.0 - alpha) * d(p, m.density) + alpha * d(q, m.density);
}

/// M-JSD: js_symmetrization with D = KL.
inline double m_jsd(const WeightedMean& mean, double alpha, const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    return js_symmetrization(kl_functional(cfg), mean, alpha, p, q, cfg);
}

/// Classical (arithmetic, alpha = 1/2) Jensen-Shannon divergence.
inline double jsd(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    return m_jsd(WeightedMean::arithmetic(), 0.5, p, q, cfg);
}

/// N_beta(D(p:q), D(q:p)). Harmonic N with a zero argument gives 0.
inline double n_jeffreys(const DivergenceFunctional& d, const WeightedMean& n, double beta, const Density& p,
                         const Density& q) {
    detail::check_alpha(beta);
    return detail::mean_of_nonneg(n, d(p, q), d(q, p), beta);
}

/// N_beta(D(p : (pq)^M_a), D(q : (pq)^M_a)).
inline double mn_js(const DivergenceFunctional& d, const WeightedMean& m, double alpha, const WeightedMean& n, double beta,
                    const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("mn_js needs alpha in (0, 1)");
    detail::check_alpha(beta);
    const MMixture mix = m_mixture(p, q, m, alpha, cfg);
    return detail::mean_of_nonneg(n, d(p, mix.density), d(q, mix.density), beta);
}

/// (1 - beta) D(p:q) + beta D(q:p).
inline double j_symmetrization(const DivergenceFunctional& d, double beta, const Density& p, const Density& q) {
    return n_jeffreys(d, WeightedMean::arithmetic(), beta, p, q);
}

inline double jeffreys(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    return kl_auto(p, q, cfg) + kl_auto(q, p, cfg);
}

/// Resistor average 2 KL KL* / J, the harmonic symmetrization of the two KL orientations.
inline double resistor(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    const double a = detail::clamp_nonneg(kl_auto(p, q, cfg));
    const double b = detail::clamp_nonneg(kl_auto(q, p, cfg));
    if (a == 0.0 || b == 0.0) return 0.0;
    if (std::isinf(a) && std::isinf(b)) return kInf;
    if (std::isinf(a)) return 2.0 * b;
    if (std::isinf(b)) return 2.0 * a;
    return 2.0 * a * b / (a + b);
}

/// K_a(p:q) = KL(p : (1 - a) p + a q).
inline double k_divergence(const Density& p, const Density& q, double alpha, const OracleConfig& cfg = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("k_divergence needs alpha in (0, 1]");
    const MMixture m = m_mixture(p, q, WeightedMean::arithmetic(), alpha, cfg);
    return kl_auto(p, m.density, cfg);
}

/// D(p : (pq)^M_a).
inline double generalized_k_divergence(const DivergenceFunctional& d, const WeightedMean& mean, double alpha,
                                       const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    return d(p, m_mixture(p, q, mean, alpha, cfg).density);
}

// ---------------------------------------------------------------------------------------------
// Bhattacharyya, Hellinger, alpha-divergences

/// Bhattacharyya coefficient: integral of p^(1-a) q^a (p^a q^(1-a) when reversed).
inline IntegralEstimate bhattacharyya_coefficient(const Density& p, const Density& q, double alpha,
                                                  const OracleConfig& cfg = {}, bool reversed = false) {
    const double a = reversed ? 1.0 - alpha : alpha;
    auto h = [a](double lp, double lq) {
        if (lp == -kInf || lq == -kInf) return 0.0;
        return std::exp((1.0 - a) * lp + a * lq);
    };
    if (p.dim >= 2) {
        const Density proposal = detail::arithmetic_proposal(p, q, 0.5);
        return detail::pair_integral(p, q, h, cfg, &proposal);
    }
    return detail::pair_integral(p, q, h, cfg);
}

/// B_a(p:q) = -log integral p^(1-a) q^a.
inline double bhattacharyya(const Density& p, const Density& q, double alpha, const OracleConfig& cfg = {},
                            bool reversed = false) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("bhattacharyya needs alpha in (0, 1)");
    const double c = bhattacharyya_coefficient(p, q, alpha, cfg, reversed).value;
    if (!(c > 0.0)) return kInf;
    return std::max(0.0, -std::log(c));
}

/// sqrt of the integral of A(p, q) - G(p, q).
inline double hellinger(const Density& p, const Density& q, const OracleConfig& cfg = {}) {
    auto h = [](double lp, double lq) {
        const double a = lp == -kInf ? 0.0 : std::exp(0.5 * lp);
        const double b = lq == -kInf ? 0.0 : std::exp(0.5 * lq);
        return 0.5 * (a - b) * (a - b);
    };
    const IntegralEstimate e = p.dim >= 2 ? [&] {
        const Density proposal = detail::arithmetic_proposal(p, q, 0.5);
        return detail::pair_integral(p, q, h, cfg, &proposal);
    }()
                                          : detail::pair_integral(p, q, h, cfg);
    return std::sqrt(std::max(0.0, e.value));
}

/// I_a(p:q) = integral of a p + (1 - a) q - p^a q^(1-a).
inline double alpha_divergence(const Density& p, const Density& q, double alpha, const OracleConfig& cfg = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha_divergence needs alpha in (0, 1)");
    auto h = [alpha](double lq, double lp) {
        // A_a(q, p) - G_a(q, p) evaluated in log space to keep the difference accurate.
        const double la = WeightedMean::arithmetic().log_evaluate(lq, lp, alpha);
        if (la == -kInf) return 0.0;
        if (lp == -kInf || lq == -kInf) return std::exp(la);
        const double lg = (1.0 - alpha) * lq + alpha * lp;
        return -std::exp(la) * std::expm1(lg - la);
    };
    if (p.dim >= 2) {
        const Density proposal = detail::arithmetic_proposal(p, q, 0.5);
        return std::max(0.0, detail::pair_integral(q, p, h, cfg, &proposal).value);
    }
    return std::max(0.0, detail::pair_integral(q, p, h, cfg).value);
}

// ---------------------------------------------------------------------------------------------
// Chernoff information

struct ChernoffConfig {
    OracleConfig oracle;
    double eps = 1e-6;
    double eq_tol = 1e-6;
    int grid = 20;
};

struct ChernoffResult {
    double alpha_star = 0.5;
    double value = 0.0;
    /// |KL(p_a* : p) - KL(p_a* : q)| at the returned alpha, with p_a* the normalized geometric mixture.
    double kl_gap = 0.0;
};

namespace detail {

// B'(a) = E_{p_a}[log p - log q] = KL(p_a : q) - KL(p_a : p).
inline double bhattacharyya_slope(const Density& p, const Density& q, double alpha, const OracleConfig& cfg) {
    auto num = [alpha](double lp, double lq) {
        if (lp == -kInf || lq == -kInf) return 0.0;
        return std::exp((1.0 - alpha) * lp + alpha * lq) * (lp - lq);
    };
    const double z = bhattacharyya_coefficient(p, q, alpha, cfg).value;
    if (p.dim >= 2) {
        const Density proposal = arithmetic_proposal(p, q, 0.5);
        return pair_integral(p, q, num, cfg, &proposal).value / z;
    }
    return pair_integral(p, q, num, cfg).value / z;
}

}  // namespace detail

/// Maximizes alpha -> B_alpha(p:q) on [eps, 1 - eps]: coarse grid, Brent on the best bracket, then a root
/// refinement of B'(alpha) = 0 so the two KL divergences from the geometric mixture agree.
inline ChernoffResult chernoff_information(const Density& p, const Density& q, const ChernoffConfig& cc = {}) {
    const OracleConfig& cfg = cc.oracle;
    auto b = [&](double a) { return bhattacharyya(p, q, a, cfg); };
    const int n = std::max(cc.grid, 4);
    std::vector<double> as, bs;
    for (int i = 0; i <= n; ++i) {
        const double a = std::clamp(static_cast<double>(i) / n, cc.eps, 1.0 - cc.eps);
        as.push_back(a);
        bs.push_back(b(a));
    }
    const auto best = std::max_element(bs.begin(), bs.end());
    if (*best < 1e-14) throw DegenerateInput("Bhattacharyya distance vanishes on the whole bracket (p and q coincide)");
    for (int i = 1; i < n; ++i) {
        const double second = bs[i - 1] - 2.0 * bs[i] + bs[i + 1];
        if (second > 1e-9 * std::max(1.0, *best)) {
            warn("Bhattacharyya curve is not concave near alpha=" + std::to_string(as[i]) + " (oracle noise?)");
            break;
        }
    }
    const auto k = static_cast<std::size_t>(best - bs.begin());
    double lo = as[k == 0 ? 0 : k - 1];
    double hi = as[std::min<std::size_t>(k + 1, as.size() - 1)];
    const auto brent = boost::math::tools::brent_find_minima([&](double a) { return -b(a); }, lo, hi, 40);
    double alpha = brent.first;

    auto slope = [&](double a) { return detail::bhattacharyya_slope(p, q, a, cfg); };
    const double s_lo = slope(lo), s_hi = slope(hi);
    if (s_lo > 0.0 && s_hi < 0.0) {
        boost::uintmax_t iters = 100;
        const auto r = boost::math::tools::toms748_solve(
            slope, lo, hi, s_lo, s_hi, boost::math::tools::eps_tolerance<double>(45), iters);
        alpha = 0.5 * (r.first + r.second);
    }
    ChernoffResult out;
    out.alpha_star = alpha;
    out.value = b(alpha);
    out.kl_gap = std::abs(slope(alpha));
    if (out.kl_gap > cc.eq_tol) {
        warn("Chernoff optimality gap " + std::to_string(out.kl_gap) + " exceeds tolerance");
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Bounds

/// log(Z^M_a / (1 - a)), an upper bound on the M-JSD for means M that dominate A (valid for a >= 1/2;
/// the q-term needs log(Z / a) and dominates when a < 1/2).
inline double m_jsd_upper_bound(const WeightedMean& mean, double alpha, const Density& p, const Density& q,
                                const OracleConfig& cfg = {}, const MeanGrid& grid = MeanGrid::standard()) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("m_jsd_upper_bound needs alpha in (0, 1)");
    if (!dominates(mean, WeightedMean::arithmetic(), grid)) {
        throw DominanceViolation("mean '" + mean.name() + "' does not dominate the arithmetic mean on the sample grid");
    }
    const MMixture m = m_mixture(p, q, mean, alpha, cfg);
    return std::log(m.Z.value / (1.0 - alpha));
}

}  // namespace mnjs
