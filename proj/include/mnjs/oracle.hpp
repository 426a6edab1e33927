#pragma once

// Numerical integration backing every closed-form check in the library:
// adaptive Gauss-Kronrod on the real line (through x = c + s t/(1 - t^2)),
// on the positive half-line (through x = s u/(1 - u)), exact sums on finite
// alphabets and importance-sampled Monte Carlo in dimension >= 2.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "mnjs/means.hpp"

namespace mnjs {

using Rng = std::mt19937_64;
using Point = std::span<const double>;

struct Support {
    enum class Kind { RealLine, PositiveHalfLine, FiniteAlphabet };
    Kind kind = Kind::RealLine;
    std::size_t dim = 1;
    std::size_t size = 0;  // alphabet size for FiniteAlphabet

    static Support real_line(std::size_t dim = 1) { return {Kind::RealLine, dim, 0}; }
    static Support positive_half_line() { return {Kind::PositiveHalfLine, 1, 0}; }
    static Support finite_alphabet(std::size_t size) { return {Kind::FiniteAlphabet, 1, size}; }

    bool operator==(const Support&) const = default;
};

/// Location/scale of a bump of mass; the 1D integrator pre-splits its panels around these.
struct Feature {
    double center = 0.0;
    double scale = 1.0;
};

struct IntegralEstimate {
    double value = 0.0;
    double abs_error = 0.0;
    std::size_t nodes_used = 0;
};

class OracleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BudgetExceeded : public OracleError {
public:
    BudgetExceeded(const std::string& what, IntegralEstimate partial) : OracleError(what), partial_(partial) {}
    const IntegralEstimate& partial() const { return partial_; }

private:
    IntegralEstimate partial_;
};

class NonFiniteIntegrand : public OracleError {
public:
    NonFiniteIntegrand(const std::string& what, std::vector<double> node) : OracleError(what), node_(std::move(node)) {}
    const std::vector<double>& node() const { return node_; }

private:
    std::vector<double> node_;
};

struct OracleConfig {
    double abs_tol = 1e-10;
    double rel_tol = 0.0;
    std::size_t max_nodes = 4'000'000;
    std::size_t mc_samples = 200'000;
    std::uint64_t seed = 0;
    double density_floor = 1e-300;
    unsigned threads = 1;
};

struct Density;

/// Closed-form mixture of two members of a parametric family.
struct ClosedMixture;

/// Parametric identity of a density. Closed-form backends downcast to their own point types.
class FamilyPoint {
public:
    virtual ~FamilyPoint() = default;
    virtual std::string family() const = 0;
    /// (pq)^M_alpha and its normalizer when the family is closed under this mean; nullopt otherwise.
    virtual std::optional<ClosedMixture> mix(const FamilyPoint& other, const WeightedMean& mean, double alpha) const;
    /// Closed-form KL(this : other) when both points live in the same family.
    virtual std::optional<double> kl(const FamilyPoint&) const { return std::nullopt; }
};

struct Density {
    std::size_t dim = 1;
    Support support = Support::real_line();
    std::function<double(Point)> log_pdf;
    /// Draws one point into the output span; required for Monte Carlo proposals.
    std::function<void(Rng&, std::span<double>)> sampler;
    std::shared_ptr<const FamilyPoint> family;
    std::vector<Feature> features;
    /// Uncertainty of log Z for numerically normalized densities (0 for exact densities).
    double log_norm_error = 0.0;
    std::string label;

    double log_eval(Point x) const { return log_pdf(x); }
    double eval(Point x) const { return std::exp(log_pdf(x)); }
    double log_eval(double x) const { return log_pdf(Point(&x, 1)); }
    double eval(double x) const { return std::exp(log_pdf(Point(&x, 1))); }

    template <class T>
    std::shared_ptr<const T> family_as() const {
        return std::dynamic_pointer_cast<const T>(family);
    }
};

struct ClosedMixture {
    Density density;
    double normalizer = 1.0;
};

inline std::optional<ClosedMixture> FamilyPoint::mix(const FamilyPoint&, const WeightedMean&, double) const {
    return std::nullopt;
}

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class G>
Panel gauss_kronrod(const G& g, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = g(center);
    double resg = fc * kWg[3];
    double resk = fc * kWgk[7];
    double resabs = std::abs(resk);
    std::array<double, 7> f1{}, f2{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        f1[j] = g(center - dx);
        f2[j] = g(center + dx);
        resk += kWgk[j] * (f1[j] + f2[j]);
        resabs += kWgk[j] * (std::abs(f1[j]) + std::abs(f2[j]));
        if (j % 2 == 1) resg += kWg[j / 2] * (f1[j] + f2[j]);
    }
    const double reskh = resk * 0.5;
    double resasc = kWgk[7] * std::abs(fc - reskh);
    for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(f1[j] - reskh) + std::abs(f2[j] - reskh));
    const double result = resk * half;
    resabs *= std::abs(half);
    resasc *= std::abs(half);
    double err = std::abs((resk - resg) * half);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();
    if (resabs > uflow / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
    return {a, b, result, err};
}

/// Adaptive subdivision of a finite interval with the given initial breakpoints.
template <class G>
IntegralEstimate adaptive(const G& g, std::vector<double> breaks, const OracleConfig& cfg) {
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<Panel> heap;  // max-heap on error
    std::vector<Panel> frozen;
    std::size_t nodes = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        heap.push_back(gauss_kronrod(g, breaks[i], breaks[i + 1]));
        nodes += 15;
    }
    std::make_heap(heap.begin(), heap.end());
    auto exact_sums = [&]() {
        std::vector<Panel> all = frozen;
        all.insert(all.end(), heap.begin(), heap.end());
        std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
        IntegralEstimate e;
        for (const auto& p : all) {
            e.value += p.value;
            e.abs_error += p.error;
        }
        e.nodes_used = nodes;
        return e;
    };
    IntegralEstimate running = exact_sums();
    while (!heap.empty()) {
        if (running.abs_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(running.value))) {
            running = exact_sums();
            if (running.abs_error <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(running.value))) break;
        }
        if (nodes + 30 > cfg.max_nodes) throw BudgetExceeded("quadrature node budget exhausted", exact_sums());
        std::pop_heap(heap.begin(), heap.end());
        const Panel worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) || (worst.b - worst.a) < 1e-15 * std::max(1.0, std::abs(mid))) {
            frozen.push_back(worst);
            continue;
        }
        const Panel left = gauss_kronrod(g, worst.a, mid);
        const Panel right = gauss_kronrod(g, mid, worst.b);
        nodes += 30;
        running.value += left.value + right.value - worst.value;
        running.abs_error += left.error + right.error - worst.error;
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end());
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end());
    }
    return exact_sums();
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline void check_finite(double v, Point x) {
    if (!std::isfinite(v)) {
        throw NonFiniteIntegrand("integrand is not finite at a node", std::vector<double>(x.begin(), x.end()));
    }
}

// Image of x under the inverse of x = c + s t/(1 - t^2).
inline double real_line_to_unit(double x, double c, double s) {
    const double u = (x - c) / s;
    return 2.0 * u / (1.0 + std::sqrt(1.0 + 4.0 * u * u));
}

}  // namespace detail

using Integrand = std::function<double(Point)>;

/// Mean of g(x) for x drawn from `proposal`, with the standard error as abs_error.
/// Samples come from per-chunk streams seeded by (seed, chunk), so any thread count gives the same bits.
inline IntegralEstimate monte_carlo_mean(const Integrand& g, const Density& proposal, const OracleConfig& cfg) {
    if (!proposal.sampler) throw OracleError("Monte Carlo proposal density has no sampler");
    constexpr std::size_t kChunk = 8192;
    const std::size_t n = std::max<std::size_t>(cfg.mc_samples, 2);
    const std::size_t chunks = (n + kChunk - 1) / kChunk;
    struct Partial {
        double mean = 0.0, m2 = 0.0;
        std::size_t count = 0;
    };
    std::vector<Partial> parts(chunks);
    auto run_chunk = [&](std::size_t c) {
        Rng rng(detail::splitmix64(cfg.seed ^ detail::splitmix64(c + 1)));
        std::vector<double> x(proposal.dim);
        Partial p;
        const std::size_t count = std::min(kChunk, n - c * kChunk);
        for (std::size_t i = 0; i < count; ++i) {
            proposal.sampler(rng, x);
            const double v = g(x);
            detail::check_finite(v, x);
            ++p.count;
            const double d = v - p.mean;
            p.mean += d / static_cast<double>(p.count);
            p.m2 += d * (v - p.mean);
        }
        parts[c] = p;
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(chunks)));
    if (threads == 1) {
        for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    } else {
        std::vector<std::exception_ptr> errors(threads);
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < threads; ++t) {
                pool.emplace_back([&, t] {
                    try {
                        for (std::size_t c = t; c < chunks; c += threads) run_chunk(c);
                    } catch (...) {
                        errors[t] = std::current_exception();
                    }
                });
            }
        }
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    Partial total;
    for (const auto& p : parts) {
        if (p.count == 0) continue;
        const double nt = static_cast<double>(total.count + p.count);
        const double d = p.mean - total.mean;
        total.mean += d * static_cast<double>(p.count) / nt;
        total.m2 += p.m2 + d * d * static_cast<double>(total.count) * static_cast<double>(p.count) / nt;
        total.count += p.count;
    }
    const double var = total.m2 / static_cast<double>(total.count - 1);
    return {total.mean, std::sqrt(var / static_cast<double>(total.count)), total.count};
}

/// Integral of f over `support`. In dimension >= 2 a proposal density with a sampler is required.
inline IntegralEstimate integrate(const Integrand& f, const Support& support, const OracleConfig& cfg,
                                  std::span<const Feature> features = {}, const Density* proposal = nullptr) {
    if (!(cfg.abs_tol > 0.0)) throw OracleError("abs_tol must be positive");
    switch (support.kind) {
        case Support::Kind::FiniteAlphabet: {
            IntegralEstimate e;
            double comp = 0.0, mag = 0.0;
            for (std::size_t i = 0; i < support.size; ++i) {
                const double x = static_cast<double>(i);
                const double v = f(Point(&x, 1));
                detail::check_finite(v, Point(&x, 1));
                const double y = v - comp;
                const double t = e.value + y;
                comp = (t - e.value) - y;
                e.value = t;
                mag += std::abs(v);
            }
            e.abs_error = 4.0 * std::numeric_limits<double>::epsilon() * mag;
            e.nodes_used = support.size;
            return e;
        }
        case Support::Kind::PositiveHalfLine: {
            const double s = features.empty() ? 1.0 : std::max(features[0].center + features[0].scale, 1e-12);
            auto g = [&](double u) {
                const double om = 1.0 - u;
                const double x = s * u / om;
                const double v = f(Point(&x, 1));
                detail::check_finite(v, Point(&x, 1));
                return v == 0.0 ? 0.0 : v * s / (om * om);
            };
            std::vector<double> breaks;
            for (int i = 0; i <= 8; ++i) breaks.push_back(i / 8.0);
            for (const auto& ft : features) {
                for (double k : {-4.0, -2.0, -1.0, 0.0, 1.0, 2.0, 4.0, 8.0}) {
                    const double x = ft.center + k * ft.scale;
                    if (x > 0.0) breaks.push_back(x / (s + x));
                }
            }
            return detail::adaptive(g, breaks, cfg);
        }
        case Support::Kind::RealLine:
            break;
    }
    if (support.dim >= 2) {
        if (proposal == nullptr) throw OracleError("Monte Carlo integration needs a proposal density");
        auto g = [&](Point x) {
            const double lq = proposal->log_eval(x);
            const double v = f(x);
            return v == 0.0 ? 0.0 : v * std::exp(-lq);
        };
        return monte_carlo_mean(g, *proposal, cfg);
    }
    const double c = features.empty() ? 0.0 : features[0].center;
    const double s = features.empty() ? 1.0 : features[0].scale;
    auto g = [&](double t) {
        const double om = 1.0 - t * t;
        const double x = c + s * t / om;
        const double v = f(Point(&x, 1));
        detail::check_finite(v, Point(&x, 1));
        return v == 0.0 ? 0.0 : v * s * (1.0 + t * t) / (om * om);
    };
    std::vector<double> breaks;
    for (int i = 0; i <= 8; ++i) breaks.push_back(-1.0 + i / 4.0);
    for (const auto& ft : features) {
        for (double k : {-16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
            breaks.push_back(detail::real_line_to_unit(ft.center + k * ft.scale, c, s));
        }
    }
    return detail::adaptive(g, breaks, cfg);
}

inline std::vector<Feature> merged_features(const Density& p, const Density& q) {
    std::vector<Feature> f = p.features;
    f.insert(f.end(), q.features.begin(), q.features.end());
    return f;
}

/// E_p[f] = integral of p f. Zero-density points contribute nothing (0 * anything = 0).
/// In dimension >= 2 samples are drawn from p itself.
inline IntegralEstimate expectation(const Density& p, const Integrand& f, const OracleConfig& cfg,
                                    std::span<const Feature> extra_features = {}) {
    if (p.dim >= 2) return monte_carlo_mean(f, p, cfg);
    std::vector<Feature> features = p.features;
    features.insert(features.end(), extra_features.begin(), extra_features.end());
    auto g = [&](Point x) {
        const double lp = p.log_eval(x);
        if (lp == -std::numeric_limits<double>::infinity()) return 0.0;
        return std::exp(lp) * f(x);
    };
    return integrate(g, p.support, cfg, features);
}

/// Total mass of p; used by the normalization self-tests.
inline IntegralEstimate total_mass(const Density& p, const OracleConfig& cfg) {
    return expectation(p, [](Point) { return 1.0; }, cfg);
}

}  // namespace mnjs
