#pragma once

// Weighted bivariate means M_alpha(x, y) on the positive reals.

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mnjs/common.hpp"

namespace mnjs {

namespace detail {

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline void check_alpha(double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw DomainError("weight alpha must lie in [0, 1], got " + std::to_string(alpha));
    }
}

}  // namespace detail

struct ArithmeticMean {};
struct GeometricMean {};
struct HarmonicMean {};
struct PowerMean {
    double p;
};
/// M^h_alpha(x, y) = h_inv((1 - alpha) h(x) + alpha h(y)) for a strictly monotone h.
struct QuasiArithmeticMean {
    std::function<double(double)> h;
    std::function<double(double)> h_inv;
    std::string label = "quasi-arithmetic";
};

class WeightedMean {
public:
    using Kind = std::variant<ArithmeticMean, GeometricMean, HarmonicMean, PowerMean, QuasiArithmeticMean>;

    static constexpr double kPowerToGeometric = 1e-6;

    WeightedMean() : kind_(ArithmeticMean{}) {}
    WeightedMean(ArithmeticMean m) : kind_(m) {}
    WeightedMean(GeometricMean m) : kind_(m) {}
    WeightedMean(HarmonicMean m) : kind_(m) {}
    WeightedMean(PowerMean m) : kind_(m) {
        if (!std::isfinite(m.p)) throw DomainError("power mean exponent must be finite");
        if (std::abs(m.p) < kPowerToGeometric) kind_ = GeometricMean{};
    }
    WeightedMean(QuasiArithmeticMean m) : kind_(std::move(m)) {
        const auto& q = std::get<QuasiArithmeticMean>(kind_);
        if (!q.h || !q.h_inv) throw DomainError("quasi-arithmetic mean needs both h and h_inv");
    }

    static WeightedMean arithmetic() { return ArithmeticMean{}; }
    static WeightedMean geometric() { return GeometricMean{}; }
    static WeightedMean harmonic() { return HarmonicMean{}; }
    static WeightedMean power(double p) { return PowerMean{p}; }

    /// Parses "arithmetic", "geometric", "harmonic" (or A/G/H) and "power:<p>".
    static WeightedMean parse(const std::string& name) {
        if (name == "arithmetic" || name == "A" || name == "a") return arithmetic();
        if (name == "geometric" || name == "G" || name == "g") return geometric();
        if (name == "harmonic" || name == "H" || name == "h") return harmonic();
        const std::string prefix = "power:";
        if (name.rfind(prefix, 0) == 0) {
            std::size_t used = 0;
            const std::string arg = name.substr(prefix.size());
            double p = 0.0;
            try {
                p = std::stod(arg, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used == 0 || used != arg.size()) throw DomainError("bad power mean exponent in '" + name + "'");
            if (p == 0.0) return geometric();
            return power(p);
        }
        throw DomainError("unknown mean '" + name + "'");
    }

    const Kind& kind() const { return kind_; }
    bool is_arithmetic() const { return std::holds_alternative<ArithmeticMean>(kind_); }
    bool is_geometric() const { return std::holds_alternative<GeometricMean>(kind_); }
    bool is_harmonic() const { return std::holds_alternative<HarmonicMean>(kind_); }

    std::string name() const {
        struct {
            std::string operator()(const ArithmeticMean&) const { return "arithmetic"; }
            std::string operator()(const GeometricMean&) const { return "geometric"; }
            std::string operator()(const HarmonicMean&) const { return "harmonic"; }
            std::string operator()(const PowerMean& m) const { return "power:" + std::to_string(m.p); }
            std::string operator()(const QuasiArithmeticMean& m) const { return m.label; }
        } v;
        return std::visit(v, kind_);
    }

    double operator()(double x, double y, double alpha) const { return evaluate(x, y, alpha); }

    double evaluate(double x, double y, double alpha) const {
        detail::check_alpha(alpha);
        if (!(x > 0.0) || !(y > 0.0)) throw DomainError("means are defined on positive reals only");
        if (alpha == 0.0) return x;
        if (alpha == 1.0) return y;
        struct {
            double x, y, a;
            double operator()(const ArithmeticMean&) const { return (1.0 - a) * x + a * y; }
            double operator()(const GeometricMean&) const {
                return std::exp((1.0 - a) * std::log(x) + a * std::log(y));
            }
            double operator()(const HarmonicMean&) const { return x * y / ((1.0 - a) * y + a * x); }
            double operator()(const PowerMean& m) const {
                return std::pow((1.0 - a) * std::pow(x, m.p) + a * std::pow(y, m.p), 1.0 / m.p);
            }
            double operator()(const QuasiArithmeticMean& m) const {
                return m.h_inv((1.0 - a) * m.h(x) + a * m.h(y));
            }
        } v{x, y, alpha};
        return std::visit(v, kind_);
    }

    /// log M_alpha(e^lx, e^ly). Stays finite where densities underflow; lx or ly may be -inf
    /// for the closed-form kinds. Quasi-arithmetic means go through the linear domain.
    double log_evaluate(double lx, double ly, double alpha) const {
        detail::check_alpha(alpha);
        if (alpha == 0.0) return lx;
        if (alpha == 1.0) return ly;
        const double la = std::log1p(-alpha);
        const double lb = std::log(alpha);
        constexpr double ninf = -std::numeric_limits<double>::infinity();
        struct {
            double lx, ly, a, la, lb;
            double operator()(const ArithmeticMean&) const { return detail::log_sum_exp(la + lx, lb + ly); }
            double operator()(const GeometricMean&) const {
                if (lx == ninf || ly == ninf) return ninf;
                return (1.0 - a) * lx + a * ly;
            }
            double operator()(const HarmonicMean&) const {
                if (lx == ninf || ly == ninf) return ninf;
                return -detail::log_sum_exp(la - lx, lb - ly);
            }
            double operator()(const PowerMean& m) const {
                if (m.p < 0.0 && (lx == ninf || ly == ninf)) return ninf;
                return detail::log_sum_exp(la + m.p * lx, lb + m.p * ly) / m.p;
            }
            double operator()(const QuasiArithmeticMean& m) const {
                return std::log(m.h_inv((1.0 - a) * m.h(std::exp(lx)) + a * m.h(std::exp(ly))));
            }
        } v{lx, ly, alpha, la, lb};
        return std::visit(v, kind_);
    }

private:
    Kind kind_;
};

/// Finite positive lattice of (x, y, alpha) triples used by the sampled dominance check.
struct MeanGrid {
    std::vector<double> values;
    std::vector<double> alphas;

    static MeanGrid standard() {
        MeanGrid g;
        for (int e = -6; e <= 6; ++e) {
            for (double m : {1.0, 2.5, 5.0}) g.values.push_back(m * std::pow(10.0, e));
        }
        for (int i = 0; i <= 20; ++i) g.alphas.push_back(i / 20.0);
        return g;
    }
};

/// Sampled check that `a` dominates `b` (a >= b - 1e-12 at every grid point).
/// A true result is necessary for dominance, not a proof of it.
inline bool dominates(const WeightedMean& a, const WeightedMean& b, const MeanGrid& grid = MeanGrid::standard()) {
    for (double x : grid.values) {
        for (double y : grid.values) {
            for (double alpha : grid.alphas) {
                const double ma = a.evaluate(x, y, alpha);
                const double mb = b.evaluate(x, y, alpha);
                if (ma < mb - 1e-12 * std::max(1.0, std::abs(mb))) return false;
            }
        }
    }
    return true;
}

}  // namespace mnjs
