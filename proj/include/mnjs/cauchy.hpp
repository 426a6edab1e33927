#pragma once

// Cauchy scale and location-scale families: closed-form KL, entropies and harmonic mixtures.

#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>

#include "mnjs/divergences.hpp"
#include "mnjs/oracle.hpp"

namespace mnjs {

inline constexpr double kMinCauchyScale = 1e-12;

namespace detail {
inline double checked_scale(double gamma) {
    if (!std::isfinite(gamma) || !(gamma >= kMinCauchyScale)) {
        throw DomainError("Cauchy scale must be a finite number >= 1e-12, got " + std::to_string(gamma));
    }
    return gamma;
}
}  // namespace detail

struct CauchyScale {
    double gamma = 1.0;

    CauchyScale() = default;
    explicit CauchyScale(double g) : gamma(detail::checked_scale(g)) {}
};

struct CauchyLocationScale {
    double l = 0.0;
    double gamma = 1.0;

    CauchyLocationScale() = default;
    CauchyLocationScale(double loc, double g) : l(loc), gamma(detail::checked_scale(g)) {
        if (!std::isfinite(loc)) throw DomainError("Cauchy location must be finite");
    }
    CauchyLocationScale(const CauchyScale& s) : l(0.0), gamma(s.gamma) {}
};

/// 2 log(A(g1, g2) / G(g1, g2)); symmetric and scale-invariant.
inline double cauchy_kl(const CauchyScale& a, const CauchyScale& b) {
    return 2.0 * std::log((a.gamma + b.gamma) / (2.0 * std::sqrt(a.gamma * b.gamma)));
}

/// log(((g1 + g2)^2 + (l1 - l2)^2) / (4 g1 g2)).
inline double cauchy_ls_kl(const CauchyLocationScale& a, const CauchyLocationScale& b) {
    const double s = a.gamma + b.gamma;
    const double dl = a.l - b.l;
    return std::log((s * s + dl * dl) / (4.0 * a.gamma * b.gamma));
}

inline double cauchy_entropy(const CauchyScale& g) { return std::log(4.0 * std::numbers::pi * g.gamma); }

/// h(p1 : p2) = log(pi (g1 + g2)^2 / g2).
inline double cauchy_cross_entropy(const CauchyScale& a, const CauchyScale& b) {
    const double s = a.gamma + b.gamma;
    return std::log(std::numbers::pi * s * s / b.gamma);
}

inline double cauchy_cross_entropy(const CauchyLocationScale& a, const CauchyLocationScale& b) {
    const double s = a.gamma + b.gamma;
    const double dl = a.l - b.l;
    return std::log(std::numbers::pi * (s * s + dl * dl) / b.gamma);
}

/// Integral of p^2.
inline double cauchy_h2(const CauchyScale& g) { return 1.0 / (2.0 * std::numbers::pi * g.gamma); }

struct HarmonicMixture {
    CauchyScale mixture;
    double Z = 1.0;
};

/// H_a(p_g1, p_g2) / Z is again a Cauchy density. With (g1 g2)_a = (1 - a) g1 + a g2:
/// Z = sqrt(g1 g2 / ((g1 g2)_a (g2 g1)_a)) and the scale is sqrt(g1 g2 (g1 g2)_a / (g2 g1)_a).
inline HarmonicMixture harmonic_mixture(const CauchyScale& a, const CauchyScale& b, double alpha) {
    detail::check_alpha(alpha);
    const double g1 = a.gamma, g2 = b.gamma;
    const double m12 = (1.0 - alpha) * g1 + alpha * g2;
    const double m21 = (1.0 - alpha) * g2 + alpha * g1;
    HarmonicMixture out;
    if (alpha == 0.0) return {a, 1.0};
    if (alpha == 1.0) return {b, 1.0};
    out.mixture = CauchyScale(std::sqrt(g1 * g2 * m12 / m21));
    out.Z = std::sqrt(g1 * g2 / (m12 * m21));
    return out;
}

/// Harmonic JSD (1 - a) KL(p_g1 : m) + a KL(p_g2 : m), m the normalized harmonic mixture.
/// At a = 1/2 this is log((sqrt g1 + sqrt g2)^2 / (4 sqrt(g1 g2))).
inline double harmonic_jsd(const CauchyScale& a, const CauchyScale& b, double alpha = 0.5) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("harmonic_jsd needs alpha in (0, 1)");
    const CauchyScale m = harmonic_mixture(a, b, alpha).mixture;
    return (1.0 - alpha) * cauchy_kl(a, m) + alpha * cauchy_kl(b, m);
}

/// 1/2 (KL(p_g1 : p_m) + KL(p_g2 : p_m)) about the arithmetic-midpoint scale m = (g1 + g2)/2:
/// log((3 g1 + g2)(3 g2 + g1) / (8 sqrt(g1 g2)(g1 + g2))).
inline double midpoint_scale_jsd(const CauchyScale& a, const CauchyScale& b) {
    const double g1 = a.gamma, g2 = b.gamma;
    return std::log((3.0 * g1 + g2) * (3.0 * g2 + g1) / (8.0 * std::sqrt(g1 * g2) * (g1 + g2)));
}

inline Density cauchy_ls_density(const CauchyLocationScale& c);

/// Parameters of a (location-)scale Cauchy density.
class CauchyPoint : public FamilyPoint {
public:
    explicit CauchyPoint(CauchyLocationScale c) : c_(c) {}
    std::string family() const override { return "cauchy"; }
    const CauchyLocationScale& params() const { return c_; }

    std::optional<double> kl(const FamilyPoint& other) const override {
        const auto* o = dynamic_cast<const CauchyPoint*>(&other);
        if (o == nullptr) return std::nullopt;
        return cauchy_ls_kl(c_, o->c_);
    }

    /// Harmonic mixtures of Cauchys with a shared location stay Cauchy.
    std::optional<ClosedMixture> mix(const FamilyPoint& other, const WeightedMean& mean, double alpha) const override {
        const auto* o = dynamic_cast<const CauchyPoint*>(&other);
        if (o == nullptr || !mean.is_harmonic() || o->c_.l != c_.l) return std::nullopt;
        const HarmonicMixture h = harmonic_mixture(CauchyScale(c_.gamma), CauchyScale(o->c_.gamma), alpha);
        return ClosedMixture{cauchy_ls_density({c_.l, h.mixture.gamma}), h.Z};
    }

private:
    CauchyLocationScale c_;
};

inline Density cauchy_ls_density(const CauchyLocationScale& c) {
    const double l = c.l, g = c.gamma;
    Density d;
    d.log_pdf = [l, g](Point x) {
        const double u = (x[0] - l) / g;
        return -std::log(std::numbers::pi * g) - std::log1p(u * u);
    };
    d.sampler = [l, g](Rng& rng, std::span<double> out) { out[0] = std::cauchy_distribution<double>(l, g)(rng); };
    d.features = {{l, g}};
    d.family = std::make_shared<const CauchyPoint>(c);
    d.label = "cauchy(" + std::to_string(l) + "," + std::to_string(g) + ")";
    return d;
}

inline Density cauchy_density(const CauchyScale& c) { return cauchy_ls_density(CauchyLocationScale(c)); }
inline Density cauchy_density(double gamma) { return cauchy_density(CauchyScale(gamma)); }

}  // namespace mnjs
