#pragma once

// Exponential families: Bregman and skew Jensen divergences on natural parameters, the multivariate
// normal in its three charts, and the closed-form geometric Jensen-Shannon divergences.

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mnjs/densities.hpp"
#include "mnjs/divergences.hpp"
#include "mnjs/oracle.hpp"

namespace mnjs {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// An exponential family exp(<theta, t(x)> - F(theta)) h(x), described through its log-normalizer.
struct ExpFamSpec {
    std::string name;
    std::size_t dim_param = 1;
    std::function<double(const Vec&)> log_normalizer;
    std::function<Vec(const Vec&)> gradient;
    std::function<bool(const Vec&)> in_domain;
    /// Untagged density for a natural parameter; use expfam_density() to get a tagged one.
    std::function<Density(const Vec&)> make_density;
    std::function<Vec(const Vec&)> gradient_inverse;  // optional
    std::function<double(const Vec&)> conjugate;      // optional, F* on expectation parameters
    /// log p(0; theta); only set where t(0) = 0 and the carrier is 1 at 0, so that p(0; theta) = exp(-F(theta)).
    std::function<double(const Vec&)> log_density_at_zero;

    double F(const Vec& theta) const { return log_normalizer(theta); }
    Vec grad(const Vec& theta) const { return gradient(theta); }

    void require_domain(const Vec& theta) const {
        if (static_cast<std::size_t>(theta.size()) != dim_param) {
            throw DomainError(name + ": parameter has " + std::to_string(theta.size()) + " entries, expected " +
                              std::to_string(dim_param));
        }
        if (!in_domain(theta)) throw DomainError(name + ": parameter is outside the natural parameter space");
    }
};

using ExpFamPtr = std::shared_ptr<const ExpFamSpec>;

struct JensenGap {
    double value = 0.0;
    double alpha = 0.5;
};

inline Vec lerp(const Vec& a, const Vec& b, double alpha) { return (1.0 - alpha) * a + alpha * b; }

/// B_F(theta1 : theta2) = F(theta1) - F(theta2) - <theta1 - theta2, grad F(theta2)>.
inline double bregman(const ExpFamSpec& spec, const Vec& theta1, const Vec& theta2) {
    spec.require_domain(theta1);
    spec.require_domain(theta2);
    const double v = spec.F(theta1) - spec.F(theta2) - (theta1 - theta2).dot(spec.grad(theta2));
    return std::max(0.0, v);
}

/// J_F^a(theta1 : theta2) = (1 - a) F(theta1) + a F(theta2) - F((1 - a) theta1 + a theta2).
inline JensenGap jensen_skew(const ExpFamSpec& spec, const Vec& theta1, const Vec& theta2, double alpha) {
    detail::check_alpha(alpha);
    spec.require_domain(theta1);
    spec.require_domain(theta2);
    if (alpha == 0.0 || alpha == 1.0) return {0.0, alpha};
    const double v = (1.0 - alpha) * spec.F(theta1) + alpha * spec.F(theta2) - spec.F(lerp(theta1, theta2, alpha));
    return {std::max(0.0, v), alpha};
}

/// Geometric JSD in closed form: (1 - a) B_F(theta_a : theta1) + a B_F(theta_a : theta2).
inline double g_jsd(const ExpFamSpec& spec, const Vec& theta1, const Vec& theta2, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("g_jsd needs alpha in (0, 1)");
    const Vec ta = lerp(theta1, theta2, alpha);
    return (1.0 - alpha) * bregman(spec, ta, theta1) + alpha * bregman(spec, ta, theta2);
}

/// Dual geometric JSD (reverse KL), equal to the skew Jensen divergence.
inline double g_jsd_dual(const ExpFamSpec& spec, const Vec& theta1, const Vec& theta2, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("g_jsd_dual needs alpha in (0, 1)");
    return jensen_skew(spec, theta1, theta2, alpha).value;
}

/// Normalizer of the geometric mixture p1^(1-a) p2^a: exp(-J_F^a).
inline double z_geometric(const ExpFamSpec& spec, const Vec& theta1, const Vec& theta2, double alpha) {
    return std::exp(-jensen_skew(spec, theta1, theta2, alpha).value);
}

enum class ZRoute { Jensen, DensityAtZero };

/// Normalizer of prod_i p_i^(w_i) for weights on the simplex.
inline double z_geometric_multi(const ExpFamSpec& spec, const std::vector<Vec>& thetas, const std::vector<double>& weights,
                                ZRoute route = ZRoute::Jensen) {
    if (thetas.empty() || thetas.size() != weights.size()) throw DomainError("z_geometric_multi: need one weight per parameter");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw DomainError("z_geometric_multi: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DomainError("z_geometric_multi: weights must sum to 1");
    Vec bar = Vec::Zero(static_cast<Eigen::Index>(spec.dim_param));
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        spec.require_domain(thetas[i]);
        bar += weights[i] * thetas[i];
    }
    if (route == ZRoute::DensityAtZero) {
        if (!spec.log_density_at_zero) {
            throw DomainError(spec.name + ": the density-at-zero route needs t(0) = 0 and a unit carrier at 0");
        }
        double s = -spec.log_density_at_zero(bar);
        for (std::size_t i = 0; i < thetas.size(); ++i) s += weights[i] * spec.log_density_at_zero(thetas[i]);
        return std::exp(s);
    }
    double s = spec.F(bar);
    for (std::size_t i = 0; i < thetas.size(); ++i) s -= weights[i] * spec.F(thetas[i]);
    return std::exp(s);
}

// ---------------------------------------------------------------------------------------------
// Tagged densities

inline Density expfam_density(const ExpFamPtr& spec, const Vec& theta);

class ExpFamPoint : public FamilyPoint {
public:
    ExpFamPoint(ExpFamPtr spec, Vec theta) : spec_(std::move(spec)), theta_(std::move(theta)) {}
    std::string family() const override { return spec_->name; }
    const ExpFamPtr& spec() const { return spec_; }
    const Vec& theta() const { return theta_; }

    bool same_family(const FamilyPoint& other) const {
        const auto* o = dynamic_cast<const ExpFamPoint*>(&other);
        return o != nullptr && o->spec_->name == spec_->name && o->spec_->dim_param == spec_->dim_param;
    }

    /// KL(p_theta : p_theta') = B_F(theta' : theta).
    std::optional<double> kl(const FamilyPoint& other) const override {
        if (!same_family(other)) return std::nullopt;
        return bregman(*spec_, dynamic_cast<const ExpFamPoint&>(other).theta_, theta_);
    }

    /// Normalized geometric mixtures stay in the family at the interpolated natural parameter.
    std::optional<ClosedMixture> mix(const FamilyPoint& other, const WeightedMean& mean, double alpha) const override {
        if (!mean.is_geometric() || !same_family(other)) return std::nullopt;
        const Vec& t2 = dynamic_cast<const ExpFamPoint&>(other).theta_;
        return ClosedMixture{expfam_density(spec_, lerp(theta_, t2, alpha)), z_geometric(*spec_, theta_, t2, alpha)};
    }

private:
    ExpFamPtr spec_;
    Vec theta_;
};

inline Density expfam_density(const ExpFamPtr& spec, const Vec& theta) {
    spec->require_domain(theta);
    Density d = spec->make_density(theta);
    d.family = std::make_shared<const ExpFamPoint>(spec, theta);
    return d;
}

/// Copy of a density without its parametric tag, so every computation on it goes through the oracle.
inline Density untagged(Density d) {
    d.family.reset();
    return d;
}

// ---------------------------------------------------------------------------------------------
// Multivariate normal

enum class Chart { Ordinary, Natural, Expectation };

inline std::string chart_name(Chart c) {
    switch (c) {
        case Chart::Ordinary:
            return "ordinary";
        case Chart::Natural:
            return "natural";
        case Chart::Expectation:
            return "expectation";
    }
    return "?";
}

namespace detail {

/// Symmetrizes after checking the asymmetry against a 1e-8 gate.
inline Mat symmetrized(const Mat& m, const char* what) {
    if (m.rows() != m.cols() || m.rows() == 0) throw DomainError(std::string(what) + " must be a nonempty square matrix");
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw DomainError(std::string(what) + " is not symmetric");
    }
    return 0.5 * (m + m.transpose());
}

/// Cholesky with a 1e-12 pivot floor; nullopt when the matrix is not positive definite.
inline std::optional<Eigen::LLT<Mat>> cholesky(const Mat& m) {
    Eigen::LLT<Mat> llt(m);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const Mat& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        if (!(l(i, i) * l(i, i) >= 1e-12)) return std::nullopt;
    }
    return llt;
}

inline Eigen::LLT<Mat> cholesky_or_throw(const Mat& m, const char* what) {
    auto llt = cholesky(m);
    if (!llt) throw DomainError(std::string(what) + " is not positive definite");
    return *llt;
}

inline double log_det(const Eigen::LLT<Mat>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

inline Mat inverse(const Eigen::LLT<Mat>& llt) {
    return llt.solve(Mat::Identity(llt.matrixLLT().rows(), llt.matrixLLT().cols()));
}

}  // namespace detail

/// A d-variate normal in one of three charts:
/// ordinary (mu, Sigma), natural (Sigma^-1 mu, Sigma^-1 / 2), expectation (mu, -(Sigma + mu mu^T)).
class MvnParam {
public:
    static MvnParam ordinary(Vec mu, const Mat& sigma) { return MvnParam(Chart::Ordinary, std::move(mu), sigma); }
    static MvnParam natural(Vec theta_v, const Mat& theta_m) { return MvnParam(Chart::Natural, std::move(theta_v), theta_m); }
    static MvnParam expectation(Vec eta_v, const Mat& eta_m) { return MvnParam(Chart::Expectation, std::move(eta_v), eta_m); }

    Chart chart() const { return chart_; }
    std::size_t dim() const { return static_cast<std::size_t>(v_.size()); }
    const Vec& vec() const { return v_; }
    const Mat& mat() const { return m_; }

    /// (vector part, column-major matrix part) as one flat vector of length d + d^2.
    Vec flat() const {
        const auto d = v_.size();
        Vec out(d + d * d);
        out.head(d) = v_;
        out.tail(d * d) = Eigen::Map<const Vec>(m_.data(), d * d);
        return out;
    }

    static MvnParam from_flat(Chart chart, const Vec& flat, std::size_t d) {
        const auto n = static_cast<Eigen::Index>(d);
        if (flat.size() != n + n * n) throw DomainError("flat MVN parameter has the wrong length");
        return MvnParam(chart, flat.head(n), Eigen::Map<const Mat>(flat.tail(n * n).data(), n, n));
    }

private:
    MvnParam(Chart chart, Vec v, const Mat& m) : chart_(chart), v_(std::move(v)) {
        if (m.rows() != v_.size()) throw DomainError("MVN vector and matrix sizes disagree");
        if (!v_.allFinite() || !m.allFinite()) throw DomainError("MVN parameter has non-finite entries");
        m_ = detail::symmetrized(m, "MVN matrix parameter");
        switch (chart_) {
            case Chart::Ordinary:
                detail::cholesky_or_throw(m_, "covariance");
                break;
            case Chart::Natural:
                detail::cholesky_or_throw(m_, "natural matrix parameter");
                break;
            case Chart::Expectation:
                detail::cholesky_or_throw(-(m_ + v_ * v_.transpose()), "-(eta_M + eta_v eta_v^T)");
                break;
        }
    }

    Chart chart_;
    Vec v_;
    Mat m_;
};

namespace detail {

inline std::pair<Vec, Mat> to_ordinary(const MvnParam& p) {
    switch (p.chart()) {
        case Chart::Ordinary:
            return {p.vec(), p.mat()};
        case Chart::Natural: {
            const Mat sigma = 0.5 * inverse(cholesky_or_throw(p.mat(), "natural matrix parameter"));
            Vec mu = sigma * p.vec();
            return {std::move(mu), 0.5 * (sigma + sigma.transpose())};
        }
        case Chart::Expectation:
            return {p.vec(), -p.mat() - p.vec() * p.vec().transpose()};
    }
    throw DomainError("unknown chart");
}

}  // namespace detail

inline MvnParam mvn_convert(const MvnParam& p, Chart target) {
    if (p.chart() == target) return p;
    auto [mu, sigma] = detail::to_ordinary(p);
    switch (target) {
        case Chart::Ordinary:
            return MvnParam::ordinary(mu, sigma);
        case Chart::Natural: {
            const Mat prec = detail::inverse(detail::cholesky_or_throw(sigma, "covariance"));
            Vec tv = prec * mu;
            return MvnParam::natural(std::move(tv), 0.5 * prec);
        }
        case Chart::Expectation:
            return MvnParam::expectation(mu, -(sigma + mu * mu.transpose()));
    }
    throw DomainError("unknown chart");
}

/// F evaluated with the formula of the parameter's own chart.
inline double mvn_log_normalizer(const MvnParam& p) {
    const double d = static_cast<double>(p.dim());
    switch (p.chart()) {
        case Chart::Natural: {
            const auto llt = detail::cholesky_or_throw(p.mat(), "natural matrix parameter");
            return 0.25 * p.vec().dot(llt.solve(p.vec())) - 0.5 * detail::log_det(llt) + 0.5 * d * std::log(std::numbers::pi);
        }
        case Chart::Ordinary: {
            const auto llt = detail::cholesky_or_throw(p.mat(), "covariance");
            return 0.5 * (p.vec().dot(llt.solve(p.vec())) + detail::log_det(llt) + d * std::log(2.0 * std::numbers::pi));
        }
        case Chart::Expectation: {
            const Mat sigma = -p.mat() - p.vec() * p.vec().transpose();
            const auto llt = detail::cholesky_or_throw(sigma, "-(eta_M + eta_v eta_v^T)");
            return 0.5 * (p.vec().dot(llt.solve(p.vec())) + detail::log_det(llt) + d * std::log(2.0 * std::numbers::pi));
        }
    }
    throw DomainError("unknown chart");
}

/// F*(eta) = -1/2 log |2 pi e Sigma|, the negative differential entropy.
inline double mvn_conjugate(const MvnParam& p) {
    const auto [mu, sigma] = detail::to_ordinary(p);
    const double d = static_cast<double>(p.dim());
    const auto llt = detail::cholesky_or_throw(sigma, "covariance");
    return -0.5 * (detail::log_det(llt) + d * std::log(2.0 * std::numbers::pi * std::numbers::e));
}

/// sqrt((x1 - x2)^T Q (x1 - x2)).
inline double mahalanobis(const Mat& q, const Vec& x1, const Vec& x2) {
    const Mat qs = detail::symmetrized(q, "Mahalanobis matrix");
    detail::cholesky_or_throw(qs, "Mahalanobis matrix");
    const Vec d = x1 - x2;
    return std::sqrt(std::max(0.0, d.dot(qs * d)));
}

inline double mvn_kl(const MvnParam& p1, const MvnParam& p2) {
    if (p1.dim() != p2.dim()) throw DomainError("mvn_kl: dimension mismatch");
    const auto [mu1, s1] = detail::to_ordinary(p1);
    const auto [mu2, s2] = detail::to_ordinary(p2);
    const auto l1 = detail::cholesky_or_throw(s1, "covariance");
    const auto l2 = detail::cholesky_or_throw(s2, "covariance");
    const Vec dm = mu2 - mu1;
    const double tr = l2.solve(s1).trace();
    const double v = 0.5 * (tr + dm.dot(l2.solve(dm)) + detail::log_det(l2) - detail::log_det(l1) - static_cast<double>(p1.dim()));
    return std::max(0.0, v);
}

/// Normalized geometric mixture: Sigma_a = ((1-a) S1^-1 + a S2^-1)^-1, mu_a = Sigma_a ((1-a) S1^-1 mu1 + a S2^-1 mu2).
inline MvnParam g_mixture_param(const MvnParam& p1, const MvnParam& p2, double alpha) {
    detail::check_alpha(alpha);
    if (p1.dim() != p2.dim()) throw DomainError("g_mixture_param: dimension mismatch");
    const auto [mu1, s1] = detail::to_ordinary(p1);
    const auto [mu2, s2] = detail::to_ordinary(p2);
    const Mat q1 = detail::inverse(detail::cholesky_or_throw(s1, "covariance"));
    const Mat q2 = detail::inverse(detail::cholesky_or_throw(s2, "covariance"));
    const Mat qa = (1.0 - alpha) * q1 + alpha * q2;
    const auto la = detail::cholesky_or_throw(qa, "interpolated precision");
    Mat sa = detail::inverse(la);
    sa = 0.5 * (sa + sa.transpose());
    Vec mua = la.solve((1.0 - alpha) * q1 * mu1 + alpha * q2 * mu2);
    return MvnParam::ordinary(std::move(mua), sa);
}

namespace detail {

inline Mat natural_matrix_block(const Vec& theta, Eigen::Index d) {
    const Mat m = Eigen::Map<const Mat>(theta.tail(d * d).data(), d, d);
    return 0.5 * (m + m.transpose());
}

inline Density mvn_untagged_density(const Vec& mu, const Mat& sigma) {
    const auto llt = cholesky_or_throw(sigma, "covariance");
    const Mat l = llt.matrixL();
    const auto d = mu.size();
    const double log_norm = 0.5 * (log_det(llt) + static_cast<double>(d) * std::log(2.0 * std::numbers::pi));
    Density out;
    out.dim = static_cast<std::size_t>(d);
    out.support = Support::real_line(out.dim);
    out.log_pdf = [mu, l, log_norm](Point x) {
        Vec r = Eigen::Map<const Vec>(x.data(), mu.size()) - mu;
        l.triangularView<Eigen::Lower>().solveInPlace(r);
        return -0.5 * r.squaredNorm() - log_norm;
    };
    out.sampler = [mu, l](Rng& rng, std::span<double> dst) {
        std::normal_distribution<double> n01;
        Vec z(mu.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = n01(rng);
        Eigen::Map<Vec>(dst.data(), mu.size()) = mu + l * z;
    };
    if (d == 1) out.features = {{mu[0], std::sqrt(sigma(0, 0))}};
    out.label = "mvn" + std::to_string(d);
    return out;
}

}  // namespace detail

/// MVN family on flat natural parameters (theta_v, vec(theta_M)).
inline ExpFamPtr mvn_spec(std::size_t d) {
    if (d == 0) throw DomainError("mvn_spec: dimension must be positive");
    auto s = std::make_shared<ExpFamSpec>();
    const auto n = static_cast<Eigen::Index>(d);
    s->name = "mvn" + std::to_string(d);
    s->dim_param = d + d * d;
    s->in_domain = [n](const Vec& t) {
        return t.allFinite() && detail::cholesky(detail::natural_matrix_block(t, n)).has_value();
    };
    s->log_normalizer = [n](const Vec& t) {
        const auto llt = detail::cholesky_or_throw(detail::natural_matrix_block(t, n), "natural matrix parameter");
        const Vec tv = t.head(n);
        return 0.25 * tv.dot(llt.solve(tv)) - 0.5 * detail::log_det(llt) + 0.5 * static_cast<double>(n) * std::log(std::numbers::pi);
    };
    s->gradient = [n](const Vec& t) {
        const auto llt = detail::cholesky_or_throw(detail::natural_matrix_block(t, n), "natural matrix parameter");
        const Mat sigma = 0.5 * detail::inverse(llt);
        const Vec mu = sigma * t.head(n);
        const Mat em = -(sigma + mu * mu.transpose());
        Vec out(n + n * n);
        out.head(n) = mu;
        out.tail(n * n) = Eigen::Map<const Vec>(em.data(), n * n);
        return out;
    };
    s->gradient_inverse = [n](const Vec& e) {
        const Vec ev = e.head(n);
        const Mat em = Eigen::Map<const Mat>(e.tail(n * n).data(), n, n);
        const Mat sigma = -0.5 * (em + em.transpose()) - ev * ev.transpose();
        const Mat prec = detail::inverse(detail::cholesky_or_throw(sigma, "-(eta_M + eta_v eta_v^T)"));
        Vec out(n + n * n);
        out.head(n) = prec * ev;
        const Mat tm = 0.5 * prec;
        out.tail(n * n) = Eigen::Map<const Vec>(tm.data(), n * n);
        return out;
    };
    s->conjugate = [n](const Vec& e) {
        const Vec ev = e.head(n);
        const Mat em = Eigen::Map<const Mat>(e.tail(n * n).data(), n, n);
        const Mat sigma = -0.5 * (em + em.transpose()) - ev * ev.transpose();
        const auto llt = detail::cholesky_or_throw(sigma, "-(eta_M + eta_v eta_v^T)");
        return -0.5 * (detail::log_det(llt) + static_cast<double>(n) * std::log(2.0 * std::numbers::pi * std::numbers::e));
    };
    s->make_density = [d](const Vec& t) {
        const auto o = mvn_convert(MvnParam::from_flat(Chart::Natural, t, d), Chart::Ordinary);
        return detail::mvn_untagged_density(o.vec(), o.mat());
    };
    s->log_density_at_zero = [d](const Vec& t) {
        const auto o = mvn_convert(MvnParam::from_flat(Chart::Natural, t, d), Chart::Ordinary);
        const std::vector<double> zero(d, 0.0);
        return detail::mvn_untagged_density(o.vec(), o.mat()).log_eval(Point(zero));
    };
    return s;
}

inline Vec mvn_natural_flat(const MvnParam& p) { return mvn_convert(p, Chart::Natural).flat(); }

inline Density mvn_density(const MvnParam& p) { return expfam_density(mvn_spec(p.dim()), mvn_natural_flat(p)); }

/// 1D normal N(mu, sigma^2) as a tagged member of the 1-variate MVN family.
inline Density gaussian_density(double mu, double sigma) {
    Vec m(1);
    m << mu;
    Mat s(1, 1);
    s << sigma * sigma;
    return mvn_density(MvnParam::ordinary(m, s));
}

// ---------------------------------------------------------------------------------------------
// One-parameter families

inline Vec scalar(double v) {
    Vec out(1);
    out << v;
    return out;
}

/// N(theta, sigma^2) with the variance fixed: F = sigma^2 theta^2 / 2 on theta = mu / sigma^2.
inline ExpFamPtr fixed_variance_gaussian_spec(double sigma = 1.0) {
    if (!(sigma > 0.0)) throw DomainError("fixed-variance Gaussian needs sigma > 0");
    auto s = std::make_shared<ExpFamSpec>();
    const double s2 = sigma * sigma;
    s->name = "gaussian-fixed-variance(" + std::to_string(sigma) + ")";
    s->dim_param = 1;
    s->in_domain = [](const Vec& t) { return std::isfinite(t[0]); };
    s->log_normalizer = [s2](const Vec& t) { return 0.5 * s2 * t[0] * t[0]; };
    s->gradient = [s2](const Vec& t) { return scalar(s2 * t[0]); };
    s->gradient_inverse = [s2](const Vec& e) { return scalar(e[0] / s2); };
    s->conjugate = [s2](const Vec& e) { return 0.5 * e[0] * e[0] / s2; };
    s->make_density = [s2, sigma](const Vec& t) { return normal_density(s2 * t[0], sigma); };
    return s;
}

/// Exponential distributions lambda e^(-lambda x) on theta = -lambda < 0: F = -log(-theta).
inline ExpFamPtr exponential_spec() {
    auto s = std::make_shared<ExpFamSpec>();
    s->name = "exponential";
    s->dim_param = 1;
    s->in_domain = [](const Vec& t) { return t[0] < 0.0 && std::isfinite(t[0]); };
    s->log_normalizer = [](const Vec& t) { return -std::log(-t[0]); };
    s->gradient = [](const Vec& t) { return scalar(-1.0 / t[0]); };
    s->gradient_inverse = [](const Vec& e) {
        if (!(e[0] > 0.0)) throw DomainError("exponential: mean must be positive");
        return scalar(-1.0 / e[0]);
    };
    s->conjugate = [](const Vec& e) { return -1.0 - std::log(e[0]); };
    s->make_density = [](const Vec& t) {
        const double rate = -t[0];
        Density d;
        d.support = Support::positive_half_line();
        d.log_pdf = [rate](Point x) {
            return x[0] < 0.0 ? -std::numeric_limits<double>::infinity() : std::log(rate) - rate * x[0];
        };
        d.sampler = [rate](Rng& rng, std::span<double> out) { out[0] = std::exponential_distribution<double>(rate)(rng); };
        d.features = {{1.0 / rate, 1.0 / rate}};
        d.label = "exponential(" + std::to_string(rate) + ")";
        return d;
    };
    return s;
}

/// Poisson on theta = log lambda (F = e^theta) over the truncated alphabet {0, ..., cells - 1}.
/// The domain keeps lambda small enough that the truncated tail is below double precision.
inline ExpFamPtr poisson_spec(std::size_t cells = 200) {
    auto s = std::make_shared<ExpFamSpec>();
    const double max_rate = static_cast<double>(cells) / 4.0;
    s->name = "poisson";
    s->dim_param = 1;
    s->in_domain = [max_rate](const Vec& t) { return std::isfinite(t[0]) && std::exp(t[0]) <= max_rate; };
    s->log_normalizer = [](const Vec& t) { return std::exp(t[0]); };
    s->gradient = [](const Vec& t) { return scalar(std::exp(t[0])); };
    s->gradient_inverse = [](const Vec& e) {
        if (!(e[0] > 0.0)) throw DomainError("poisson: mean must be positive");
        return scalar(std::log(e[0]));
    };
    s->conjugate = [](const Vec& e) { return e[0] * std::log(e[0]) - e[0]; };
    s->make_density = [cells](const Vec& t) {
        const double theta = t[0];
        const double rate = std::exp(theta);
        Density d;
        d.support = Support::finite_alphabet(cells);
        d.log_pdf = [theta, rate, cells](Point x) {
            const double k = std::round(x[0]);
            if (k < 0.0 || k >= static_cast<double>(cells)) return -std::numeric_limits<double>::infinity();
            return k * theta - rate - std::lgamma(k + 1.0);
        };
        d.sampler = [rate](Rng& rng, std::span<double> out) {
            out[0] = static_cast<double>(std::poisson_distribution<long>(rate)(rng));
        };
        d.label = "poisson(" + std::to_string(rate) + ")";
        return d;
    };
    return s;
}

}  // namespace mnjs
