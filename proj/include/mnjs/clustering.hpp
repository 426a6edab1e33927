#pragma once

// k-means over parameter vectors with an arbitrary divergence: k-means++ seeding, Lloyd iterations,
// right-sided Bregman and Jensen (CCCP) centroids, and a sampled estimate of the Hessian-ratio constants.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mnjs/common.hpp"
#include "mnjs/expfam.hpp"

namespace mnjs {

/// D(point : center) on parameter vectors.
using ParamDivergence = std::function<double(const Vec&, const Vec&)>;

/// Given member points and weights, returns the cluster representative.
using CentroidSolver = std::function<Vec(const std::vector<Vec>&, const std::vector<double>&)>;

struct ClusterProblem {
    std::vector<Vec> points;
    ParamDivergence divergence;
    std::size_t k = 1;
    std::uint64_t seed = 0;
    int max_iters = 100;
    double tol = 1e-12;
    std::string family = "raw";
    std::function<bool(const Vec&)> in_domain;  // optional

    void validate() const {
        if (points.empty()) throw DomainError("clustering needs at least one point");
        if (k == 0 || k > points.size()) throw DomainError("k must lie in [1, number of points]");
        if (!divergence) throw DomainError("clustering needs a divergence");
        for (const auto& p : points) {
            if (p.size() != points[0].size()) throw DomainError("all points must have the same dimension");
            if (in_domain && !in_domain(p)) throw DomainError("a point lies outside the family's domain");
        }
    }
};

struct ClusterResult {
    std::vector<Vec> centers;
    std::vector<std::size_t> assignment;
    std::vector<double> objective_trace;
    int iterations = 0;
};

inline ParamDivergence squared_euclidean() {
    return [](const Vec& a, const Vec& b) { return (a - b).squaredNorm(); };
}

/// D(point : center) = B_F(point : center), the KL(p_center : p_point) of the family.
inline ParamDivergence bregman_divergence(ExpFamPtr spec) {
    return [spec](const Vec& a, const Vec& b) { return bregman(*spec, a, b); };
}

/// Index of the nearest center under D(point : center); ties go to the lowest index.
inline std::pair<std::size_t, double> nearest_center(const ClusterProblem& pb, const Vec& x, const std::vector<Vec>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        const double d = pb.divergence(x, centers[j]);
        if (d < best_d) {
            best_d = d;
            best = j;
        }
    }
    return {best, best_d};
}

inline std::vector<std::size_t> assign(const ClusterProblem& pb, const std::vector<Vec>& centers) {
    std::vector<std::size_t> a(pb.points.size());
    for (std::size_t i = 0; i < pb.points.size(); ++i) a[i] = nearest_center(pb, pb.points[i], centers).first;
    return a;
}

/// E_D = (1/n) sum_i min_j D(p_i : c_j).
inline double objective(const ClusterProblem& pb, const std::vector<Vec>& centers) {
    if (centers.empty()) throw DomainError("objective needs at least one center");
    for (const auto& c : centers) {
        if (pb.in_domain && !pb.in_domain(c)) throw DomainError("a center lies outside the family's domain");
    }
    double s = 0.0;
    for (const auto& x : pb.points) s += nearest_center(pb, x, centers).second;
    return s / static_cast<double>(pb.points.size());
}

/// k-means++: first center uniform, then each next one drawn with probability proportional to D(p, C).
inline std::vector<Vec> seed_kmeanspp(const ClusterProblem& pb) {
    pb.validate();
    std::mt19937_64 rng(pb.seed);
    const std::size_t n = pb.points.size();
    std::vector<Vec> centers;
    std::vector<bool> taken(n, false);
    std::size_t first = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    centers.push_back(pb.points[first]);
    taken[first] = true;
    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i) dist[i] = std::max(0.0, pb.divergence(pb.points[i], centers[0]));
    while (centers.size() < pb.k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) total += taken[i] ? 0.0 : dist[i];
        std::size_t pick = n;
        if (total > 0.0 && std::isfinite(total)) {
            std::vector<double> w(n);
            for (std::size_t i = 0; i < n; ++i) w[i] = taken[i] ? 0.0 : dist[i];
            pick = std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng);
        } else {
            warn("k-means++ seeding: remaining points coincide with the chosen centers; copying a point");
            for (std::size_t i = 0; i < n && pick == n; ++i) {
                if (!taken[i]) pick = i;
            }
        }
        taken[pick] = true;
        centers.push_back(pb.points[pick]);
        for (std::size_t i = 0; i < n; ++i) dist[i] = std::min(dist[i], std::max(0.0, pb.divergence(pb.points[i], centers.back())));
    }
    return centers;
}

/// Weighted arithmetic mean: the exact minimizer of sum_i w_i B_F(x_i : c) for any F (and of squared Euclidean).
inline CentroidSolver right_bregman_centroid() {
    return [](const std::vector<Vec>& xs, const std::vector<double>& ws) {
        Vec c = Vec::Zero(xs.front().size());
        double total = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            c += ws[i] * xs[i];
            total += ws[i];
        }
        return Vec(c / total);
    };
}

/// Lloyd iterations. An emptied cluster is reseeded at the point farthest from its current center.
inline ClusterResult lloyd(const ClusterProblem& pb, std::vector<Vec> centers, const CentroidSolver& solver) {
    pb.validate();
    if (centers.size() != pb.k) throw DomainError("lloyd: expected k initial centers");
    ClusterResult r;
    r.assignment = assign(pb, centers);
    r.objective_trace.push_back(objective(pb, centers));
    for (int it = 0; it < pb.max_iters; ++it) {
        std::vector<std::vector<Vec>> members(pb.k);
        for (std::size_t i = 0; i < pb.points.size(); ++i) members[r.assignment[i]].push_back(pb.points[i]);
        std::vector<std::size_t> empty;
        for (std::size_t j = 0; j < pb.k; ++j) {
            if (members[j].empty()) {
                empty.push_back(j);
                continue;
            }
            centers[j] = solver(members[j], std::vector<double>(members[j].size(), 1.0));
            if (pb.in_domain && !pb.in_domain(centers[j])) throw DomainError("centroid solver left the domain");
        }
        for (std::size_t j : empty) {
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < pb.points.size(); ++i) {
                const double d = nearest_center(pb, pb.points[i], centers).second;
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            centers[j] = pb.points[far];
        }
        auto next = assign(pb, centers);
        const double obj = objective(pb, centers);
        const double prev = r.objective_trace.back();
        r.objective_trace.push_back(obj);
        r.iterations = it + 1;
        const bool same = next == r.assignment && empty.empty();
        r.assignment = std::move(next);
        if (same || std::abs(prev - obj) <= pb.tol * std::max(std::abs(prev), 1e-300)) break;
    }
    r.centers = std::move(centers);
    return r;
}

// ---------------------------------------------------------------------------------------------
// Jensen centroids

class NonInvertibleGradient : public DomainError {
public:
    using DomainError::DomainError;
};

/// sum_i w_i J_F^a(theta_i : c).
inline double jensen_objective(const ExpFamSpec& spec, const std::vector<Vec>& thetas, const std::vector<double>& weights,
                               double alpha, const Vec& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < thetas.size(); ++i) s += weights[i] * jensen_skew(spec, thetas[i], c, alpha).value;
    return s;
}

namespace detail {

/// (grad F)^-1(eta): closed form when the family provides one, otherwise bisection for one-parameter families.
inline Vec invert_gradient(const ExpFamSpec& spec, const Vec& eta, const Vec& start) {
    if (spec.gradient_inverse) {
        Vec t;
        try {
            t = spec.gradient_inverse(eta);
        } catch (const DomainError& e) {
            throw NonInvertibleGradient(std::string("gradient inversion failed: ") + e.what());
        }
        if (!t.allFinite() || !spec.in_domain(t)) throw NonInvertibleGradient("gradient inversion left the domain");
        return t;
    }
    if (spec.dim_param != 1) throw NonInvertibleGradient(spec.name + ": no gradient inverse for a multi-parameter family");
    auto g = [&](double t) { return spec.grad(scalar(t))[0] - eta[0]; };
    double lo = start[0], hi = start[0];
    double step = std::max(1.0, std::abs(start[0])) * 1e-3;
    const double g0 = g(start[0]);
    if (g0 == 0.0) return start;
    // grad F is increasing: walk toward the root until the sign flips or the domain ends.
    const double dir = g0 < 0.0 ? 1.0 : -1.0;
    double far = start[0];
    for (int i = 0; i < 200; ++i) {
        const double cand = far + dir * step;
        if (!spec.in_domain(scalar(cand))) {
            step *= 0.5;
            if (step < 1e-300) break;
            continue;
        }
        far = cand;
        if ((g(far) > 0.0) != (g0 > 0.0)) break;
        step *= 2.0;
    }
    if ((g(far) > 0.0) == (g0 > 0.0)) throw NonInvertibleGradient(spec.name + ": could not bracket the gradient inverse");
    lo = std::min(start[0], far);
    hi = std::max(start[0], far);
    for (int i = 0; i < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return scalar(0.5 * (lo + hi));
}

}  // namespace detail

/// Convex-concave fixed point c <- (grad F)^-1(sum_i w_i grad F((theta_i c)_a)), started at the arithmetic mean.
/// Stops after `iters` steps or when successive iterates differ by less than 1e-10.
inline Vec jensen_centroid_cccp(const ExpFamSpec& spec, const std::vector<Vec>& thetas, const std::vector<double>& weights,
                                double alpha, int iters = 100) {
    if (thetas.empty() || thetas.size() != weights.size()) throw DomainError("jensen_centroid_cccp: need one weight per point");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("jensen_centroid_cccp needs alpha in (0, 1)");
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw DomainError("jensen_centroid_cccp: weights must have positive sum");
    Vec c = Vec::Zero(thetas[0].size());
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        spec.require_domain(thetas[i]);
        c += (weights[i] / total) * thetas[i];
    }
    const Vec start = c;
    for (int it = 0; it < iters; ++it) {
        Vec eta = Vec::Zero(c.size());
        for (std::size_t i = 0; i < thetas.size(); ++i) eta += (weights[i] / total) * spec.grad(lerp(thetas[i], c, alpha));
        const Vec next = detail::invert_gradient(spec, eta, c);
        const double diff = (next - c).norm();
        c = next;
        if (diff < 1e-10) break;
    }
    if (jensen_objective(spec, thetas, weights, alpha, c) > jensen_objective(spec, thetas, weights, alpha, start)) {
        return start;
    }
    return c;
}

// ---------------------------------------------------------------------------------------------
// Hessian-ratio constants

struct KappaEstimate {
    double kappa1 = 1.0;
    double kappa2 = 1.0;
    double min_norm = 0.0;
    double max_norm = 0.0;
};

/// Spectral norm of the Hessian of F, from central differences of grad F.
inline double hessian_norm(const ExpFamSpec& spec, const Vec& theta) {
    const auto n = theta.size();
    Mat h(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(theta[j]));
        Vec a = theta, b = theta;
        a[j] += step;
        b[j] -= step;
        if (!spec.in_domain(b)) {
            h.col(j) = (spec.grad(a) - spec.grad(theta)) / step;
        } else if (!spec.in_domain(a)) {
            h.col(j) = (spec.grad(theta) - spec.grad(b)) / step;
        } else {
            h.col(j) = (spec.grad(a) - spec.grad(b)) / (2.0 * step);
        }
    }
    const Mat sym = 0.5 * (h + h.transpose());
    return Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
}

/// Sampled max/min ratio of Hessian spectral norms over random convex combinations of the inputs.
/// A sampled estimate only; both constants get the same ratio.
inline KappaEstimate kappa_estimate(const ExpFamSpec& spec, const std::vector<Vec>& thetas, std::size_t samples = 256,
                                    std::uint64_t seed = 0) {
    if (thetas.empty()) throw DomainError("kappa_estimate needs at least one parameter");
    for (const auto& t : thetas) spec.require_domain(t);
    std::mt19937_64 rng(seed);
    std::gamma_distribution<double> gam(1.0, 1.0);
    std::vector<Vec> probe = thetas;
    for (std::size_t s = 0; s < samples; ++s) {
        Vec x = Vec::Zero(thetas[0].size());
        double total = 0.0;
        std::vector<double> w(thetas.size());
        for (auto& v : w) {
            v = gam(rng);
            total += v;
        }
        for (std::size_t i = 0; i < thetas.size(); ++i) x += (w[i] / total) * thetas[i];
        probe.push_back(std::move(x));
    }
    KappaEstimate k;
    k.min_norm = std::numeric_limits<double>::infinity();
    for (const auto& x : probe) {
        const double v = hessian_norm(spec, x);
        k.min_norm = std::min(k.min_norm, v);
        k.max_norm = std::max(k.max_norm, v);
    }
    if (!(k.min_norm > 1e-12 * std::max(1.0, k.max_norm))) {
        warn("kappa_estimate: Hessian is numerically singular at a sampled point");
        k.kappa1 = k.kappa2 = std::numeric_limits<double>::infinity();
        return k;
    }
    const double ratio = std::max(1.0, k.max_norm / k.min_norm);
    // Finite differences of a quadratic F give a ratio within rounding of 1.
    k.kappa1 = k.kappa2 = ratio < 1.0 + 1e-6 ? 1.0 : ratio;
    return k;
}

}  // namespace mnjs
