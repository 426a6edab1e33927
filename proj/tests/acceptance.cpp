// Acceptance checks 1-10. `acceptance N` runs one criterion, `acceptance` runs them all.
// Each criterion prints exactly one line: "criterion N: PASS|FAIL  <detail>".

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mnjs/cauchy.hpp"
#include "mnjs/clustering.hpp"
#include "mnjs/densities.hpp"
#include "mnjs/divergences.hpp"
#include "mnjs/expfam.hpp"
#include "mnjs/reference_table.hpp"
#include "mnjs/verify.hpp"
#include "mnjs/wmixture.hpp"

using namespace mnjs;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome summarize(const std::vector<VerifyCase>& cases) {
    std::size_t failed = 0;
    double worst = 0.0;
    const VerifyCase* first_fail = nullptr;
    for (const auto& c : cases) {
        if (!c.pass) {
            ++failed;
            if (!first_fail) first_fail = &c;
        }
        worst = std::max(worst, c.abs_diff);
    }
    std::string d = std::to_string(cases.size() - failed) + "/" + std::to_string(cases.size()) + " cases, max |diff| " + num(worst, 3);
    if (first_fail) d += "; first failure '" + first_fail->name + "' diff " + num(first_fail->abs_diff, 3) + " > tol " + num(first_fail->tolerance, 3);
    return {failed == 0, d};
}

// ---------------------------------------------------------------------------------------------

Outcome criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<TableRow> rows = conversion_rows();
    const auto g = gjsd_rows();
    rows.insert(rows.end(), g.begin(), g.end());
    const double t = seconds_since(t0);
    std::size_t bad = 0;
    for (const auto& r : rows) bad += r.pass() ? 0 : 1;
    const bool pass = bad == 0 && t < 1.0;
    return {pass, std::to_string(rows.size() - bad) + "/" + std::to_string(rows.size()) + " rows; G-JSD " + num(g[0].value, 8) +
                      ", dual " + num(g[1].value, 8) + "; " + num(t, 2) + " s"};
}

Outcome criterion2() {
    const auto t0 = std::chrono::steady_clock::now();
    const double a = harmonic_jsd(CauchyScale(0.1), CauchyScale(0.5));
    const double b = harmonic_jsd(CauchyScale(0.2), CauchyScale(0.8));
    // Independent check of the harmonic JSD itself by quadrature.
    const OracleConfig cfg;
    const double oa = m_jsd(WeightedMean::harmonic(), 0.5, untagged(cauchy_density(0.1)), untagged(cauchy_density(0.5)), cfg);
    const double t = seconds_since(t0);
    const bool pass = std::abs(a - 0.176) <= 1e-3 && std::abs(b - 0.129) <= 1e-3 && t < 1.0;
    return {pass, "JS^H(0.1,0.5)=" + num(a) + " (target 0.176, quadrature " + num(oa) + "), JS^H(0.2,0.8)=" + num(b) +
                      " (target 0.129); midpoint-scale expression gives " + num(midpoint_scale_jsd(CauchyScale(0.1), CauchyScale(0.5))) +
                      " / " + num(midpoint_scale_jsd(CauchyScale(0.2), CauchyScale(0.8))) + "; " + num(t, 2) + " s"};
}

Outcome criterion3() {
    const auto t0 = std::chrono::steady_clock::now();
    auto cases = verify_gjs_mvn(1, 50, 3);
    const auto c2 = verify_gjs_mvn(2, 20, 3);
    cases.insert(cases.end(), c2.begin(), c2.end());
    Outcome o = summarize(cases);
    const double t = seconds_since(t0);
    o.pass = o.pass && t < 120.0;
    o.detail += "; " + num(t, 3) + " s";
    return o;
}

Outcome criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o = summarize(verify_hjs_cauchy(20, {0.1, 0.3, 0.5, 0.7, 0.9}, 4));
    const double t = seconds_since(t0);
    o.pass = o.pass && t < 30.0;
    o.detail += "; " + num(t, 3) + " s";
    return o;
}

Outcome criterion5() { return summarize(verify_bhat_jensen(4, {0.1, 0.3, 0.5, 0.7, 0.9}, 5)); }

Outcome criterion6() {
    const OracleConfig cfg;
    const WMixtureFamily two_normals({normal_density(-1.0, 0.7), normal_density(1.5, 1.2)});
    struct Pair {
        std::string name;
        Density p, q;
        double alpha;
    };
    const std::vector<Pair> pairs = {
        {"cauchy(0.5) vs normal(0,1)", cauchy_density(0.5), normal_density(0.0, 1.0), 0.5},
        {"cauchy(1) vs normal(1,2)", cauchy_density(1.0), normal_density(1.0, 2.0), 0.3},
        {"normal(0,0.5) vs cauchy(2)", normal_density(0.0, 0.5), cauchy_density(2.0), 0.7},
        {"cauchy_ls(1,0.3) vs normal(-1,1)", cauchy_ls_density({1.0, 0.3}), normal_density(-1.0, 1.0), 0.2},
        {"cauchy_ls(0,1) vs cauchy_ls(2,0.5)", cauchy_ls_density({0.0, 1.0}), cauchy_ls_density({2.0, 0.5}), 0.5},
        {"cauchy(0.1) vs cauchy(0.5)", cauchy_density(0.1), cauchy_density(0.5), 0.9},
        {"normal mixture vs cauchy(1)", two_normals.mixture_density(scalar(0.4)), cauchy_density(1.0), 0.5},
        {"normal mixture vs normal(0,1)", two_normals.mixture_density(scalar(0.7)), normal_density(0.0, 1.0), 0.4},
        {"uniform(-1,1) vs normal(0,1)", uniform_density(-1.0, 1.0), normal_density(0.0, 1.0), 0.5},
        {"exponential(1) vs exponential(3)", expfam_density(exponential_spec(), scalar(-1.0)),
         expfam_density(exponential_spec(), scalar(-3.0)), 0.6},
    };
    const DivergenceFunctional kl_star = reverse(kl_functional(cfg, KlBackend::Oracle));
    std::size_t bad = 0;
    double worst = 0.0;
    std::string first;
    for (const auto& pr : pairs) {
        const Density p = untagged(pr.p), q = untagged(pr.q);
        const MMixture m = m_mixture(p, q, WeightedMean::geometric(), pr.alpha, cfg);
        const KlEstimate a = kl_estimate(m.density, p, cfg), b = kl_estimate(m.density, q, cfg);
        const double lhs = (1.0 - pr.alpha) * a.value + pr.alpha * b.value;
        const double same = js_symmetrization(kl_star, WeightedMean::geometric(), pr.alpha, p, q, cfg);
        const IntegralEstimate bc = bhattacharyya_coefficient(p, q, pr.alpha, cfg);
        const double rhs = -std::log(bc.value);
        // Errors of the two KL integrals, the normalizer (relative, inside the logs) and the coefficient.
        const double tol = 3.0 * ((1.0 - pr.alpha) * a.abs_error + pr.alpha * b.abs_error + m.Z.abs_error / m.Z.value +
                                  bc.abs_error / bc.value) + 4.0 * cfg.abs_tol;
        const double diff = std::max(std::abs(lhs - rhs), std::abs(same - rhs));
        worst = std::max(worst, diff);
        if (!(diff <= tol)) {
            ++bad;
            if (first.empty()) first = pr.name + " diff " + num(diff, 3) + " > " + num(tol, 3);
        }
    }
    return {bad == 0, std::to_string(pairs.size() - bad) + "/" + std::to_string(pairs.size()) + " pairs, max |diff| " + num(worst, 3) +
                          (first.empty() ? "" : "; first failure " + first)};
}

Outcome criterion7() {
    const OracleConfig cfg;
    Rng rng(7);
    std::uniform_real_distribution<double> um(-2.0, 2.0), us(0.4, 2.5);
    std::size_t bad = 0;
    double worst_gap = 0.0, worst_alpha = 0.0, worst_value = 0.0;
    std::string first;
    for (int i = 0; i < 10; ++i) {
        const Density p = untagged(gaussian_density(um(rng), us(rng)));
        const Density q = untagged(gaussian_density(um(rng), us(rng)));
        ChernoffConfig cc;
        cc.oracle = cfg;
        const ChernoffResult r = chernoff_information(p, q, cc);
        // Recompute the optimality gap independently: normalized geometric mixture and two oracle KLs.
        const MMixture m = m_mixture(p, q, WeightedMean::geometric(), r.alpha_star, cfg);
        const double gap = std::abs(kl(m.density, p, cfg) - kl(m.density, q, cfg));
        worst_gap = std::max(worst_gap, gap);
        if (!(gap <= 1e-6)) {
            ++bad;
            if (first.empty()) first = "pair " + std::to_string(i) + " gap " + num(gap, 3);
        }
    }
    for (int i = 0; i < 5; ++i) {
        const double sigma = us(rng), m1 = um(rng), m2 = um(rng) + 0.5;
        const Density p = untagged(gaussian_density(m1, sigma)), q = untagged(gaussian_density(m2, sigma));
        ChernoffConfig cc;
        cc.oracle = cfg;
        const ChernoffResult r = chernoff_information(p, q, cc);
        // Grid-scan oracle on a 1e-3 lattice.
        double best_a = 0.0, best_b = -1.0;
        for (int k = 1; k < 1000; ++k) {
            const double a = k / 1000.0;
            const double b = bhattacharyya(p, q, a, cfg);
            if (b > best_b) {
                best_b = b;
                best_a = a;
            }
        }
        const double expected = (m1 - m2) * (m1 - m2) / (8.0 * sigma * sigma);
        worst_alpha = std::max(worst_alpha, std::abs(r.alpha_star - 0.5));
        worst_value = std::max(worst_value, std::abs(r.value - expected));
        if (!(std::abs(r.alpha_star - 0.5) <= 1e-4 && std::abs(r.value - expected) <= 1e-6 && std::abs(best_a - r.alpha_star) <= 1e-3)) {
            ++bad;
            if (first.empty()) first = "equal-variance pair " + std::to_string(i);
        }
    }
    return {bad == 0, "max KL gap " + num(worst_gap, 3) + "; equal-variance max |alpha*-1/2| " + num(worst_alpha, 3) +
                          ", max |value - dmu^2/8s^2| " + num(worst_value, 3) + (first.empty() ? "" : "; first failure " + first)};
}

Outcome criterion8() { return summarize(verify_wmix_jsd(10, 5, 8)); }

// --- 9: property suites --------------------------------------------------------------------

std::vector<double> random_probs(std::size_t n, Rng& rng) {
    std::gamma_distribution<double> g(0.7, 1.0);
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
        v = g(rng) + 1e-12;
        s += v;
    }
    for (auto& v : p) v /= s;
    return p;
}

Outcome criterion9() {
    Rng rng(9);
    std::vector<std::string> failures;
    // Means: in-betweenness and the AGH chain.
    {
        std::uniform_real_distribution<double> le(-8.0, 8.0), ua(0.0, 1.0);
        const std::vector<WeightedMean> means = {WeightedMean::arithmetic(), WeightedMean::geometric(), WeightedMean::harmonic(),
                                                 WeightedMean::power(2.0), WeightedMean::power(-0.5), WeightedMean::power(3.0)};
        std::size_t v = 0;
        for (int i = 0; i < 10000; ++i) {
            const double x = std::exp(le(rng)), y = std::exp(le(rng)), a = ua(rng);
            const double lo = std::min(x, y), hi = std::max(x, y);
            for (const auto& m : means) {
                const double r = m.evaluate(x, y, a);
                if (r < lo * (1.0 - 1e-12) || r > hi * (1.0 + 1e-12)) ++v;
            }
            const double A = means[0].evaluate(x, y, a), G = means[1].evaluate(x, y, a), H = means[2].evaluate(x, y, a);
            if (H > G * (1.0 + 1e-12) || G > A * (1.0 + 1e-12)) ++v;
        }
        if (v) failures.push_back(std::to_string(v) + " mean violations");
    }
    // sqrt(JSD) triangle inequality on categorical triples.
    {
        std::size_t v = 0;
        for (int i = 0; i < 1000; ++i) {
            const std::size_t n = 2 + static_cast<std::size_t>(i % 7);
            const auto p = random_probs(n, rng), q = random_probs(n, rng), r = random_probs(n, rng);
            const double pq = std::sqrt(categorical_jsd(p, q)), qr = std::sqrt(categorical_jsd(q, r)), pr = std::sqrt(categorical_jsd(p, r));
            if (pr > pq + qr + 1e-12) ++v;
        }
        if (v) failures.push_back(std::to_string(v) + " triangle violations");
    }
    // JSD <= log 2 and the Power(2) bound log(Z/(1-a)) (a >= 1/2, where that bound is valid).
    {
        std::size_t v = 0;
        for (int i = 0; i < 200; ++i) {
            const auto p = random_probs(5, rng), q = random_probs(5, rng);
            if (categorical_jsd(p, q) > std::log(2.0) + 1e-12) ++v;
        }
        const OracleConfig cfg;
        const std::vector<std::pair<Density, Density>> pairs = {
            {cauchy_density(0.2), cauchy_density(0.8)},
            {normal_density(0.0, 1.0), normal_density(2.0, 0.5)},
            {cauchy_density(1.0), normal_density(0.5, 1.0)},
            {categorical_density({0.1, 0.6, 0.3}), categorical_density({0.5, 0.2, 0.3})},
        };
        for (const auto& [p0, q0] : pairs) {
            const Density p = untagged(p0), q = untagged(q0);
            if (jsd(p, q, cfg) > std::log(2.0) + 1e-9) ++v;
            for (double a : {0.5, 0.7, 0.9}) {
                const double bound = m_jsd_upper_bound(WeightedMean::power(2.0), a, p, q, cfg);
                const double val = m_jsd(WeightedMean::power(2.0), a, p, q, cfg);
                if (val > bound + 1e-9) ++v;
            }
        }
        if (v) failures.push_back(std::to_string(v) + " JSD bound violations");
    }
    // Fenchel-Young, gradient finite differences and chart roundtrips on random MVN points.
    {
        std::size_t fy = 0, grad = 0, trip = 0;
        double worst_fy = 0.0, worst_grad = 0.0, worst_trip = 0.0;
        for (int i = 0; i < 100; ++i) {
            const std::size_t d = 1 + static_cast<std::size_t>(i % 3);
            const MvnParam lam = detail::random_mvn(d, rng);
            const auto spec = mvn_spec(d);
            const Vec theta = mvn_natural_flat(lam);
            const Vec eta = spec->grad(theta);
            const double gap = std::abs(spec->F(theta) + spec->conjugate(eta) - theta.dot(eta));
            worst_fy = std::max(worst_fy, gap);
            if (gap > 1e-9) ++fy;
            // Central differences along each coordinate, perturbing symmetric pairs together.
            const Vec g = spec->grad(theta);
            Vec fd(theta.size());
            for (Eigen::Index j = 0; j < theta.size(); ++j) {
                const double h = 1e-5 * std::max(1.0, std::abs(theta[j]));
                Vec a = theta, b = theta;
                a[j] += h;
                b[j] -= h;
                fd[j] = (spec->F(a) - spec->F(b)) / (2.0 * h);
            }
            // F reads theta_M through its symmetric part, so each flat partial equals the symmetric gradient entry.
            const Vec& expect = g;
            const double rel = (fd - expect).norm() / std::max(1.0, expect.norm());
            worst_grad = std::max(worst_grad, rel);
            if (rel > 1e-6) ++grad;
            for (Chart a : {Chart::Ordinary, Chart::Natural, Chart::Expectation}) {
                for (Chart b : {Chart::Ordinary, Chart::Natural, Chart::Expectation}) {
                    const MvnParam back = mvn_convert(mvn_convert(mvn_convert(lam, a), b), Chart::Ordinary);
                    const double err = std::max((back.vec() - lam.vec()).norm() / std::max(1.0, lam.vec().norm()),
                                                (back.mat() - lam.mat()).norm() / std::max(1.0, lam.mat().norm()));
                    worst_trip = std::max(worst_trip, err);
                    if (err > 1e-10) ++trip;
                }
            }
        }
        if (fy) failures.push_back(std::to_string(fy) + " Fenchel-Young gaps (max " + num(worst_fy, 3) + ")");
        if (grad) failures.push_back(std::to_string(grad) + " gradient mismatches (max " + num(worst_grad, 3) + ")");
        if (trip) failures.push_back(std::to_string(trip) + " roundtrip errors (max " + num(worst_trip, 3) + ")");
    }
    std::string d = failures.empty() ? "means, sqrt-JSD triangle, JSD bounds, Fenchel-Young, gradient and roundtrip suites clean" : "";
    for (const auto& f : failures) d += (d.empty() ? "" : "; ") + f;
    return {failures.empty(), d};
}

// --- 10: clustering ------------------------------------------------------------------------

double brute_force_optimum(const std::vector<Vec>& pts) {
    const std::size_t n = pts.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t mask = 1; mask + 1 < (std::size_t{1} << n); ++mask) {
        Vec c[2] = {Vec::Zero(pts[0].size()), Vec::Zero(pts[0].size())};
        double cnt[2] = {0, 0};
        for (std::size_t i = 0; i < n; ++i) {
            const int g = (mask >> i) & 1U;
            c[g] += pts[i];
            cnt[g] += 1;
        }
        c[0] /= cnt[0];
        c[1] /= cnt[1];
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += (pts[i] - c[(mask >> i) & 1U]).squaredNorm();
        best = std::min(best, s / static_cast<double>(n));
    }
    return best;
}

Outcome criterion10() {
    Rng rng(10);
    std::normal_distribution<double> n01;
    std::size_t violations = 0;
    for (int t = 0; t < 100; ++t) {
        ClusterProblem pb;
        const std::size_t n = 10 + static_cast<std::size_t>(t % 30);
        const bool gaussian = t % 2 == 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (gaussian) {
                Vec lam(2);
                lam << 2.0 * n01(rng), std::exp(0.5 * n01(rng));
                pb.points.push_back(mvn_natural_flat(MvnParam::ordinary(scalar(lam[0]), Mat::Constant(1, 1, lam[1]))));
            } else {
                Vec x(2);
                x << n01(rng) + 4.0 * (i % 3), n01(rng);
                pb.points.push_back(x);
            }
        }
        pb.k = 2 + static_cast<std::size_t>(t % 4);
        pb.seed = static_cast<std::uint64_t>(t);
        if (gaussian) {
            const auto spec = mvn_spec(1);
            pb.divergence = bregman_divergence(spec);
            pb.in_domain = spec->in_domain;
        } else {
            pb.divergence = squared_euclidean();
        }
        const ClusterResult r = lloyd(pb, seed_kmeanspp(pb), right_bregman_centroid());
        for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
            if (r.objective_trace[i] > r.objective_trace[i - 1] + 1e-12) ++violations;
        }
    }
    std::vector<Vec> pts;
    const double raw[][2] = {{0.0, 0.0}, {1.0, 0.3}, {0.4, 1.1}, {3.1, 2.9}, {4.0, 3.4}, {3.5, 4.2}};
    for (const auto& r : raw) {
        Vec v(2);
        v << r[0], r[1];
        pts.push_back(v);
    }
    const double opt = brute_force_optimum(pts);
    int hits = 0;
    for (int s = 0; s < 100; ++s) {
        ClusterProblem pb;
        pb.points = pts;
        pb.k = 2;
        pb.seed = static_cast<std::uint64_t>(s);
        pb.divergence = squared_euclidean();
        const ClusterResult r = lloyd(pb, seed_kmeanspp(pb), right_bregman_centroid());
        if (r.objective_trace.back() <= opt + 1e-12) ++hits;
    }
    return {violations == 0 && hits >= 90, std::to_string(violations) + " monotonicity violations over 100 problems; optimum " +
                                               num(opt) + " reached in " + std::to_string(hits) + "/100 seeds (n=6, k=2)"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                            criterion6, criterion7, criterion8, criterion9, criterion10};
    std::vector<int> which;
    if (argc > 1) {
        for (int i = 1; i < argc; ++i) {
            const int n = std::atoi(argv[i]);
            if (n < 1 || n > 10) {
                std::cerr << "usage: acceptance [1-10 ...]\n";
                return 2;
            }
            which.push_back(n);
        }
    } else {
        for (int i = 1; i <= 10; ++i) which.push_back(i);
    }
    set_warning_sink([](const std::string& msg) { std::cerr << "warning: " << msg << "\n"; });
    bool all = true;
    for (int n : which) {
        Outcome o;
        try {
            o = criteria[static_cast<std::size_t>(n - 1)]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
    }
    return all ? 0 : 1;
}
