// mnjs command-line tool: div, verify, chernoff, cluster, paper-table.
// Exit codes: 0 ok, 1 verification failure, 2 usage or input error, 3 numerical failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mnjs/clustering.hpp"
#include "mnjs/io.hpp"
#include "mnjs/reference_table.hpp"
#include "mnjs/verify.hpp"

using namespace mnjs;

namespace {

constexpr int kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumeric = 3;

struct Common {
    double tol = 1e-10;
    std::size_t mc_samples = 200'000;
    std::uint64_t seed = 0;
    std::string output;

    OracleConfig oracle() const {
        OracleConfig c;
        c.abs_tol = tol;
        c.mc_samples = mc_samples;
        c.seed = seed;
        return c;
    }
};

void emit(const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write '" + path + "'");
    out << text;
}

void emit_error(const std::string& kind, const std::string& msg) {
    std::cerr << json{{"error", kind}, {"message", msg}}.dump() << "\n";
}

// ---------------------------------------------------------------------------------------------
// div

struct DivArgs {
    std::string d = "kl";
    std::string m = "arithmetic";
    std::string n = "arithmetic";
    double alpha = 0.5;
    double beta = 0.5;
    bool force_oracle = false;
    std::string p, q;
};

struct Value {
    double value;
    bool closed;
};

std::shared_ptr<const ExpFamPoint> same_expfam(const Density& p, const Density& q) {
    auto a = p.family_as<ExpFamPoint>();
    auto b = q.family_as<ExpFamPoint>();
    if (a && b && a->same_family(*b)) return a;
    return nullptr;
}

std::optional<std::pair<CauchyScale, CauchyScale>> centered_cauchys(const Density& p, const Density& q) {
    auto a = p.family_as<CauchyPoint>();
    auto b = q.family_as<CauchyPoint>();
    if (!a || !b || a->params().l != 0.0 || b->params().l != 0.0) return std::nullopt;
    return std::make_pair(CauchyScale(a->params().gamma), CauchyScale(b->params().gamma));
}

Value evaluate_div(const DivArgs& a, const Density& p0, const Density& q0, const OracleConfig& cfg) {
    // --oracle drops the parametric tags so every step runs through quadrature or Monte Carlo.
    const Density p = a.force_oracle ? untagged(p0) : p0;
    const Density q = a.force_oracle ? untagged(q0) : q0;
    const auto ef = same_expfam(p, q);
    const Vec tq = ef ? q.family_as<ExpFamPoint>()->theta() : Vec();
    const WeightedMean m = WeightedMean::parse(a.m), n = WeightedMean::parse(a.n);
    const DivergenceFunctional kl_d = kl_functional(cfg);
    const bool kl_closed_both = kl_closed(p, q).has_value() && kl_closed(q, p).has_value();

    if (a.d == "kl") return {kl_auto(p, q, cfg), kl_closed(p, q).has_value()};
    if (a.d == "gjs" || (a.d == "js" && m.is_geometric())) {
        if (ef) return {g_jsd(*ef->spec(), ef->theta(), tq, a.alpha), true};
        return {m_jsd(WeightedMean::geometric(), a.alpha, p, q, cfg), false};
    }
    if (a.d == "gjs-dual") {
        if (ef) return {g_jsd_dual(*ef->spec(), ef->theta(), tq, a.alpha), true};
        return {js_symmetrization(reverse(kl_d), WeightedMean::geometric(), a.alpha, p, q, cfg), false};
    }
    if (a.d == "js") {
        if (m.is_harmonic()) {
            if (auto c = centered_cauchys(p, q)) return {harmonic_jsd(c->first, c->second, a.alpha), true};
        }
        return {m_jsd(m, a.alpha, p, q, cfg), false};
    }
    if (a.d == "mnjs") return {mn_js(kl_d, m, a.alpha, n, a.beta, p, q, cfg), false};
    if (a.d == "njeffreys") return {n_jeffreys(kl_d, n, a.beta, p, q), kl_closed_both};
    if (a.d == "jeffreys") return {jeffreys(p, q, cfg), kl_closed_both};
    if (a.d == "resistor") return {resistor(p, q, cfg), kl_closed_both};
    if (a.d == "bhattacharyya") {
        if (ef) return {jensen_skew(*ef->spec(), ef->theta(), tq, a.alpha).value, true};
        return {bhattacharyya(p, q, a.alpha, cfg), false};
    }
    if (a.d == "hellinger") return {hellinger(p, q, cfg), false};
    if (a.d == "alpha") return {alpha_divergence(p, q, a.alpha, cfg), false};
    throw ParseError("unknown divergence '" + a.d + "'");
}

int cmd_div(const DivArgs& a, const Common& c) {
    const OracleConfig cfg = c.oracle();
    const ParsedDensity p = parse_density(a.p), q = parse_density(a.q);
    const Value v = evaluate_div(a, p.density, q.density, cfg);
    json out{{"divergence", a.d},
             {"value", v.value},
             {"method", v.closed ? "closed_form" : "oracle"},
             {"tolerance", v.closed ? 1e-12 : cfg.abs_tol},
             {"p", p.descriptor},
             {"q", q.descriptor}};
    if (a.d == "js" || a.d == "gjs" || a.d == "gjs-dual" || a.d == "mnjs" || a.d == "bhattacharyya" || a.d == "alpha") {
        out["alpha"] = a.alpha;
    }
    if (a.d == "js" || a.d == "mnjs") out["m"] = WeightedMean::parse(a.m).name();
    if (a.d == "mnjs" || a.d == "njeffreys") {
        out["n"] = WeightedMean::parse(a.n).name();
        out["beta"] = a.beta;
    }
    if (a.force_oracle) out["mc_samples"] = cfg.mc_samples;
    emit(out, c.output);
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// verify

int cmd_verify(const std::string& suite, std::size_t dim, std::size_t count, const Common& c) {
    const OracleConfig cfg = c.oracle();
    std::vector<VerifyCase> cases;
    auto add = [&](std::vector<VerifyCase> v) { cases.insert(cases.end(), v.begin(), v.end()); };
    const bool all = suite == "all";
    if (!all && suite != "gjs-mvn" && suite != "hjs-cauchy" && suite != "bhat-jensen" && suite != "wmix-jsd") {
        throw ParseError("unknown verify suite '" + suite + "'");
    }
    if (all || suite == "gjs-mvn") add(verify_gjs_mvn(dim, count == 0 ? (dim == 1 ? 50 : 20) : count, c.seed, cfg));
    if (all || suite == "hjs-cauchy") add(verify_hjs_cauchy(count == 0 ? 20 : count, {0.1, 0.3, 0.5, 0.7, 0.9}, c.seed, cfg));
    if (all || suite == "bhat-jensen") add(verify_bhat_jensen(count == 0 ? 4 : count, {0.1, 0.3, 0.5, 0.7, 0.9}, c.seed, cfg));
    if (all || suite == "wmix-jsd") add(verify_wmix_jsd(count == 0 ? 10 : count, count == 0 ? 5 : count, c.seed, cfg));
    json arr = json::array();
    std::size_t failed = 0;
    for (const auto& v : cases) {
        failed += v.pass ? 0 : 1;
        arr.push_back({{"suite", v.suite},
                       {"case", v.name},
                       {"closed", v.closed},
                       {"oracle", v.oracle},
                       {"abs_diff", v.abs_diff},
                       {"tolerance", v.tolerance},
                       {"pass", v.pass}});
    }
    emit({{"suite", suite}, {"cases", arr}, {"passed", cases.size() - failed}, {"failed", failed}}, c.output);
    return failed == 0 ? kOk : kVerifyFailed;
}

// ---------------------------------------------------------------------------------------------
// chernoff

int cmd_chernoff(const std::string& ps, const std::string& qs, int grid, const Common& c) {
    const ParsedDensity p = parse_density(ps), q = parse_density(qs);
    ChernoffConfig cc;
    cc.oracle = c.oracle();
    cc.grid = grid;
    const ChernoffResult r = chernoff_information(p.density, q.density, cc);
    emit({{"alpha_star", r.alpha_star}, {"value", r.value}, {"kl_gap", r.kl_gap}, {"p", p.descriptor}, {"q", q.descriptor}},
         c.output);
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// cluster

struct ClusterInput {
    std::string family = "raw";
    std::string chart = "natural";
    std::vector<Vec> points;
    std::optional<std::size_t> k;
};

// CSV: an optional header such as `family=mvn,chart=ordinary`, then one numeric row per point.
ClusterInput read_cluster_csv(std::istream& in) {
    ClusterInput ci;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (first && line.find('=') != std::string::npos) {
            std::stringstream ss(line);
            std::string item;
            while (std::getline(ss, item, ',')) {
                const auto eq = item.find('=');
                if (eq == std::string::npos) throw ParseError("bad CSV header item '" + item + "'");
                const std::string key = item.substr(0, eq), val = item.substr(eq + 1);
                if (key == "family") {
                    ci.family = val;
                } else if (key == "chart") {
                    ci.chart = val;
                } else {
                    throw ParseError("unknown CSV header key '" + key + "'");
                }
            }
            first = false;
            continue;
        }
        first = false;
        const auto v = detail::parse_numbers(line, line);
        ci.points.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    }
    return ci;
}

ClusterInput read_cluster_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        const json j = read_json_file(path);
        ClusterInput ci;
        ci.family = j.value("family", "raw");
        ci.chart = j.value("chart", "natural");
        if (!j.contains("points") || !j.at("points").is_array()) throw ParseError("cluster JSON needs a 'points' array");
        try {
            for (const auto& row : j.at("points")) {
                const auto v = row.get<std::vector<double>>();
                ci.points.push_back(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
            }
            if (j.contains("k")) ci.k = j.at("k").get<std::size_t>();
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad cluster JSON: ") + e.what());
        }
        return ci;
    }
    return read_cluster_csv(in);
}

std::size_t mvn_dim_from_flat(Eigen::Index n) {
    for (std::size_t d = 1; d < 64; ++d) {
        if (static_cast<Eigen::Index>(d + d * d) == n) return d;
    }
    throw ParseError("MVN rows must hold d + d^2 numbers (mean, then covariance column-major)");
}

Chart parse_chart(const std::string& s) {
    if (s == "ordinary") return Chart::Ordinary;
    if (s == "natural") return Chart::Natural;
    if (s == "expectation") return Chart::Expectation;
    throw ParseError("unknown chart '" + s + "'");
}

int cmd_cluster(const std::string& path, std::size_t k_flag, int max_iters, const Common& c) {
    ClusterInput ci = read_cluster_input(path);
    if (ci.points.empty()) throw ParseError("no points in '" + path + "'");
    ClusterProblem pb;
    pb.k = k_flag != 0 ? k_flag : ci.k.value_or(0);
    if (pb.k == 0) throw ParseError("cluster needs --k (or a 'k' field in the JSON input)");
    pb.seed = c.seed;
    pb.max_iters = max_iters;
    pb.family = ci.family;

    // Points are clustered in natural coordinates with the Bregman divergence of F; centers go back to the input chart.
    std::function<Vec(const Vec&)> to_out = [](const Vec& v) { return v; };
    if (ci.family == "raw") {
        pb.points = ci.points;
        pb.divergence = squared_euclidean();
    } else {
        ExpFamPtr spec;
        std::function<Vec(const Vec&)> to_nat = [](const Vec& v) { return v; };
        if (ci.family == "mvn") {
            const std::size_t d = mvn_dim_from_flat(ci.points[0].size());
            const Chart chart = parse_chart(ci.chart);
            spec = mvn_spec(d);
            to_nat = [chart, d](const Vec& v) { return mvn_natural_flat(MvnParam::from_flat(chart, v, d)); };
            to_out = [chart, d](const Vec& v) { return mvn_convert(MvnParam::from_flat(Chart::Natural, v, d), chart).flat(); };
        } else if (ci.family == "exponential") {
            spec = exponential_spec();
        } else if (ci.family == "poisson") {
            spec = poisson_spec();
        } else {
            throw ParseError("unknown cluster family '" + ci.family + "' (raw, mvn, exponential, poisson)");
        }
        for (const auto& p : ci.points) {
            if (static_cast<std::size_t>(p.size()) != spec->dim_param && ci.family != "mvn") {
                throw ParseError("point has the wrong length for family '" + ci.family + "'");
            }
            pb.points.push_back(to_nat(p));
        }
        pb.divergence = bregman_divergence(spec);
        pb.in_domain = spec->in_domain;
    }
    ClusterResult r = lloyd(pb, seed_kmeanspp(pb), right_bregman_centroid());
    for (auto& center : r.centers) center = to_out(center);
    json out = cluster_result_to_json(r);
    out["family"] = ci.family;
    if (ci.family == "mvn") out["chart"] = ci.chart;
    out["k"] = pb.k;
    out["seed"] = pb.seed;
    emit(out, c.output);
    return kOk;
}

// ---------------------------------------------------------------------------------------------
// paper-table

int cmd_table(bool as_json, const Common& c) {
    const std::vector<TableRow> rows = reference_table(c.oracle());
    bool ok = true;
    for (const auto& r : rows) ok = ok && r.pass();
    if (as_json) {
        json arr = json::array();
        for (const auto& r : rows) {
            json j{{"block", r.block}, {"label", r.label}, {"value", r.value}};
            if (r.checked()) {
                j["expected"] = r.expected;
                j["tolerance"] = r.tolerance;
            }
            j["pass"] = r.pass();
            arr.push_back(j);
        }
        emit({{"rows", arr}, {"pass", ok}}, c.output);
    } else {
        std::ostringstream os;
        std::string block;
        char buf[256];
        for (const auto& r : rows) {
            if (r.block != block) {
                block = r.block;
                os << "\n[" << block << "]\n";
            }
            if (r.checked()) {
                std::snprintf(buf, sizeof buf, "  %-58s %14.8f  expected %12.8g +- %-7.1g %s\n", r.label.c_str(), r.value,
                              r.expected, r.tolerance, r.pass() ? "ok" : "FAIL");
            } else {
                std::snprintf(buf, sizeof buf, "  %-58s %14.8f  (informational)\n", r.label.c_str(), r.value);
            }
            os << buf;
        }
        if (c.output.empty() || c.output == "-") {
            std::cout << os.str();
        } else {
            std::ofstream(c.output) << os.str();
        }
    }
    return ok ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Generalized Jensen-Shannon divergences, closed forms and their numerical oracle"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--tol", common.tol, "Absolute tolerance of the quadrature oracle")->check(CLI::PositiveNumber);
    app.add_option("--mc-samples", common.mc_samples, "Monte Carlo samples for d >= 2")->check(CLI::PositiveNumber);
    app.add_option("--seed", common.seed, "Seed for every random choice");
    app.add_option("-o,--output", common.output, "Write the result here instead of stdout");

    DivArgs div;
    auto* div_cmd = app.add_subcommand("div", "Evaluate a divergence between two densities");
    div_cmd->add_option("--d", div.d, "kl, js, gjs, gjs-dual, mnjs, njeffreys, jeffreys, resistor, bhattacharyya, hellinger, alpha")
        ->check(CLI::IsMember({"kl", "js", "gjs", "gjs-dual", "mnjs", "njeffreys", "jeffreys", "resistor", "bhattacharyya",
                               "hellinger", "alpha"}));
    div_cmd->add_option("--m", div.m, "Mixture mean M: arithmetic, geometric, harmonic, power:<p>");
    div_cmd->add_option("--n", div.n, "Mean N combining the two divergence terms");
    div_cmd->add_option("--alpha", div.alpha, "Skew of the mixture");
    div_cmd->add_option("--beta", div.beta, "Skew of the N-mean");
    div_cmd->add_flag("--oracle", div.force_oracle, "Ignore closed forms and integrate numerically");
    div_cmd->add_option("p", div.p, "First density (e.g. cauchy:0.1, normal:0,1, @file.json)")->required();
    div_cmd->add_option("q", div.q, "Second density")->required();

    std::string suite;
    std::size_t dim = 1, count = 0;
    auto* verify_cmd = app.add_subcommand("verify", "Compare closed forms with the oracle on random instances");
    verify_cmd->add_option("suite", suite, "gjs-mvn, hjs-cauchy, bhat-jensen, wmix-jsd or all")->required();
    verify_cmd->add_option("--dim", dim, "Dimension for gjs-mvn")->check(CLI::Range(1, 8));
    verify_cmd->add_option("--count", count, "Number of random instances (0 keeps the suite default)");

    std::string cp, cq;
    int grid = 20;
    auto* chernoff_cmd = app.add_subcommand("chernoff", "Chernoff information and its optimal skew");
    chernoff_cmd->add_option("p", cp, "First density")->required();
    chernoff_cmd->add_option("q", cq, "Second density")->required();
    chernoff_cmd->add_option("--grid", grid, "Coarse grid size before refinement")->check(CLI::Range(3, 10000));

    std::string cluster_path;
    std::size_t k = 0;
    int max_iters = 100;
    auto* cluster_cmd = app.add_subcommand("cluster", "k-means++ seeding then Lloyd iterations");
    cluster_cmd->add_option("input", cluster_path, "CSV or JSON problem file")->required();
    cluster_cmd->add_option("--k", k, "Number of clusters");
    cluster_cmd->add_option("--max-iters", max_iters, "Lloyd iteration cap")->check(CLI::PositiveNumber);

    bool table_json = false;
    auto* table_cmd = app.add_subcommand("paper-table", "Reproduce the worked numeric examples");
    table_cmd->add_flag("--json", table_json, "Emit JSON instead of a text table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("usage", e.what());
        return kUsage;
    }

    set_warning_sink([](const std::string& msg) { std::cerr << json{{"warning", msg}}.dump() << "\n"; });
    try {
        if (*div_cmd) return cmd_div(div, common);
        if (*verify_cmd) return cmd_verify(suite, dim, count, common);
        if (*chernoff_cmd) return cmd_chernoff(cp, cq, grid, common);
        if (*cluster_cmd) return cmd_cluster(cluster_path, k, max_iters, common);
        if (*table_cmd) return cmd_table(table_json, common);
    } catch (const ParseError& e) {
        emit_error("parse", e.what());
        return kUsage;
    } catch (const DomainError& e) {
        emit_error("domain", e.what());
        return kUsage;
    } catch (const OracleError& e) {
        emit_error("numeric", e.what());
        return kNumeric;
    } catch (const std::exception& e) {
        emit_error("numeric", e.what());
        return kNumeric;
    }
    return kUsage;
}
