#pragma once

// JSON descriptors and the `family:params` density mini-grammar. Needs nlohmann/json.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnjs/cauchy.hpp"
#include "mnjs/clustering.hpp"
#include "mnjs/densities.hpp"
#include "mnjs/expfam.hpp"
#include "mnjs/wmixture.hpp"

namespace mnjs {

using json = nlohmann::json;

/// Malformed user input (bad grammar, unreadable file, wrong JSON shape).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline Vec json_vec(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ParseError(std::string("expected an array field '") + key + "'");
    const auto v = j.at(key).get<std::vector<double>>();
    return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Mat json_mat(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_array()) throw ParseError(std::string("expected a matrix field '") + key + "'");
    const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Mat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != n) {
            throw ParseError(std::string("matrix field '") + key + "' must be square");
        }
        for (Eigen::Index k = 0; k < n; ++k) m(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    }
    return m;
}

inline json to_json_vec(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline json to_json_mat(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Eigen::Index k = 0; k < m.cols(); ++k) r[static_cast<std::size_t>(k)] = m(i, k);
        rows.push_back(r);
    }
    return rows;
}

inline double json_number(const json& j, const char* key) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ParseError(std::string("expected a number field '") + key + "'");
    return j.at(key).get<double>();
}

}  // namespace detail

inline json mvn_to_json(const MvnParam& p) {
    switch (p.chart()) {
        case Chart::Ordinary:
            return {{"chart", "ordinary"}, {"mu", detail::to_json_vec(p.vec())}, {"sigma", detail::to_json_mat(p.mat())}};
        case Chart::Natural:
            return {{"chart", "natural"}, {"theta_v", detail::to_json_vec(p.vec())}, {"theta_m", detail::to_json_mat(p.mat())}};
        case Chart::Expectation:
            return {{"chart", "expectation"}, {"eta_v", detail::to_json_vec(p.vec())}, {"eta_m", detail::to_json_mat(p.mat())}};
    }
    return {};
}

inline MvnParam mvn_from_json(const json& j) {
    const std::string chart = j.value("chart", "ordinary");
    if (chart == "ordinary") return MvnParam::ordinary(detail::json_vec(j, "mu"), detail::json_mat(j, "sigma"));
    if (chart == "natural") return MvnParam::natural(detail::json_vec(j, "theta_v"), detail::json_mat(j, "theta_m"));
    if (chart == "expectation") return MvnParam::expectation(detail::json_vec(j, "eta_v"), detail::json_mat(j, "eta_m"));
    throw ParseError("unknown MVN chart '" + chart + "'");
}

inline json cauchy_to_json(const CauchyScale& c) { return {{"family", "cauchy"}, {"gamma", c.gamma}}; }
inline json cauchy_to_json(const CauchyLocationScale& c) { return {{"family", "cauchy_ls"}, {"l", c.l}, {"gamma", c.gamma}}; }

/// A density together with the descriptor it was built from.
struct ParsedDensity {
    Density density;
    json descriptor;
};

inline ParsedDensity density_from_json(const json& j);

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
}

inline ParsedDensity density_from_json(const json& j) {
    if (!j.is_object()) throw ParseError("density descriptor must be a JSON object");
    if (j.contains("family") && !j.at("family").is_string()) throw ParseError("'family' must be a string");
    const std::string family = j.contains("family") ? j.at("family").get<std::string>() : (j.contains("chart") ? "mvn" : "");
    if (family == "mvn") {
        const MvnParam p = mvn_from_json(j);
        json d = mvn_to_json(p);
        d["family"] = "mvn";
        return {mvn_density(p), d};
    }
    if (family == "cauchy") {
        const CauchyScale c(detail::json_number(j, "gamma"));
        return {cauchy_density(c), cauchy_to_json(c)};
    }
    if (family == "cauchy_ls") {
        const CauchyLocationScale c(detail::json_number(j, "l"), detail::json_number(j, "gamma"));
        return {cauchy_ls_density(c), cauchy_to_json(c)};
    }
    if (family == "normal") {
        const double mu = detail::json_number(j, "mu"), sigma = detail::json_number(j, "sigma");
        return {gaussian_density(mu, sigma), {{"family", "normal"}, {"mu", mu}, {"sigma", sigma}}};
    }
    if (family == "categorical") {
        if (!j.contains("p") || !j.at("p").is_array()) throw ParseError("categorical descriptor needs an array 'p'");
        const auto p = j.at("p").get<std::vector<double>>();
        return {categorical_density(p), {{"family", "categorical"}, {"p", p}}};
    }
    if (family == "exponential") {
        const double rate = detail::json_number(j, "rate");
        if (!(rate > 0.0)) throw DomainError("exponential rate must be positive");
        return {expfam_density(exponential_spec(), scalar(-rate)), {{"family", "exponential"}, {"rate", rate}}};
    }
    if (family == "poisson") {
        const double rate = detail::json_number(j, "rate");
        if (!(rate > 0.0)) throw DomainError("poisson rate must be positive");
        return {expfam_density(poisson_spec(), scalar(std::log(rate))), {{"family", "poisson"}, {"rate", rate}}};
    }
    if (family == "uniform") {
        const double a = detail::json_number(j, "a"), b = detail::json_number(j, "b");
        return {uniform_density(a, b), {{"family", "uniform"}, {"a", a}, {"b", b}}};
    }
    throw ParseError("unknown density family '" + family + "'");
}

namespace detail {

inline std::vector<double> parse_numbers(const std::string& s, const std::string& spec) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != item.size()) throw ParseError("bad number '" + item + "' in density spec '" + spec + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace detail

/// Parses `cauchy:0.3`, `cauchy_ls:l,gamma`, `normal:mu,sigma`, `categorical:p0,p1,...`, `exponential:rate`,
/// `poisson:rate`, `uniform:a,b`, `mvn:@file.json`, `@file.json` or an inline JSON object.
inline ParsedDensity parse_density(const std::string& spec) {
    if (spec.empty()) throw ParseError("empty density spec");
    if (spec.front() == '{') {
        try {
            return density_from_json(json::parse(spec));
        } catch (const json::exception& e) {
            throw ParseError("invalid inline JSON density: " + std::string(e.what()));
        }
    }
    if (spec.front() == '@') return density_from_json(read_json_file(spec.substr(1)));
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") return density_from_json(read_json_file(spec));
        throw ParseError("density spec '" + spec + "' is not of the form family:params");
    }
    const std::string family = spec.substr(0, colon);
    const std::string args = spec.substr(colon + 1);
    try {
        if (family == "mvn") {
            if (args.empty() || args.front() != '@') throw ParseError("mvn spec must be mvn:@file.json");
            json j = read_json_file(args.substr(1));
            j["family"] = "mvn";
            return density_from_json(j);
        }
        const auto v = detail::parse_numbers(args, spec);
        auto need = [&](std::size_t n) {
            if (v.size() != n) throw ParseError("density spec '" + spec + "' needs " + std::to_string(n) + " numbers");
        };
        if (family == "cauchy") {
            need(1);
            return density_from_json({{"family", "cauchy"}, {"gamma", v[0]}});
        }
        if (family == "cauchy_ls") {
            need(2);
            return density_from_json({{"family", "cauchy_ls"}, {"l", v[0]}, {"gamma", v[1]}});
        }
        if (family == "normal") {
            need(2);
            return density_from_json({{"family", "normal"}, {"mu", v[0]}, {"sigma", v[1]}});
        }
        if (family == "categorical") return density_from_json({{"family", "categorical"}, {"p", v}});
        if (family == "exponential") {
            need(1);
            return density_from_json({{"family", "exponential"}, {"rate", v[0]}});
        }
        if (family == "poisson") {
            need(1);
            return density_from_json({{"family", "poisson"}, {"rate", v[0]}});
        }
        if (family == "uniform") {
            need(2);
            return density_from_json({{"family", "uniform"}, {"a", v[0]}, {"b", v[1]}});
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad density spec: ") + e.what());
    }
    throw ParseError("unknown density family '" + family + "'");
}

/// {"components": [descriptor, ...]}
inline WMixtureFamily wmixture_from_json(const json& j) {
    if (!j.contains("components") || !j.at("components").is_array()) throw ParseError("w-mixture needs a 'components' array");
    std::vector<Density> comps;
    for (const auto& c : j.at("components")) comps.push_back(density_from_json(c).density);
    return WMixtureFamily(std::move(comps));
}

inline json cluster_result_to_json(const ClusterResult& r) {
    json centers = json::array();
    for (const auto& c : r.centers) centers.push_back(detail::to_json_vec(c));
    return {{"centers", centers},
            {"assignment", r.assignment},
            {"objective_trace", r.objective_trace},
            {"iterations", r.iterations}};
}

}  // namespace mnjs
