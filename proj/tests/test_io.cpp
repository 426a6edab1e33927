#include <cmath>
#include <cstdio>
#include <fstream>

#include <gtest/gtest.h>

#include "mnjs/io.hpp"

using namespace mnjs;

namespace {

std::string temp_json(const std::string& name, const std::string& body) {
    const std::string path = ::testing::TempDir() + name;
    std::ofstream(path) << body;
    return path;
}

}  // namespace

TEST(ParseDensity, ShortForms) {
    const ParsedDensity c = parse_density("cauchy:0.3");
    EXPECT_NEAR(c.density.eval(0.0), 1.0 / (std::numbers::pi * 0.3), 1e-14);
    EXPECT_EQ(c.descriptor.at("family"), "cauchy");
    EXPECT_TRUE(kl_closed(c.density, parse_density("cauchy:0.5").density).has_value());
    EXPECT_NEAR(parse_density("cauchy_ls:1,2").density.eval(1.0), 1.0 / (2.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(parse_density("normal:0,1").density.eval(0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-14);
    EXPECT_NEAR(parse_density("categorical:0.2,0.8").density.eval(1.0), 0.8, 1e-15);
    EXPECT_NEAR(parse_density("exponential:2").density.eval(0.5), 2.0 * std::exp(-1.0), 1e-14);
    EXPECT_NEAR(parse_density("poisson:3").density.eval(2.0), 4.5 * std::exp(-3.0), 1e-14);
    EXPECT_NEAR(parse_density("uniform:-1,3").density.eval(0.0), 0.25, 1e-15);
}

TEST(ParseDensity, JsonForms) {
    const ParsedDensity inl = parse_density(R"({"family":"cauchy","gamma":0.1})");
    EXPECT_EQ(inl.descriptor.at("gamma"), 0.1);
    const std::string path = temp_json("mnjs_mvn.json", R"({"chart":"ordinary","mu":[1,2],"sigma":[[1,-1],[-1,2]]})");
    const ParsedDensity a = parse_density("mvn:@" + path), b = parse_density("@" + path), c = parse_density(path);
    EXPECT_EQ(a.density.dim, 2U);
    const double x[2] = {0.5, 0.5};
    EXPECT_NEAR(a.density.eval(x), b.density.eval(x), 1e-15);
    EXPECT_NEAR(a.density.eval(x), c.density.eval(x), 1e-15);
    EXPECT_EQ(a.descriptor.at("family"), "mvn");
    std::remove(path.c_str());
}

TEST(ParseDensity, Errors) {
    EXPECT_THROW(parse_density(""), ParseError);
    EXPECT_THROW(parse_density("cauchy"), ParseError);
    EXPECT_THROW(parse_density("cauchy:abc"), ParseError);
    EXPECT_THROW(parse_density("cauchy:0.3x"), ParseError);
    EXPECT_THROW(parse_density("cauchy:1,2"), ParseError);
    EXPECT_THROW(parse_density("student:3"), ParseError);
    EXPECT_THROW(parse_density("mvn:file.json"), ParseError);
    EXPECT_THROW(parse_density("@/nonexistent/x.json"), ParseError);
    EXPECT_THROW(parse_density("{not json"), ParseError);
    EXPECT_THROW(parse_density(R"({"family":7})"), ParseError);
    EXPECT_THROW(parse_density(R"({"family":"cauchy","gamma":"big"})"), ParseError);
    EXPECT_THROW(parse_density("cauchy:-1"), DomainError);
    EXPECT_THROW(parse_density("exponential:0"), DomainError);
}

TEST(MvnJson, RoundtripEveryChart) {
    Vec mu(2);
    mu << 1.0, 2.0;
    Mat s(2, 2);
    s << 1.0, -1.0, -1.0, 2.0;
    const MvnParam p = MvnParam::ordinary(mu, s);
    for (Chart c : {Chart::Ordinary, Chart::Natural, Chart::Expectation}) {
        const MvnParam q = mvn_convert(p, c);
        const json j = json::parse(mvn_to_json(q).dump());
        const MvnParam back = mvn_from_json(j);
        EXPECT_EQ(back.chart(), c);
        EXPECT_LE((back.vec() - q.vec()).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_LE((back.mat() - q.mat()).cwiseAbs().maxCoeff(), 1e-15);
    }
    EXPECT_THROW(mvn_from_json(json{{"chart", "polar"}}), ParseError);
    EXPECT_THROW(mvn_from_json(json{{"chart", "ordinary"}, {"mu", {1.0}}, {"sigma", {{1.0, 0.0}}}}), std::exception);
}

TEST(WMixtureJson, Components) {
    const json j = json::parse(R"({"components":[{"family":"normal","mu":0,"sigma":1},{"family":"normal","mu":2,"sigma":0.5}]})");
    const WMixtureFamily fam = wmixture_from_json(j);
    EXPECT_EQ(fam.dim(), 1U);
    EXPECT_THROW(wmixture_from_json(json{{"parts", 1}}), ParseError);
    EXPECT_THROW(wmixture_from_json(json::parse(R"({"components":[{"family":3}]})")), ParseError);
}

TEST(ClusterJson, Shape) {
    ClusterResult r;
    Vec c(2);
    c << 1.0, 2.0;
    r.centers = {c};
    r.assignment = {0, 0};
    r.objective_trace = {3.0, 1.0};
    r.iterations = 1;
    const json j = cluster_result_to_json(r);
    EXPECT_EQ(j.at("centers")[0][1], 2.0);
    EXPECT_EQ(j.at("assignment").size(), 2U);
    EXPECT_EQ(j.at("objective_trace")[1], 1.0);
}
