#include <doctest.h>

#include <sstream>

#include "dtrace/cli.hpp"
#include "dtrace/hochschild.hpp"
#include "dtrace/io.hpp"

using namespace dtrace;

namespace {

const std::string examples = DTRACE_EXAMPLES;

struct Ran {
    int status;
    std::string out, err;
};

Ran run_job(JobConfig cfg)
{
    std::ostringstream out, err;
    int status = run(cfg, out, err);
    return {status, out.str(), err.str()};
}

JobConfig job(std::string command, std::vector<std::string> inputs, bool structured = true)
{
    JobConfig c;
    c.command = std::move(command);
    c.inputs = std::move(inputs);
    c.format = structured ? OutputFormat::structured : OutputFormat::table;
    return c;
}

std::vector<std::string> texts(const Json& results)
{
    std::vector<std::string> out;
    for (const auto& r : results)
        out.push_back(r["group"]["text"]);
    return out;
}

}  // namespace

TEST_CASE("hh on the integers is Z then zeros")
{
    Ran r = run_job(job("hh", {"integers"}));
    REQUIRE(r.status == 0);
    CHECK(texts(Json::parse(r.out)["results"]) == std::vector<std::string>{"Z", "0", "0", "0", "0"});

    Ran t = run_job(job("hh", {"integers"}, false));
    CHECK(t.out.find("0  Z\n1  0\n") != std::string::npos);
    // the file form of the same algebra
    Ran f = run_job(job("hh", {examples + "/integers.json"}));
    CHECK(texts(Json::parse(f.out)["results"]) == texts(Json::parse(r.out)["results"]));
}

TEST_CASE("k0 on the trivial category agrees")
{
    Ran r = run_job(job("k0", {"trivial"}));
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["verdict"] == "AGREE");
    CHECK(j["grothendieck_k0"]["text"] == "0");
    CHECK(j["k0_via_sdot"]["text"] == "0");
}

TEST_CASE("morita over F_2 with n = 2 is ISO in degrees <= 3")
{
    JobConfig c = job("morita", {"ground"});
    c.ring = "GF:2";
    c.max_degree = 3;
    Ran r = run_job(c);
    REQUIRE(r.status == 0);
    const Json doc = Json::parse(r.out);
    for (const auto& d : doc["results"])
        CHECK(d["verdict"] == "ISO");
}

TEST_CASE("structured output round-trips and is byte-identical across runs")
{
    JobConfig c = job("group-homology", {examples + "/s3.json"});
    c.max_degree = 3;
    Ran a = run_job(c), b = run_job(c);
    REQUIRE(a.status == 0);
    CHECK(a.out == b.out);
    const Json doc = Json::parse(a.out);
    for (const auto& d : doc["results"]) {
        FPAbelianGroup g = group_from_json(d["group"]);
        CHECK(group_to_json(g) == d["group"]);
    }
    JobConfig s = job("selftest", {});
    s.seed = 7;
    Ran x = run_job(s), y = run_job(s);
    CHECK(x.status == 0);
    CHECK(x.out == y.out);
    CHECK(Json::parse(x.out)["conventions"]["connes_operator_convention"] == std::string(connes_operator_convention));
}

TEST_CASE("exit statuses")
{
    CHECK(run_job(job("validate", {examples + "/nonassociative.json"})).status == 3);
    Ran bad = run_job(job("validate", {examples + "/nonassociative.json"}, false));
    CHECK(bad.out.find("associativity fails on (1, 1, 2)") != std::string::npos);
    CHECK(run_job(job("hh", {examples + "/malformed.json"})).status == 2);
    CHECK(run_job(job("hh", {"no_such_algebra"})).status == 2);
    CHECK(run_job(job("frobnicate", {})).status == 2);
    CHECK(run_job(job("hc", {"integers"})).status == 3);
    CHECK(run_job(job("k0", {"vect_gf(2,9)"})).status == 4);
    JobConfig c = job("hh", {"integers"});
    c.ring = "R";
    CHECK(run_job(c).status == 2);
    JobConfig k = job("trace-k1", {"truncated:2"});
    k.ring = "GF:2";
    k.matrix = "[[x]]";
    CHECK(run_job(k).status == 3);  // not invertible
}

TEST_CASE("trace-k1 of 1+x over F_2[x]/x^2")
{
    JobConfig k = job("trace-k1", {examples + "/dual_numbers_f2.json"});
    k.matrix = "[[1+x]]";
    Ran r = run_job(k);
    REQUIRE(r.status == 0);
    Json j = Json::parse(r.out);
    CHECK(j["hh1"]["text"] == "F2^2");
    // normalized cycle 1(x)x + x(x)x, and HH_1 has basis {1(x)x, x(x)x} since b_2 = 0
    CHECK(vector_from_json(j["coordinates"]) == Vector{1, 1});
}

TEST_CASE("input files")
{
    Algebra d = load_algebra(examples + "/dual_numbers_f2.json");
    CHECK(d.rank() == 2);
    CHECK(d.base().name() == "GF:2");
    CHECK(validate_algebra(d).ok());
    Algebra g = load_algebra(examples + "/gaussian_rationals.json");
    CHECK(g.multiply(g.basis_vector(1), g.basis_vector(1)) == Vector{-1, 0});

    CHECK(load_group(examples + "/s3.json").order() == 6);
    CHECK_THROWS_AS(load_group(examples + "/nonassociative.json"), ValidationError);

    auto v = load_category(examples + "/vect_f2.json");
    CHECK(v.object_count() == 3);
    CHECK(validate_waldhausen(v).ok());
    auto two = load_category(examples + "/two_objects.json");
    CHECK(validate_waldhausen(two).ok());
    CHECK(grothendieck_k0(two).to_string() == "Z");

    CHECK(load_category("pointed_sets(2)").object_count() == 3);
    CHECK(load_category("vect_gf(3,1)", 2).object_count() == 3);
    CHECK(is_builtin_category("finite_modules(4, 4)"));
    CHECK(!is_builtin_category("integers"));

    // a located diagnostic for a bad basis index
    Json bad = Json::parse(R"({"type":"algebra","base":"Z","basis":["1"],"unit":"1","mul":[[0,3,[[0,1]]]]})");
    try {
        parse_algebra(bad, "inline");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("inline: mul[0]") == 0);
    }
}

TEST_CASE("matrix literals")
{
    Algebra z = load_algebra("integers");
    auto [n, g] = parse_matrix_literal(z, "[[1, 2], [0, 1]]");
    CHECK(n == 2);
    CHECK(g == Vector{1, 2, 0, 1});
    CHECK_THROWS_AS(parse_matrix_literal(z, "[[1, 2], [0]]"), ParseError);
    CHECK_THROWS_AS(parse_matrix_literal(z, "1"), ParseError);
}
