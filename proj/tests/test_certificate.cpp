#include <doctest.h>

#include "dioph/certificate.hpp"
#include "support/gen.hpp"

#include <sstream>

using namespace dioph;
using namespace dioph::testing;

namespace {

ConstructionOutput sample(const Field& K, const std::string& graph, int stages, unsigned long seed = 0) {
    ConstructOptions o;
    o.stages = stages;
    o.seed = seed;
    return construct_singular(K, SurfaceSpec::parse(K, graph), o);
}

ErrorKind kind_of(const nlohmann::json& j) {
    try {
        certificate_from_json(j);
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no error");
    return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("round trip preserves the exact stage data") {
    auto c = sample(field_sqrt2(), "x1*x2", 4);
    std::stringstream ss;
    write_certificate(c, ss);
    auto back = read_certificate(ss);
    const Field& K = back.field;
    CHECK(K.min_poly() == c.field.min_poly());
    CHECK(back.surface.graph_text == c.surface.graph_text);
    CHECK(back.zeta.text == c.zeta.text);
    CHECK(back.seed == c.seed);
    REQUIRE(back.stages.size() == c.stages.size());
    for (std::size_t i = 0; i < c.stages.size(); ++i) {
        CHECK(back.stages[i].line.family == c.stages[i].line.family);
        CHECK(back.stages[i].line.a == c.stages[i].line.a);
        CHECK(back.stages[i].line.b == c.stages[i].line.b);
        CHECK(back.stages[i].box == c.stages[i].box);
    }
    CHECK(back.base == c.base);
    CHECK(back.point.rows == c.point.rows);
    CHECK(verify_certificate(back).ok());
    CHECK(certificate_to_json(back) == certificate_to_json(c));
}

TEST_CASE("property: round trip is the identity on JSON") {
    Gen g(91);
    for (int k = 0; k < kCases; ++k) {
        Field K = k % 2 ? field_sqrt5() : field_q();
        auto c = sample(K, g.coin() ? "x1*x2" : "x1*x2; x2^2 + 1/3", static_cast<int>(g.integer(1, 3)), g.integer(0, 3));
        auto j = certificate_to_json(c);
        auto j2 = certificate_to_json(certificate_from_json(nlohmann::json::parse(j.dump())));
        CHECK(j == j2);
    }
}

TEST_CASE("tampered certificate: q_2 := q_1 fails (b)") {
    auto j = certificate_to_json(sample(field_sqrt2(), "x1*x2", 3));
    j["stages"][1]["q"] = j["stages"][0]["q"];
    j["stages"][1]["p"] = j["stages"][0]["p"];
    j["stages"][1]["family"] = j["stages"][0]["family"];
    auto rep = verify_certificate(certificate_from_json(j), {5, false, false});
    CHECK(rep.failed("b"));
}

TEST_CASE("tampered base point is caught") {
    auto j = certificate_to_json(sample(field_sqrt2(), "x1*x2", 3));
    j["base"][0][0] = "1/3";
    auto rep = verify_certificate(certificate_from_json(j), {5, false, false});
    CHECK(!rep.ok());
    CHECK(rep.failed("point-in-boxes"));
}

TEST_CASE("malformed certificates") {
    const auto good = certificate_to_json(sample(field_sqrt2(), "x1*x2", 2));
    auto j = good;
    j["format"] = "other/1";
    CHECK(kind_of(j) == ErrorKind::InvalidInput);
    j = good;
    j.erase("stages");
    CHECK(kind_of(j) == ErrorKind::InvalidInput);
    j = good;
    j["stages"][0]["q"][2] = {"1", "0"};
    CHECK(kind_of(j) == ErrorKind::Unsupported);
    j = good;
    j["stages"][0]["family"] = 1;
    CHECK(kind_of(j) == ErrorKind::InvalidInput);
    j = good;
    j["stages"][0]["box"][0] = {"0", "1"};
    CHECK(kind_of(j) == ErrorKind::InvalidInput);
    j = good;
    j["field"]["basis"] = {{"1", "0"}};
    CHECK(kind_of(j) == ErrorKind::InvalidBasis);
    j = good;
    j["seed"] = "zero";
    CHECK(kind_of(j) == ErrorKind::InvalidInput);

    std::stringstream bad("{ not json");
    CHECK_THROWS_AS(read_certificate(bad), Error);
    CHECK_THROWS_AS(load_certificate("/nonexistent/cert.json"), Error);
}
