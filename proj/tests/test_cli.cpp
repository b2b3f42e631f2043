#include <doctest.h>

#include "dioph/cli.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dioph;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

// Runs the installed binary; stdout only, for exit codes of the real process.
Outcome exec(const std::string& args) {
    std::string cmd = std::string(DIOPH_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p);
    std::string out;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
    int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

std::string data(const std::string& name) { return std::string(DIOPH_DATA_DIR) + "/" + name; }

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("dioph_cli_" + std::to_string(getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    auto p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> v;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);)
        if (!l.empty()) v.push_back(l);
    return v;
}

std::vector<std::string> csv_fields(const std::string& line) {
    std::vector<std::string> f;
    std::string cur;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
            f.push_back(cur);
            cur.clear();
        } else cur += c;
    }
    f.push_back(cur);
    return f;
}

}  // namespace

TEST_CASE("field: Q(sqrt2) has discriminant 8") {
    auto r = invoke({"--field", data("q_sqrt2.field"), "--format", "json", "field"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(j["degree"] == 2);
    CHECK(j["discriminant"] == "8");
    auto c = invoke({"--field", data("q_sqrt2.field"), "field"});
    CHECK(c.code == 0);
    CHECK(c.out.find("discriminant,8\n") != std::string::npos);
}

TEST_CASE("field: x - 3 has degree 1") {
    auto f = write_file("x3.field", "minpoly = [-3, 1]\n");
    auto j = json::parse(invoke({"--field", f, "--format", "json", "field"}).out);
    CHECK(j["degree"] == 1);
    CHECK(j["discriminant"] == "1");
}

TEST_CASE("field: x^2 + 1 is rejected with a nonzero exit") {
    auto r = invoke({"--field", data("q_sqrt_minus1.field"), "field"});
    CHECK(r.code == 1);
    CHECK(r.err.find("NotTotallyReal") != std::string::npos);
    CHECK(exec("--field " + data("q_sqrt_minus1.field") + " field").code == 1);
    CHECK(exec("--field " + data("q_sqrt5_nobasis.field") + " field").code == 1);
    CHECK(exec("--field " + data("q_sqrt5.field") + " field").code == 0);
}

TEST_CASE("dirichlet: Q sweep 2..64 stays inside the box") {
    auto r = invoke({"--field", data("q_sqrt2.field"), "--format", "json", "dirichlet", "--x", "0.30103;0.77815", "--Q",
                  "2..64"});
    REQUIRE(r.code == 0);
    Field K = Field::create({Integer(-2), Integer(0), Integer(1)});
    const Real c = mp::sqrt(mp::sqrt(Real(8)));
    auto rows = lines(r.out);
    REQUIRE(rows.size() == 63);
    for (const auto& row : rows) {
        auto j = json::parse(row);
        const Real Q(j["Q"].get<std::string>());
        const Real value(j["value"].get<std::string>());
        CHECK(value <= c / Q * (1 + pow2(-200)));
        auto q = K.parse(j["q"][0].get<std::string>());
        CHECK(!q.is_zero());
        CHECK(K.house(q) <= Q * c * (1 + pow2(-200)));
        CHECK(j["certified"] == true);
    }
}

TEST_CASE("flow-trace: tau(1/3) over Q decays with slope -1") {
    auto r = invoke({"--field", data("q.field"), "flow-trace", "--x-field", "1/3", "--t0", "0", "--tmax", "8", "--step",
                  "0.5"});
    REQUIRE(r.code == 0);
    auto rows = lines(r.out);
    REQUIRE(rows.front() == "t,delta,certified,witness,log_delta");
    std::vector<std::pair<Real, Real>> pts;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        auto f = csv_fields(rows[k]);
        REQUIRE(f.size() == 5);
        CHECK(f[2] == "true");
        pts.emplace_back(Real(f[0]), Real(f[4]));
    }
    REQUIRE(pts.size() == 17);
    // past t = 3 the witness is (-1, 3): delta = 3 e^{-t}
    for (const auto& [t, ld] : pts)
        if (t >= 3) CHECK(abs(ld - (mp::log(Real(3)) - t)) < Real("1e-15"));
}

TEST_CASE("exponent: golden ratio and a point of K") {
    auto r = invoke({"--field", data("q.field"), "--format", "json", "exponent", "--x", "1.6180339887498948482045868343656381",
                  "--tmin", "10", "--tmax", "10000", "--points", "13"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    CHECK(abs(Real(j["omega_hat"].get<std::string>()) - 1) < Real("0.15"));
    auto z = invoke({"--field", data("q_sqrt2.field"), "--format", "json", "exponent", "--x-field", "[1/3,1/3]", "--tmin",
                  "4", "--tmax", "64", "--points", "8"});
    REQUIRE(z.code == 0);
    CHECK(json::parse(z.out)["omega_hat"] == "inf");
    CHECK(invoke({"--field", data("q.field"), "exponent", "--x", "0.5", "--tmin", "2", "--tmax", "9", "--points", "3"}).code ==
          1);
}

TEST_CASE("construct then verify") {
    const auto cert = (scratch() / "cert.json").string();
    auto c = exec("--field " + data("q_sqrt2.field") + " --format json --out " + cert + " construct --stages 5");
    REQUIRE(c.code == 0);
    auto v = exec("--format json verify " + cert);
    CHECK(v.code == 0);
    CHECK(json::parse(v.out)["ok"] == true);

    // A widened last box breaks (e): verify exits 1.
    json j;
    std::ifstream(cert) >> j;
    j["stages"][4]["box"][0] = {"0", "1", "0", "1"};
    auto bad = write_file("bad.json", j.dump());
    CHECK(exec("verify " + bad).code == 1);
    CHECK(exec("verify " + (scratch() / "missing.json").string()).code == 1);
}

TEST_CASE("construct: csv summary and identical bytes for identical input") {
    std::vector<std::string> args{"--field", data("q_sqrt2.field"), "--format", "json", "--seed", "2", "construct",
                                  "--stages", "4"};
    auto a = invoke(args), b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto s = invoke({"--field", data("q_sqrt2.field"), "construct", "--stages", "3"});
    auto rows = lines(s.out);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == "index,family,phi,zeta_phi,e_bound,margin");
    CHECK(rows[1].rfind("1,2,", 0) == 0);
    CHECK(rows[2].rfind("2,1,", 0) == 0);
}

TEST_CASE("paucity: determinism and a planted sample") {
    std::vector<std::string> args{"--field", data("q_sqrt2.field"), "--format", "json", "--seed", "7", "paucity",
                                  "--samples", "6", "--tmax", "8"};
    auto a = invoke(args), b = invoke(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto j = json::parse(a.out);
    CHECK(j["samples"] == 6);
    CHECK(j["divergent"].get<long>() + j["nondivergent"].get<long>() + j["inconclusive"].get<long>() == 6);
    args[5] = "8";
    CHECK(invoke(args).out != a.out);

    auto p = invoke({"--field", data("q_sqrt2.field"), "--format", "json", "paucity", "--samples", "1", "--plant", "[1/3,1/3]",
                  "--tmax", "12"});
    REQUIRE(p.code == 0);
    CHECK(Real(json::parse(p.out)["divergent_fraction"].get<std::string>()) == 1);
}

TEST_CASE("config file with flag overrides") {
    auto cfg = write_file("run.cfg", "field = " + data("q_sqrt2.field") + "\nformat = json\n[construct]\nstages = 2\n");
    auto r = invoke({"--config", cfg, "construct"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["stages"].size() == 2);
    auto o = invoke({"--config", cfg, "--format", "csv", "construct"});
    REQUIRE(o.code == 0);
    CHECK(lines(o.out).size() == 3);
}

TEST_CASE("output file and argument errors") {
    const auto path = (scratch() / "field.csv").string();
    auto r = invoke({"--field", data("q_sqrt5.field"), "--out", path, "field"});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(path);
    std::string text((std::istreambuf_iterator<char>(in)), {});
    CHECK(text.find("discriminant,5\n") != std::string::npos);

    CHECK(invoke({}).code == 1);
    CHECK(invoke({"bogus"}).code == 1);
    CHECK(invoke({"--precision", "20", "--field", data("q.field"), "field"}).code == 1);
    CHECK(invoke({"--format", "xml", "--field", data("q.field"), "field"}).code == 1);
    CHECK(invoke({"--help"}).code == 0);
    CHECK(invoke({"--field", data("q.field"), "dirichlet", "--x", "0.5", "--Q", "5..2"}).code == 1);
    CHECK(invoke({"field"}).code == 1);
    CHECK(exec("bogus").code == 1);
}
