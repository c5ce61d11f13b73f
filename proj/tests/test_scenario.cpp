#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "madelung/csvio.hpp"
#include "madelung/error.hpp"
#include "madelung/runner.hpp"
#include "madelung/scenario.hpp"

using namespace madelung;

namespace {

ErrorKind kind_of(const std::string& json_text) {
    try {
        parse_scenario(json_text, "", "inline");
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::internal_consistency;  // sentinel: "did not throw"
}

const char* kMinimal1d = R"({
  "name": "mini",
  "group": "madelung",
  "grid": {"shape": 33, "spacing": 0.125, "origin": -2.0, "signature": "euclidean"},
  "stationary": true,
  "fields": {"density": {"kind": "gaussian", "rho0": 1.0, "a": 1.0, "center": [0.0]}},
  "outputs": ["density", "quantum_potential"],
  "dumps": ["V_q"],
  "checks": [
    {"id": "center-potential", "metric": "quantum_potential.at_origin", "target": 0.5, "tol": 0.01}
  ]
})";

}  // namespace

TEST_CASE("a minimal config parses into grid, fields, and checks") {
    Scenario sc = parse_scenario(kMinimal1d, "", "inline");
    CHECK(sc.name == "mini");
    CHECK(sc.group == "madelung");
    CHECK(sc.grid->dim() == 1);
    CHECK(sc.grid->shape(0) == 33);
    CHECK(sc.grid->spacing(0) == 0.125);
    CHECK(sc.stationary);
    REQUIRE(sc.amplitude.has_value());
    // density -> amplitude is a square root: rho(0) = 1 => R(0) = 1.
    const int center = 16;
    CHECK(sc.amplitude->values[static_cast<std::size_t>(center)] == doctest::Approx(1.0));
    REQUIRE(sc.checks.size() == 1);
    CHECK(sc.checks[0].metric == "quantum_potential.at_origin");
    CHECK(!sc.checks[0].tol_is_h2);
}

TEST_CASE("schema violations are rejected with the right category") {
    // Unknown top-level key.
    CHECK(kind_of(R"({"name":"a","group":"madelung","grid":{"shape":9,"spacing":0.1,
      "origin":0.0,"signature":"euclidean"},"bogus":1,"outputs":[]})") == ErrorKind::config);
    // Unknown field-source kind.
    CHECK(kind_of(R"({"name":"a","group":"madelung","grid":{"shape":9,"spacing":0.1,
      "origin":0.0,"signature":"euclidean"},
      "fields":{"density":{"kind":"mystery"}},"outputs":[]})") == ErrorKind::config);
    // Check rows must declare exactly one tolerance form.
    CHECK(kind_of(R"({"name":"a","group":"madelung","grid":{"shape":9,"spacing":0.1,
      "origin":0.0,"signature":"euclidean"},
      "fields":{"density":{"kind":"constant","value":1.0}},"outputs":["density"],
      "checks":[{"id":"x","metric":"density.sup","tol":1.0,"tol_h2":1.0}]})") ==
          ErrorKind::config);
    // Malformed JSON is a parse error.
    CHECK(kind_of("{\"name\": ") == ErrorKind::parse);
    // Non-positive spacing violates a grid constraint.
    CHECK(kind_of(R"({"name":"a","group":"madelung","grid":{"shape":9,"spacing":0.0,
      "origin":0.0,"signature":"euclidean"},"outputs":[]})") == ErrorKind::constraint);
    // Catalog parameter range: gaussian needs a > 0.
    CHECK(kind_of(R"({"name":"a","group":"madelung","grid":{"shape":9,"spacing":0.1,
      "origin":0.0,"signature":"euclidean"},
      "fields":{"density":{"kind":"gaussian","rho0":1.0,"a":-2.0,"center":[0.0]}},
      "outputs":["density"]})") == ErrorKind::constraint);
}

TEST_CASE("the bundled catalog holds exactly the ten shipped scenarios") {
    const auto& names = bundled_scenario_names();
    REQUIRE(names.size() == 10);
    for (const char* expected :
         {"conformal_exp_2d", "gaussian1d", "gaussian3d", "helix_3_4", "oscillator_ground",
          "plane_wave_kg", "plane_wave_nr", "plate_quadratic", "static_gaussian_4d",
          "weakfield_eps"}) {
        bool found = false;
        for (const auto& n : names) found = found || n == expected;
        CHECK_MESSAGE(found, expected);
    }
    // Every bundled config parses cleanly.
    for (const auto& n : names) {
        Scenario sc = load_bundled_scenario(n);
        CHECK(sc.name == n);
    }
    CHECK_THROWS_AS(load_bundled_scenario("nonexistent"), Error);
}

TEST_CASE("running a scenario evaluates checks and produces dumps") {
    Scenario sc = parse_scenario(kMinimal1d, "", "inline");
    RunOptions opt;
    opt.with_timestamp = false;
    RunResult rr = run_scenario(sc, opt);
    CHECK(rr.pass);
    REQUIRE(rr.checks.size() == 1);
    CHECK(rr.checks[0].pass);
    CHECK(rr.checks[0].value == doctest::Approx(0.5).epsilon(0.01));
    REQUIRE(rr.dumps.size() == 1);
    CHECK(rr.dumps[0].name == "V_q");
    CHECK(rr.dumps[0].table.columns.size() == 2);
    CHECK(rr.dumps[0].table.columns[0] == "x");
    CHECK(rr.dumps[0].table.columns[1] == "V_q");

    const auto& rep = rr.report;
    CHECK(rep.at("tool") == "madelung");
    CHECK(rep.contains("format_version"));
    CHECK(!rep.contains("timestamp"));
    CHECK(rep.at("scenario").at("name") == "mini");
    CHECK(rep.at("pass") == true);
    CHECK(rep.contains("conventions"));
    CHECK(rep.at("operations").contains("quantum_potential"));
}

TEST_CASE("refinement adds a convergence table with measured orders") {
    std::string text = kMinimal1d;
    // Swap the pointwise check for a residual with a known h^2 decay.
    const std::string from = R"("outputs": ["density", "quantum_potential"])";
    const std::string to = R"("outputs": ["density", "quantum_potential", "equilibrium_residual",
       "stress_tensor"])";
    text.replace(text.find(from), from.size(), to);
    const std::string cfrom =
        R"({"id": "center-potential", "metric": "quantum_potential.at_origin", "target": 0.5, "tol": 0.01})";
    const std::string cto = R"({"id": "balance", "metric": "equilibrium.sup", "tol_h2": 10.0})";
    text.replace(text.find(cfrom), cfrom.size(), cto);

    Scenario sc = parse_scenario(text, "", "inline");
    RunOptions opt;
    opt.refine = true;
    opt.with_timestamp = false;
    RunResult rr = run_scenario(sc, opt);
    CHECK(rr.pass);
    REQUIRE(rr.report.contains("convergence"));
    const auto& rows = rr.report.at("convergence");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].at("id") == "balance");
    const double order = rows[0].at("order").get<double>();
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("unknown metrics and dump names fail as config errors listing options") {
    std::string text = kMinimal1d;
    const std::string from = R"("metric": "quantum_potential.at_origin")";
    text.replace(text.find(from), from.size(), R"("metric": "no_such.metric")");
    Scenario sc = parse_scenario(text, "", "inline");
    try {
        run_scenario(sc);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("no_such.metric") != std::string::npos);
        CHECK(std::string(e.what()).find("quantum_potential.sup") != std::string::npos);
    }

    Scenario sd = parse_scenario(kMinimal1d, "", "inline");
    sd.dumps = {"unheard_of"};
    try {
        run_scenario(sd);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config);
        CHECK(std::string(e.what()).find("unheard_of") != std::string::npos);
        CHECK(std::string(e.what()).find("V_q") != std::string::npos);
    }
}

TEST_CASE("csv field sources round-trip a dumped table") {
    // Dump V_q from the analytic run, feed it back in as the density of a
    // second scenario via file input, and confirm identical bytes.
    Scenario sc = parse_scenario(kMinimal1d, "", "inline");
    sc.dumps = {"rho"};
    RunResult first = run_scenario(sc);

    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "madelung_scenario_test";
    fs::create_directories(dir);
    const fs::path csv = dir / "rho.csv";
    write_text_file(csv.string(), to_csv(first.dumps[0].table));

    std::string text = kMinimal1d;
    const std::string from = R"({"kind": "gaussian", "rho0": 1.0, "a": 1.0, "center": [0.0]})";
    const std::string to = R"({"kind": "csv", "path": "rho.csv"})";
    text.replace(text.find(from), from.size(), to);
    Scenario sc2 = parse_scenario(text, dir.string(), "inline");
    RunOptions opt;
    opt.with_timestamp = false;
    RunResult second = run_scenario(sc2, opt);
    CHECK(second.pass);
    // The file round-trip reproduces the density bitwise, so the derived
    // check value matches the analytic run exactly.
    CHECK(second.checks[0].value == first.checks[0].value);

    fs::remove_all(dir);

    // A file that does not exist is a config error.
    std::string missing = text;
    const std::string mfrom = R"("path": "rho.csv")";
    missing.replace(missing.find(mfrom), mfrom.size(), R"("path": "absent.csv")");
    CHECK_THROWS_AS(parse_scenario(missing, dir.string(), "inline"), Error);
}

TEST_CASE("the refined companion halves spacings and doubles curve samples") {
    Scenario sc = parse_scenario(kMinimal1d, "", "inline");
    nlohmann::ordered_json fine = refined_config(sc.config);
    CHECK(fine.at("grid").at("shape").get<int>() == 65);
    CHECK(fine.at("grid").at("spacing").get<double>() == 0.0625);

    Scenario helix = load_bundled_scenario("helix_3_4");
    nlohmann::ordered_json fine_curve = refined_config(helix.config);
    CHECK(fine_curve.at("curve").at("samples").get<int>() == 4000);
}
