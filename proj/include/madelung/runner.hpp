#pragma once

// Pipeline orchestration: executes a scenario's requested operations in
// dependency order (each shared intermediate is computed at most once),
// collects named scalar metrics, evaluates the declared checks, optionally
// re-runs everything on the h -> h/2 companion grid to measure convergence
// orders, and assembles the deterministic JSON report plus any requested
// CSV dump tables.

#include <string>
#include <vector>

#include "json.hpp"
#include "madelung/csvio.hpp"
#include "madelung/scenario.hpp"

namespace madelung {

struct RunOptions {
    bool refine = false;       // add the h -> h/2 convergence table
    bool with_timestamp = true;
};

struct DumpEntry {
    std::string name;
    Table table;
};

struct CheckResult {
    std::string id;
    std::string metric;
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
};

struct RunResult {
    nlohmann::ordered_json report;
    std::vector<CheckResult> checks;
    std::vector<DumpEntry> dumps;              // the scenario's requested dumps
    std::vector<std::string> available_dumps;  // every dumpable field this run produced
    std::vector<std::string> warnings;
    bool pass = true;
};

RunResult run_scenario(const Scenario& sc, const RunOptions& opt = {});

/// Serializes the report with a trailing newline (the byte-identical unit the
/// determinism guarantee covers, modulo the timestamp field).
std::string report_to_string(const nlohmann::ordered_json& report);

}  // namespace madelung
