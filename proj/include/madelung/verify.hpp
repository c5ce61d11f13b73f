#pragma once

// Verification suite: runs every bundled scenario's declared checks plus a
// set of cross-module reference comparisons that need code-level access
// (stress-block equality across the spatial/spacetime routes, rigid-motion
// invariance of curve rates, vierbein algebra, symbolic curvature probes,
// report determinism). A substring filter restricts by scenario name, group,
// or row id; the refine flag adds h -> h/2 convergence orders for every
// check declared with an h^2 tolerance.

#include <string>

#include "json.hpp"

namespace madelung {

struct VerifyOptions {
    std::string filter;         // substring; empty = everything
    bool refine = false;        // add convergence-order rows
    bool with_timestamp = true;
};

struct VerifyResult {
    nlohmann::ordered_json report;
    std::size_t rows = 0;      // individual pass/fail rows evaluated
    std::size_t failures = 0;
    bool pass = true;
};

VerifyResult verify_suite(const VerifyOptions& opt = {});

}  // namespace madelung
