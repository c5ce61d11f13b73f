#pragma once

// Scenario ingestion: a JSON description of a grid (or curve), closed-form or
// file-based field sources, physical constants, requested operations, and
// declared pass/fail checks. Parsing validates everything up front — catalog
// parameter ranges, expression syntax, referenced files — before any
// computation starts.
//
// Schema (all numbers double; see the repository README for the full
// reference):
//   name        string (required)
//   group       string (verification-suite grouping, optional)
//   grid        { shape: int|[..], spacing: num|[..], origin: [..]|"centered",
//                 signature: "euclidean"|"euclidean_time"|"lorentzian" }
//   constants   { hbar, mass (or m0), c } — defaults 1, echoed in reports
//   stationary  bool (declares a time-independent state on a spatial grid)
//   fields      { density|amplitude, action, potential, surface : source }
//               source = { kind: "constant"|"expression"|"csv"|"gaussian"|
//                          "exp_linear"|"plane_wave"|"oscillator_ground", ... }
//   curve       { kind: "helix", radius, pitch, samples } |
//               { kind: "csv", path }
//   stiffness   3x3 array (curve couple-stress law)
//   plate       { A, B, C, a, b, c } (plate couple-stress coefficients)
//   strain      { components: { "<mu><nu>": expression|number } } (upper
//               triangle of the metric strain on a Lorentzian grid)
//   epsilon_sweep   [..] (inverse-strain first-order-error sweep)
//   four_velocity   [u0..u3] (energy-momentum observer)
//   frame_components [..] (constant covector for the compatibility checks)
//   outputs     [operation names] (required)
//   dumps       [field names] written as CSV by the run command
//   checks      [{ id, metric, target (default 0), tol | tol_h2 }]
//               tol is an absolute bound on |value - target|; tol_h2 scales
//               with the squared grid spacing: tol = tol_h2 * h^2.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "madelung/grid.hpp"
#include "madelung/wire.hpp"

namespace madelung {

struct CheckSpec {
    std::string id;
    std::string metric;
    double target = 0.0;
    double tol = 0.0;
    bool tol_is_h2 = false;  // tol was given as a multiple of h^2
    double h2_mult = 0.0;
};

struct Scenario {
    std::string name;
    std::string group;

    GridPtr grid;  // null for curve-only scenarios
    std::optional<ScalarField> amplitude;  // R; sqrt of the density source
    std::optional<ScalarField> density;    // as supplied (when given directly)
    std::optional<ScalarField> action;
    std::optional<ScalarField> potential;
    std::optional<ScalarField> surface;
    std::optional<MatrixField> strain_lower;

    std::optional<SampledCurve> curve;
    int curve_samples = 0;
    std::optional<StiffnessMatrix> stiffness;
    std::optional<PlateCoefficients> plate;
    std::optional<std::array<double, 4>> four_velocity;
    std::vector<double> epsilon_sweep;
    std::array<double, kMaxDim> frame_components{1.0, 1.0, 1.0, 1.0};

    double hbar = 1.0;
    double mass = 1.0;
    double c = 1.0;
    bool stationary = false;

    std::vector<std::string> outputs;
    std::vector<std::string> dumps;
    std::vector<CheckSpec> checks;

    nlohmann::ordered_json config;  // parsed document, echoed into reports
    std::string base_dir;           // directory for relative csv paths
};

/// Parses and fully validates a scenario document. `base_dir` resolves
/// relative file references; `label` names the source in error messages.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const std::string& label);

Scenario load_scenario_file(const std::string& path);

/// The h -> h/2 companion of a config: every grid axis gets shape 2n-1 at
/// half the spacing (same extent, every coarse point retained), and curve
/// scenarios double their sample count. File-backed fields cannot be
/// refined; requesting it is a constraint violation.
nlohmann::ordered_json refined_config(const nlohmann::ordered_json& config);

/// Built-in scenario catalog (embedded copies of the files under scenarios/).
const std::vector<std::string>& bundled_scenario_names();
const std::string& bundled_scenario_text(const std::string& name);
Scenario load_bundled_scenario(const std::string& name);

}  // namespace madelung
