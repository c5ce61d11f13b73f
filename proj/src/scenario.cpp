#include "madelung/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include "madelung/csvio.hpp"
#include "madelung/error.hpp"
#include "madelung/expression.hpp"

namespace madelung {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void schema_fail(const std::string& where, const std::string& what) {
    fail(ErrorKind::parse, "config " + where + ": " + what);
}

const ojson& member(const ojson& obj, const std::string& where, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_fail(where, std::string("missing required key '") + key + "'");
    return *it;
}

double as_double(const ojson& v, const std::string& where) {
    if (!v.is_number()) schema_fail(where, "expected a number");
    return v.get<double>();
}

int as_int(const ojson& v, const std::string& where) {
    if (!v.is_number_integer()) schema_fail(where, "expected an integer");
    return v.get<int>();
}

bool as_bool(const ojson& v, const std::string& where) {
    if (!v.is_boolean()) schema_fail(where, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const ojson& v, const std::string& where) {
    if (!v.is_string()) schema_fail(where, "expected a string");
    return v.get<std::string>();
}

std::vector<double> as_double_array(const ojson& v, const std::string& where) {
    if (!v.is_array()) schema_fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_double(e, where));
    return out;
}

void reject_unknown_keys(const ojson& obj, const std::string& where,
                         std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) schema_fail(where, "unknown key '" + key + "'");
    }
}

// ---------------------------------------------------------------------------
// Grid
// ---------------------------------------------------------------------------

GridPtr parse_grid(const ojson& spec) {
    if (!spec.is_object()) schema_fail("grid", "expected an object");
    reject_unknown_keys(spec, "grid", {"shape", "spacing", "origin", "signature"});

    std::array<int, kMaxDim> shape{};
    int dim = 0;
    const ojson& shape_spec = member(spec, "grid", "shape");
    if (shape_spec.is_array()) {
        if (shape_spec.empty() || shape_spec.size() > kMaxDim)
            schema_fail("grid.shape", "expected 1 to 4 entries");
        for (const auto& e : shape_spec) shape[static_cast<std::size_t>(dim++)] = as_int(e, "grid.shape");
    } else {
        shape[0] = as_int(shape_spec, "grid.shape");
        dim = 1;
    }

    std::array<double, kMaxDim> spacing{};
    const ojson& spacing_spec = member(spec, "grid", "spacing");
    if (spacing_spec.is_array()) {
        if (static_cast<int>(spacing_spec.size()) != dim)
            schema_fail("grid.spacing", "expected one entry per axis");
        for (int a = 0; a < dim; ++a)
            spacing[static_cast<std::size_t>(a)] = as_double(spacing_spec[static_cast<std::size_t>(a)], "grid.spacing");
    } else {
        const double h = as_double(spacing_spec, "grid.spacing");
        for (int a = 0; a < dim; ++a) spacing[static_cast<std::size_t>(a)] = h;
    }

    std::array<double, kMaxDim> origin{};
    const ojson& origin_spec = member(spec, "grid", "origin");
    if (origin_spec.is_string()) {
        if (origin_spec.get<std::string>() != "centered")
            schema_fail("grid.origin", "expected an array or \"centered\"");
        for (int a = 0; a < dim; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            origin[ua] = -0.5 * spacing[ua] * (shape[ua] - 1);
        }
    } else {
        const auto entries = as_double_array(origin_spec, "grid.origin");
        if (static_cast<int>(entries.size()) != dim)
            schema_fail("grid.origin", "expected one entry per axis");
        for (int a = 0; a < dim; ++a) origin[static_cast<std::size_t>(a)] = entries[static_cast<std::size_t>(a)];
    }

    std::string signature = "euclidean";
    if (spec.contains("signature")) signature = as_string(spec["signature"], "grid.signature");
    if (signature == "euclidean") return Grid::euclidean(dim, shape, spacing, origin);
    if (signature == "euclidean_time") return Grid::euclidean_with_time(dim, shape, spacing, origin);
    if (signature == "lorentzian") return Grid::lorentzian(dim, shape, spacing, origin);
    schema_fail("grid.signature",
                "expected \"euclidean\", \"euclidean_time\", or \"lorentzian\"");
}

// ---------------------------------------------------------------------------
// Field sources
// ---------------------------------------------------------------------------

enum class Slot { density, amplitude, action, potential, surface };

const char* slot_name(Slot s) {
    switch (s) {
        case Slot::density: return "density";
        case Slot::amplitude: return "amplitude";
        case Slot::action: return "action";
        case Slot::potential: return "potential";
        case Slot::surface: return "surface";
    }
    return "?";
}

/// Squared spatial distance from `center` (time axis never contributes).
double spatial_r2(const Grid& grid, const std::array<double, kMaxDim>& x,
                  const std::vector<double>& center) {
    double r2 = 0.0;
    std::size_t sp = 0;
    for (const int a : grid.spatial_axes()) {
        const double d = x[static_cast<std::size_t>(a)] - (sp < center.size() ? center[sp] : 0.0);
        r2 += d * d;
        ++sp;
    }
    return r2;
}

ScalarField realize_source(const ojson& spec, Slot slot, GridPtr grid,
                           const Scenario& sc, const std::string& base_dir) {
    const std::string where = std::string("fields.") + slot_name(slot);
    if (!grid) schema_fail(where, "a grid is required for field sources");
    if (!spec.is_object()) schema_fail(where, "expected an object with a 'kind'");
    const std::string kind = as_string(member(spec, where, "kind"), where + ".kind");

    const auto require_slot = [&](std::initializer_list<Slot> allowed) {
        for (const Slot s : allowed)
            if (s == slot) return;
        std::string names;
        for (const Slot s : allowed) {
            if (!names.empty()) names += " or ";
            names += slot_name(s);
        }
        schema_fail(where, "source kind '" + kind + "' is only valid for the " + names + " field");
    };

    ScalarField f = make_scalar(grid);

    if (kind == "constant") {
        reject_unknown_keys(spec, where, {"kind", "value"});
        const double v = as_double(member(spec, where, "value"), where + ".value");
        for (auto& e : f.values) e = v;
        return f;
    }

    if (kind == "expression") {
        reject_unknown_keys(spec, where, {"kind", "expression"});
        const std::string text = as_string(member(spec, where, "expression"), where + ".expression");
        return sample_expression(text, grid, slot_name(slot));
    }

    if (kind == "csv") {
        reject_unknown_keys(spec, where, {"kind", "path"});
        std::string path = as_string(member(spec, where, "path"), where + ".path");
        if (!path.empty() && path[0] != '/' && !base_dir.empty()) path = base_dir + "/" + path;
        return read_scalar_csv(read_text_file(path), grid, "field file '" + path + "'");
    }

    if (kind == "gaussian") {
        require_slot({Slot::density});
        reject_unknown_keys(spec, where, {"kind", "rho0", "a", "center"});
        const double rho0 = as_double(member(spec, where, "rho0"), where + ".rho0");
        const double a = as_double(member(spec, where, "a"), where + ".a");
        if (!(rho0 > 0.0))
            fail(ErrorKind::constraint, where + ": the peak density rho0 must be positive");
        if (!(a > 0.0))
            fail(ErrorKind::constraint, where + ": the falloff rate a must be positive");
        std::vector<double> center;
        if (spec.contains("center")) center = as_double_array(spec["center"], where + ".center");
        if (center.size() > grid->spatial_axes().size())
            schema_fail(where + ".center", "more entries than spatial axes");
        fill(f, [&](const std::array<double, kMaxDim>& x) {
            return rho0 * std::exp(-a * spatial_r2(*grid, x, center));
        });
        return f;
    }

    if (kind == "exp_linear") {
        require_slot({Slot::density});
        reject_unknown_keys(spec, where, {"kind", "a"});
        const auto slope = as_double_array(member(spec, where, "a"), where + ".a");
        if (slope.size() > grid->spatial_axes().size())
            schema_fail(where + ".a", "more entries than spatial axes");
        fill(f, [&](const std::array<double, kMaxDim>& x) {
            double arg = 0.0;
            std::size_t sp = 0;
            for (const int ax : grid->spatial_axes()) {
                if (sp >= slope.size()) break;
                arg += slope[sp++] * x[static_cast<std::size_t>(ax)];
            }
            return std::exp(arg);
        });
        return f;
    }

    if (kind == "plane_wave") {
        require_slot({Slot::action});
        reject_unknown_keys(spec, where, {"kind", "k", "omega"});
        const auto k = as_double_array(member(spec, where, "k"), where + ".k");
        const double omega = as_double(member(spec, where, "omega"), where + ".omega");
        if (k.size() > grid->spatial_axes().size())
            schema_fail(where + ".k", "more entries than spatial axes");
        const bool has_time = grid->has_time_axis();
        const double hbar = sc.hbar;
        fill(f, [&](const std::array<double, kMaxDim>& x) {
            double phase = 0.0;
            std::size_t sp = 0;
            for (const int ax : grid->spatial_axes()) {
                if (sp >= k.size()) break;
                phase += k[sp++] * x[static_cast<std::size_t>(ax)];
            }
            if (has_time) phase -= omega * x[0];
            return hbar * phase;
        });
        return f;
    }

    if (kind == "oscillator_ground") {
        require_slot({Slot::amplitude, Slot::potential});
        reject_unknown_keys(spec, where, {"kind", "omega0", "center"});
        const double omega0 = as_double(member(spec, where, "omega0"), where + ".omega0");
        if (!(omega0 > 0.0))
            fail(ErrorKind::constraint, where + ": the oscillator frequency omega0 must be positive");
        std::vector<double> center;
        if (spec.contains("center")) center = as_double_array(spec["center"], where + ".center");
        const double m = sc.mass, hbar = sc.hbar;
        if (slot == Slot::amplitude) {
            fill(f, [&](const std::array<double, kMaxDim>& x) {
                return std::exp(-m * omega0 * spatial_r2(*grid, x, center) / (2.0 * hbar));
            });
        } else {
            fill(f, [&](const std::array<double, kMaxDim>& x) {
                return 0.5 * m * omega0 * omega0 * spatial_r2(*grid, x, center);
            });
        }
        return f;
    }

    schema_fail(where + ".kind", "unknown source kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Curves
// ---------------------------------------------------------------------------

void parse_curve(const ojson& spec, Scenario& sc) {
    const std::string where = "curve";
    if (!spec.is_object()) schema_fail(where, "expected an object with a 'kind'");
    const std::string kind = as_string(member(spec, where, "kind"), where + ".kind");

    if (kind == "helix") {
        reject_unknown_keys(spec, where, {"kind", "radius", "pitch", "samples"});
        const double radius = as_double(member(spec, where, "radius"), where + ".radius");
        const double pitch = as_double(member(spec, where, "pitch"), where + ".pitch");
        const int samples = as_int(member(spec, where, "samples"), where + ".samples");
        if (!(radius > 0.0)) fail(ErrorKind::constraint, "curve: helix radius must be positive");
        if (!(pitch >= 0.0)) fail(ErrorKind::constraint, "curve: helix pitch must be non-negative");
        if (samples < 16 || samples > 20000)
            fail(ErrorKind::constraint,
                 "curve: sample count must lie in [16, 20000] (desk-scale budget)");

        // One full turn, sampled uniformly in arclength with two extra
        // samples beyond each end so the frame stencils cover the whole turn.
        const double c = std::sqrt(radius * radius + pitch * pitch);
        const double span = 2.0 * 3.14159265358979323846 * c;  // arclength of a turn
        const double d = span / samples;
        std::vector<Vec3> pts;
        for (int i = 0; i < samples + 5; ++i) {
            const double s = -2.0 * d + d * i;
            const double theta = s / c;
            pts.push_back({radius * std::cos(theta), radius * std::sin(theta),
                           pitch * theta});
        }
        sc.curve = make_sampled_curve(std::move(pts), {});
        sc.curve_samples = samples;
        return;
    }

    if (kind == "csv") {
        reject_unknown_keys(spec, where, {"kind", "path", "samples"});
        std::string path = as_string(member(spec, where, "path"), where + ".path");
        if (!path.empty() && path[0] != '/' && !sc.base_dir.empty())
            path = sc.base_dir + "/" + path;
        sc.curve = read_curve_csv(read_text_file(path), "curve file '" + path + "'");
        // Default: resample to the supplied point count (the pipeline always
        // resamples to samples + 5 and trims two samples per end).
        sc.curve_samples = spec.contains("samples")
                               ? as_int(spec["samples"], where + ".samples")
                               : static_cast<int>(sc.curve->points.size()) - 5;
        if (sc.curve_samples < 12)
            fail(ErrorKind::constraint, "curve: too few samples for frame construction");
        return;
    }

    schema_fail(where + ".kind", "unknown curve kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Strain
// ---------------------------------------------------------------------------

void parse_strain(const ojson& spec, Scenario& sc) {
    const std::string where = "strain";
    if (!sc.grid) schema_fail(where, "a grid is required");
    if (!spec.is_object()) schema_fail(where, "expected an object");
    reject_unknown_keys(spec, where, {"components"});
    const ojson& comps = member(spec, where, "components");
    if (!comps.is_object()) schema_fail(where + ".components", "expected an object");

    MatrixField e = make_matrix(sc.grid, Symmetry::symmetric);
    const int d = sc.grid->dim();
    for (const auto& [key, value] : comps.items()) {
        if (key.size() != 2 || !std::isdigit(static_cast<unsigned char>(key[0])) ||
            !std::isdigit(static_cast<unsigned char>(key[1])))
            schema_fail(where + ".components", "component keys are two digits, e.g. \"01\"");
        const int mu = key[0] - '0';
        const int nu = key[1] - '0';
        if (mu >= d || nu >= d)
            schema_fail(where + ".components", "component '" + key + "' outside the grid dimension");
        if (mu > nu)
            schema_fail(where + ".components",
                        "specify the upper triangle only (component '" + key + "')");
        ScalarField comp = make_scalar(sc.grid);
        if (value.is_number()) {
            const double v = value.get<double>();
            for (auto& x : comp.values) x = v;
        } else if (value.is_string()) {
            comp = sample_expression(value.get<std::string>(), sc.grid,
                                     ("strain component " + key).c_str());
        } else {
            schema_fail(where + ".components", "expected a number or expression string");
        }
        for (std::size_t p = 0; p < comp.values.size(); ++p) {
            e.at(p, mu, nu) = comp.values[p];
            e.at(p, nu, mu) = comp.values[p];
        }
    }
    sc.strain_lower = std::move(e);
}

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

std::vector<CheckSpec> parse_checks(const ojson& list, const Scenario& sc) {
    if (!list.is_array()) schema_fail("checks", "expected an array");
    std::vector<CheckSpec> out;
    std::set<std::string> seen;
    for (const auto& entry : list) {
        const std::string where = "checks[" + std::to_string(out.size()) + "]";
        if (!entry.is_object()) schema_fail(where, "expected an object");
        reject_unknown_keys(entry, where, {"id", "metric", "target", "tol", "tol_h2"});
        CheckSpec c;
        c.id = as_string(member(entry, where, "id"), where + ".id");
        c.metric = as_string(member(entry, where, "metric"), where + ".metric");
        if (!seen.insert(c.id).second) schema_fail(where, "duplicate check id '" + c.id + "'");
        if (entry.contains("target")) c.target = as_double(entry["target"], where + ".target");
        const bool has_tol = entry.contains("tol");
        const bool has_h2 = entry.contains("tol_h2");
        if (has_tol == has_h2)
            schema_fail(where, "exactly one of 'tol' and 'tol_h2' is required");
        if (has_tol) {
            c.tol = as_double(entry["tol"], where + ".tol");
        } else {
            if (!sc.grid) schema_fail(where, "'tol_h2' needs a grid to supply h");
            c.tol_is_h2 = true;
            c.h2_mult = as_double(entry["tol_h2"], where + ".tol_h2");
            const double h = sc.grid->max_spacing();
            c.tol = c.h2_mult * h * h;
        }
        if (c.tol < 0.0) schema_fail(where, "tolerance must be non-negative");
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenario assembly
// ---------------------------------------------------------------------------

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir,
                        const std::string& label) {
    ojson doc;
    try {
        doc = ojson::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::parse, label + ": " + e.what());
    }
    if (!doc.is_object()) fail(ErrorKind::parse, label + ": top level must be an object");

    reject_unknown_keys(doc, "top level",
                        {"name", "group", "grid", "constants", "stationary", "fields", "curve",
                         "stiffness", "plate", "strain", "epsilon_sweep", "four_velocity",
                         "frame_components", "outputs", "dumps", "checks"});

    Scenario sc;
    sc.base_dir = base_dir;
    sc.config = doc;
    sc.name = as_string(member(doc, "top level", "name"), "name");
    if (doc.contains("group")) sc.group = as_string(doc["group"], "group");

    if (doc.contains("constants")) {
        const ojson& cs = doc["constants"];
        if (!cs.is_object()) schema_fail("constants", "expected an object");
        reject_unknown_keys(cs, "constants", {"hbar", "mass", "m0", "c"});
        if (cs.contains("hbar")) sc.hbar = as_double(cs["hbar"], "constants.hbar");
        if (cs.contains("mass") && cs.contains("m0"))
            schema_fail("constants", "'mass' and 'm0' are synonyms; give only one");
        if (cs.contains("mass")) sc.mass = as_double(cs["mass"], "constants.mass");
        if (cs.contains("m0")) sc.mass = as_double(cs["m0"], "constants.m0");
        if (cs.contains("c")) sc.c = as_double(cs["c"], "constants.c");
        if (!(sc.hbar > 0.0) || !(sc.mass > 0.0) || !(sc.c > 0.0))
            fail(ErrorKind::constraint, "constants: hbar, mass, and c must be positive");
    }
    if (doc.contains("stationary")) sc.stationary = as_bool(doc["stationary"], "stationary");

    if (doc.contains("grid")) sc.grid = parse_grid(doc["grid"]);

    if (doc.contains("fields")) {
        const ojson& fields = doc["fields"];
        if (!fields.is_object()) schema_fail("fields", "expected an object");
        reject_unknown_keys(fields, "fields",
                            {"density", "amplitude", "action", "potential", "surface"});
        if (fields.contains("density") && fields.contains("amplitude"))
            schema_fail("fields", "give either 'density' or 'amplitude', not both");
        if (fields.contains("density")) {
            ScalarField rho = realize_source(fields["density"], Slot::density, sc.grid, sc, base_dir);
            ScalarField amp = make_scalar(sc.grid);
            for (std::size_t p = 0; p < rho.values.size(); ++p) {
                if (rho.values[p] < 0.0)
                    fail(ErrorKind::constraint,
                         "fields.density: the density must be non-negative everywhere");
                amp.values[p] = std::sqrt(rho.values[p]);
            }
            sc.density = std::move(rho);
            sc.amplitude = std::move(amp);
        }
        if (fields.contains("amplitude"))
            sc.amplitude = realize_source(fields["amplitude"], Slot::amplitude, sc.grid, sc, base_dir);
        if (fields.contains("action"))
            sc.action = realize_source(fields["action"], Slot::action, sc.grid, sc, base_dir);
        if (fields.contains("potential"))
            sc.potential = realize_source(fields["potential"], Slot::potential, sc.grid, sc, base_dir);
        if (fields.contains("surface"))
            sc.surface = realize_source(fields["surface"], Slot::surface, sc.grid, sc, base_dir);
    }

    if (doc.contains("curve")) parse_curve(doc["curve"], sc);

    if (doc.contains("stiffness")) {
        const ojson& rows = doc["stiffness"];
        if (!rows.is_array() || rows.size() != 3) schema_fail("stiffness", "expected 3 rows");
        Mat3 a{};
        for (int r = 0; r < 3; ++r) {
            const auto row = as_double_array(rows[static_cast<std::size_t>(r)], "stiffness");
            if (row.size() != 3) schema_fail("stiffness", "expected 3 entries per row");
            for (int c = 0; c < 3; ++c) a[static_cast<std::size_t>(r * 3 + c)] = row[static_cast<std::size_t>(c)];
        }
        sc.stiffness = make_stiffness(a);
    }

    if (doc.contains("plate")) {
        const ojson& pl = doc["plate"];
        if (!pl.is_object()) schema_fail("plate", "expected an object");
        reject_unknown_keys(pl, "plate", {"A", "B", "C", "a", "b", "c"});
        PlateCoefficients pc;
        pc.A = as_double(member(pl, "plate", "A"), "plate.A");
        pc.B = as_double(member(pl, "plate", "B"), "plate.B");
        pc.C = as_double(member(pl, "plate", "C"), "plate.C");
        pc.a = as_double(member(pl, "plate", "a"), "plate.a");
        pc.b = as_double(member(pl, "plate", "b"), "plate.b");
        pc.c = as_double(member(pl, "plate", "c"), "plate.c");
        sc.plate = pc;
    }

    if (doc.contains("strain")) parse_strain(doc["strain"], sc);

    if (doc.contains("epsilon_sweep")) {
        sc.epsilon_sweep = as_double_array(doc["epsilon_sweep"], "epsilon_sweep");
        if (sc.epsilon_sweep.size() < 2)
            schema_fail("epsilon_sweep", "need at least two strain magnitudes for a slope");
        for (const double e : sc.epsilon_sweep)
            if (!(e > 0.0) || !(e < 1.0))
                fail(ErrorKind::constraint, "epsilon_sweep: entries must lie in (0, 1)");
    }

    if (doc.contains("four_velocity")) {
        const auto u = as_double_array(doc["four_velocity"], "four_velocity");
        if (u.size() != 4) schema_fail("four_velocity", "expected 4 components");
        sc.four_velocity = std::array<double, 4>{u[0], u[1], u[2], u[3]};
    }

    if (doc.contains("frame_components")) {
        const auto fc = as_double_array(doc["frame_components"], "frame_components");
        if (fc.empty() || fc.size() > kMaxDim)
            schema_fail("frame_components", "expected 1 to 4 entries");
        sc.frame_components.fill(0.0);
        for (std::size_t i = 0; i < fc.size(); ++i) sc.frame_components[i] = fc[i];
    }

    const ojson& outputs = member(doc, "top level", "outputs");
    if (!outputs.is_array()) schema_fail("outputs", "expected an array of operation names");
    for (const auto& o : outputs) sc.outputs.push_back(as_string(o, "outputs"));

    if (doc.contains("dumps")) {
        const ojson& dumps = doc["dumps"];
        if (!dumps.is_array()) schema_fail("dumps", "expected an array of field names");
        for (const auto& d : dumps) sc.dumps.push_back(as_string(d, "dumps"));
    }

    if (doc.contains("checks")) sc.checks = parse_checks(doc["checks"], sc);

    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::string base_dir;
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) base_dir = path.substr(0, slash);
    return parse_scenario(read_text_file(path), base_dir, "'" + path + "'");
}

nlohmann::ordered_json refined_config(const ojson& config) {
    ojson out = config;
    if (out.contains("fields")) {
        for (const auto& [name, spec] : out["fields"].items()) {
            if (spec.is_object() && spec.contains("kind") && spec["kind"] == "csv")
                fail(ErrorKind::constraint,
                     "refinement: field '" + name +
                         "' is file-backed and cannot be re-sampled at half spacing");
        }
    }
    if (out.contains("curve") && out["curve"].contains("kind") && out["curve"]["kind"] == "csv")
        fail(ErrorKind::constraint,
             "refinement: a file-backed curve cannot be re-sampled at half spacing");

    if (out.contains("grid")) {
        ojson& grid = out["grid"];
        const bool centered = grid.contains("origin") && grid["origin"].is_string();
        // Resolve "centered" against the coarse shape first so the refined
        // grid keeps exactly the same extent and point locations.
        std::vector<int> shape;
        if (grid["shape"].is_array())
            for (const auto& e : grid["shape"]) shape.push_back(e.get<int>());
        else
            shape.push_back(grid["shape"].get<int>());
        std::vector<double> spacing;
        if (grid["spacing"].is_array())
            for (const auto& e : grid["spacing"]) spacing.push_back(e.get<double>());
        else
            for (std::size_t i = 0; i < shape.size(); ++i)
                spacing.push_back(grid["spacing"].get<double>());
        if (centered) {
            std::vector<double> origin;
            for (std::size_t i = 0; i < shape.size(); ++i)
                origin.push_back(-0.5 * spacing[i] * (shape[i] - 1));
            grid["origin"] = origin;
        }
        std::vector<int> fine_shape;
        std::vector<double> fine_spacing;
        for (std::size_t i = 0; i < shape.size(); ++i) {
            fine_shape.push_back(2 * shape[i] - 1);
            fine_spacing.push_back(0.5 * spacing[i]);
        }
        grid["shape"] = fine_shape;
        grid["spacing"] = fine_spacing;
    }
    if (out.contains("curve") && out["curve"].contains("samples"))
        out["curve"]["samples"] = 2 * out["curve"]["samples"].get<int>();

    // Halved spacing means every h^2-scaled check tolerance tightens by 4 on
    // re-parse; nothing else changes.
    return out;
}

Scenario load_bundled_scenario(const std::string& name) {
    return parse_scenario(bundled_scenario_text(name), "", "bundled scenario '" + name + "'");
}

}  // namespace madelung
