#include "madelung/verify.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "madelung/calculus.hpp"
#include "madelung/conformal_oracle.hpp"
#include "madelung/csvio.hpp"
#include "madelung/framestrain.hpp"
#include "madelung/grid.hpp"
#include "madelung/madelung.hpp"
#include "madelung/metricstrain.hpp"
#include "madelung/relativistic.hpp"
#include "madelung/runner.hpp"
#include "madelung/scenario.hpp"
#include "madelung/wire.hpp"

namespace madelung {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[80];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

// The mean-pressure null case: ln(density) harmonic across the spatial axes,
// so the trace of the stress tensor cancels pointwise.
const char* kHarmonicScenario = R"json({
  "name": "harmonic_logdensity",
  "group": "madelung",
  "grid": { "shape": [33, 33, 33], "spacing": 0.125, "origin": [-2.0, -2.0, -2.0] },
  "stationary": true,
  "fields": {
    "amplitude": { "kind": "expression", "expression": "exp(0.125*(x^2 - y^2))" }
  },
  "outputs": ["density", "mean_pressure", "stress_tensor", "constitutive_stress"],
  "checks": [
    { "id": "harmonic-mean-pressure", "metric": "pressure.sup", "tol_h2": 10.0 },
    { "id": "constitutive-identity", "metric": "constitutive.match_over_sup", "tol": 1e-12 }
  ]
})json";

// ---------------------------------------------------------------------------
// Suite rows built directly against the library
// ---------------------------------------------------------------------------

struct SuiteRow {
    std::string id;
    std::string group;
    double value = 0.0;
    double target = 0.0;
    double tol = 0.0;
    bool pass = false;
    bool has_order = false;
    bool order_exact = false;
    double order = 0.0;
    bool order_pass = false;
};

SuiteRow make_row(std::string id, std::string group, double value, double target, double tol) {
    SuiteRow r;
    r.id = std::move(id);
    r.group = std::move(group);
    r.value = value;
    r.target = target;
    r.tol = tol;
    r.pass = std::fabs(value - target) <= tol;
    return r;
}

/// Spatial block of the spacetime stress tensor against the purely spatial
/// stress of the same amplitude profile: the two code paths share their
/// stencil algebra, so the gap must sit at rounding level.
SuiteRow static_embedding_row() {
    const int n = 33;
    const double h = 0.15;
    const double x0 = -0.5 * h * (n - 1);
    auto g4 = Grid::lorentzian(4, {7, n, n, n}, {h, h, h, h}, {0.0, x0, x0, x0});
    auto g3 = Grid::euclidean(3, {n, n, n}, {h, h, h}, {x0, x0, x0});

    const auto amp = [](double x, double y, double z) {
        return std::exp(-0.5 * (x * x + y * y + z * z));
    };
    ScalarField r4 = make_scalar(g4);
    ScalarField s4 = make_scalar(g4);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g4->point_count(); ++p) {
        g4->point_coords(p, x);
        r4.values[p] = amp(x[1], x[2], x[3]);
        s4.values[p] = -x[0];
    }
    ScalarField r3 = make_scalar(g3);
    for (std::size_t p = 0; p < g3->point_count(); ++p) {
        g3->point_coords(p, x);
        r3.values[p] = amp(x[0], x[1], x[2]);
    }

    const MatrixField sigma4 =
        rel_stress_tensor(make_rel_wave_state(std::move(r4), std::move(s4), 1.0, 1.0, 1.0));
    const MatrixField sigma3 = stress_tensor(
        make_wave_state(std::move(r3), make_scalar(g3), std::nullopt, 1.0, 1.0, true));

    const double sup3 = norms(sigma3).sup;
    double gap = 0.0;
    std::array<int, kMaxDim> idx{};
    for (std::size_t q = 0; q < g3->point_count(); ++q) {
        if (!sigma3.mask[q]) continue;
        g3->unravel(q, idx);
        const std::array<int, kMaxDim> idx4{3, idx[0], idx[1], idx[2]};
        const std::size_t p = g4->ravel(idx4);
        if (!sigma4.mask[p]) continue;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                gap = std::max(gap,
                               std::fabs(sigma4.at(p, i + 1, j + 1) - sigma3.at(q, i, j)));
    }
    return make_row("static-embedding-stress-block", "relativistic", gap / sup3, 0.0, 1e-12);
}

SampledCurve circle_curve(double radius, int samples) {
    std::vector<Vec3> pts;
    for (int k = 0; k < samples; ++k) {
        const double theta = 2.0 * kPi * k / (samples - 1);
        pts.push_back({radius * std::cos(theta), radius * std::sin(theta), 0.0});
    }
    return make_sampled_curve(std::move(pts), {});
}

SuiteRow circle_length_row() {
    const double len = curve_length(circle_curve(2.0, 1000));
    return make_row("circle-arclength", "wire", len, 12.566370614359172, 1e-5);
}

Vec3 rotate(const Mat3& m, const Vec3& v) {
    Vec3 out{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            out[static_cast<std::size_t>(i)] +=
                m[static_cast<std::size_t>(i * 3 + j)] * v[static_cast<std::size_t>(j)];
    return out;
}

Mat3 rodrigues(Vec3 axis, double angle) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    for (double& a : axis) a /= n;
    const double c = std::cos(angle), s = std::sin(angle);
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const auto e = static_cast<std::size_t>(i * 3 + j);
            m[e] = (i == j ? c : 0.0) +
                   (1.0 - c) * axis[static_cast<std::size_t>(i)] * axis[static_cast<std::size_t>(j)];
        }
    m[1] -= s * axis[2];
    m[2] += s * axis[1];
    m[3] += s * axis[2];
    m[5] -= s * axis[0];
    m[6] -= s * axis[1];
    m[7] += s * axis[0];
    return m;
}

/// A rotated and shifted copy of a helix must report identical strain rates.
SuiteRow rigid_motion_row() {
    const double radius = 3.0, pitch = 4.0;
    const double c = std::sqrt(radius * radius + pitch * pitch);
    const int n = 505;
    const double ds = 10.0 * kPi / 500.0;
    const Mat3 rot = rodrigues({1.0, 1.0, 1.0}, 0.8);
    const Vec3 shift = {0.3, -1.2, 2.5};

    std::vector<Vec3> pts, moved;
    std::vector<double> params;
    for (int k = 0; k < n; ++k) {
        const double s = ds * (k - n / 2);
        const double theta = s / c;
        const Vec3 x = {radius * std::cos(theta), radius * std::sin(theta), pitch * theta};
        pts.push_back(x);
        Vec3 y = rotate(rot, x);
        for (int d = 0; d < 3; ++d) y[static_cast<std::size_t>(d)] += shift[static_cast<std::size_t>(d)];
        moved.push_back(y);
        params.push_back(s);
    }
    const StrainRates a = strain_rates(frenet_frame(make_sampled_curve(pts, params)), ds);
    const StrainRates b = strain_rates(frenet_frame(make_sampled_curve(moved, params)), ds);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.mask.size(); ++i) {
        if (!a.mask[i] || !b.mask[i]) continue;
        worst = std::max({worst, std::fabs(a.kappa[i] - b.kappa[i]),
                          std::fabs(a.lambda[i] - b.lambda[i]), std::fabs(a.tau[i] - b.tau[i])});
    }
    return make_row("rigid-motion-invariance", "wire", worst, 0.0, 1e-10);
}

/// Couple-stress/rate pairing along one helix turn: with unit stiffness the
/// integrand is kappa^2 + lambda^2 + tau^2 = 0.12^2 + 0.16^2 = 0.04, so the
/// work over 10*pi of wire is 0.4*pi.
SuiteRow virtual_work_row() {
    const double radius = 3.0, pitch = 4.0, c = 5.0;
    const int samples = 2000;
    const double span = 2.0 * kPi * c;
    const double d = span / samples;
    std::vector<Vec3> pts;
    for (int i = 0; i < samples + 5; ++i) {
        const double s = -2.0 * d + d * i;
        const double theta = s / c;
        pts.push_back({radius * std::cos(theta), radius * std::sin(theta), pitch * theta});
    }
    const SampledCurve u = arclength_resample(make_sampled_curve(std::move(pts), {}), samples + 5);
    const double ds = u.params[1] - u.params[0];
    const StrainRates sr = strain_rates(frenet_frame(u), ds);
    const auto m = wire_couple_stress(sr, make_stiffness({1, 0, 0, 0, 1, 0, 0, 0, 1}));
    return make_row("virtual-work-self-pairing", "wire", virtual_work(m, sr, ds),
                    1.2566370614359172, 1e-3);
}

SuiteRow flat_metric_row() {
    auto g = Grid::lorentzian(4, {5, 5, 5, 5}, {0.25, 0.25, 0.25, 0.25},
                              {-0.5, -0.5, -0.5, -0.5});
    const CurvatureStack st = curvature_stack(strain_from_deformation(make_matrix(g, Symmetry::symmetric)));
    const double worst = std::max({norms(st.riemann).sup, norms(st.ricci).sup,
                                   norms(st.scalar).sup, norms(st.einstein).sup});
    return make_row("flat-metric-zero-curvature", "metric", worst, 0.0, 0.0);
}

double conformal_deviation_at(int n, double h) {
    auto g = conformal_probe_grid(n, h);
    const CurvatureStack st = curvature_stack(strain_from_metric(conformal_probe_metric(g)));
    return conformal_probe_deviation(st, *g);
}

SuiteRow conformal_probe_row(bool refine) {
    const double h = 0.1;
    const double dev = conformal_deviation_at(13, h);
    SuiteRow row = make_row("conformal-curvature-probes", "metric", dev, 0.0, 5.0 * h * h);
    if (refine) {
        const double fine = conformal_deviation_at(25, h / 2.0);
        const ConvergenceOrder ord = convergence_order(dev, fine);
        row.has_order = true;
        row.order_exact = ord.exact;
        row.order = ord.order;
        row.order_pass = ord.exact || std::fabs(ord.order - 2.0) <= 0.2;
    }
    return row;
}

SuiteRow vierbein_boost_row() {
    auto g = Grid::lorentzian(4, {5, 5, 5, 5}, {0.25, 0.25, 0.25, 0.25},
                              {-0.5, -0.5, -0.5, -0.5});
    const double ch = std::cosh(0.6), sh = std::sinh(0.6);
    MatrixField boost = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        boost.at(p, 0, 0) = ch;
        boost.at(p, 0, 1) = sh;
        boost.at(p, 1, 0) = sh;
        boost.at(p, 1, 1) = ch;
        boost.at(p, 2, 2) = 1.0;
        boost.at(p, 3, 3) = 1.0;
    }
    const MatrixField m = vierbein_metric(make_vierbein(boost));
    double worst = 0.0;
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double want = (i == j) ? static_cast<double>(g->signature(i)) : 0.0;
                worst = std::max(worst, std::fabs(m.at(p, i, j) - want));
            }
    return make_row("vierbein-boost-preserves-metric", "metric", worst, 0.0, 1e-14);
}

SuiteRow vierbein_conformal_row() {
    auto g = Grid::lorentzian(4, {5, 5, 5, 5}, {0.25, 0.25, 0.25, 0.25},
                              {-0.5, -0.5, -0.5, -0.5});
    ScalarField r = make_scalar(g);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        r.values[p] = std::exp(0.1 * x[0] - 0.05 * x[1] + 0.07 * x[2] + 0.02 * x[3]);
    }
    MatrixField frame = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i) frame.at(p, i, i) = r.values[p];
    const MatrixField via_vierbein = vierbein_metric(make_vierbein(frame));
    const MatrixField via_conformal = deformed_metric(make_conformal(std::move(r)));
    double worst = 0.0;
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                worst = std::max(worst,
                                 std::fabs(via_vierbein.at(p, i, j) - via_conformal.at(p, i, j)));
    return make_row("vierbein-conformal-tie", "metric", worst, 0.0, 0.0);
}

/// Two in-process runs of the same scenario must serialize identically
/// (reports compared without the timestamp, dumps byte for byte).
SuiteRow determinism_row() {
    const RunOptions opt{false, false};
    const RunResult a = run_scenario(load_bundled_scenario("gaussian1d"), opt);
    const RunResult b = run_scenario(load_bundled_scenario("gaussian1d"), opt);
    bool same = report_to_string(a.report) == report_to_string(b.report) &&
                a.dumps.size() == b.dumps.size();
    if (same)
        for (std::size_t i = 0; i < a.dumps.size(); ++i)
            same = same && a.dumps[i].name == b.dumps[i].name &&
                   to_csv(a.dumps[i].table) == to_csv(b.dumps[i].table);
    return make_row("report-determinism", "cli", same ? 0.0 : 1.0, 0.0, 0.0);
}

ojson row_json(const SuiteRow& r) {
    ojson e = ojson::object();
    e["id"] = r.id;
    e["group"] = r.group;
    e["value"] = r.value;
    e["target"] = r.target;
    e["tol"] = r.tol;
    e["pass"] = r.pass;
    if (r.has_order) {
        if (r.order_exact)
            e["order"] = "exact";
        else
            e["order"] = r.order;
        e["order_pass"] = r.order_pass;
    }
    return e;
}

}  // namespace

VerifyResult verify_suite(const VerifyOptions& opt) {
    VerifyResult out;
    ojson report = ojson::object();
    report["tool"] = "madelung";
    report["format_version"] = 1;
    report["mode"] = "verify";
    if (opt.with_timestamp) report["timestamp"] = iso_timestamp();
    report["filter"] = opt.filter;
    report["refine"] = opt.refine;

    const auto selected = [&](const std::string& group, const std::string& name) {
        return opt.filter.empty() || contains(group, opt.filter) || contains(name, opt.filter);
    };

    // Scenario-declared checks (the bundled set plus the generated
    // harmonic-log-density companion).
    ojson scenarios = ojson::array();
    std::vector<std::pair<std::string, Scenario>> runs;
    for (const std::string& name : bundled_scenario_names())
        runs.emplace_back("bundled", load_bundled_scenario(name));
    runs.emplace_back("generated",
                      parse_scenario(kHarmonicScenario, "", "generated scenario"));

    for (auto& [origin, sc] : runs) {
        if (!selected(sc.group, sc.name)) continue;
        RunOptions ro;
        ro.refine = opt.refine;
        ro.with_timestamp = false;
        const RunResult rr = run_scenario(sc, ro);

        ojson entry = ojson::object();
        entry["name"] = sc.name;
        entry["group"] = sc.group;
        entry["origin"] = origin;
        entry["checks"] = rr.report.at("checks");
        out.rows += rr.checks.size();
        for (const CheckResult& c : rr.checks)
            if (!c.pass) ++out.failures;
        if (rr.report.contains("convergence")) {
            entry["convergence"] = rr.report.at("convergence");
            for (const auto& row : rr.report.at("convergence")) {
                ++out.rows;
                if (!row.at("pass").get<bool>()) ++out.failures;
            }
        }
        entry["warnings"] = rr.report.at("warnings");
        entry["pass"] = rr.pass;
        out.pass = out.pass && rr.pass;
        scenarios.push_back(std::move(entry));
    }
    report["scenarios"] = scenarios;

    // Cross-module rows.
    std::vector<SuiteRow> suite;
    const auto add = [&](SuiteRow row) {
        if (!selected(row.group, row.id)) return;
        suite.push_back(std::move(row));
    };
    if (selected("relativistic", "static-embedding-stress-block")) add(static_embedding_row());
    if (selected("wire", "circle-arclength")) add(circle_length_row());
    if (selected("wire", "rigid-motion-invariance")) add(rigid_motion_row());
    if (selected("wire", "virtual-work-self-pairing")) add(virtual_work_row());
    if (selected("metric", "flat-metric-zero-curvature")) add(flat_metric_row());
    if (selected("metric", "conformal-curvature-probes")) add(conformal_probe_row(opt.refine));
    if (selected("metric", "vierbein-boost-preserves-metric")) add(vierbein_boost_row());
    if (selected("metric", "vierbein-conformal-tie")) add(vierbein_conformal_row());
    if (selected("cli", "report-determinism")) add(determinism_row());

    ojson suite_rows = ojson::array();
    for (const SuiteRow& r : suite) {
        suite_rows.push_back(row_json(r));
        ++out.rows;
        if (!r.pass) ++out.failures;
        out.pass = out.pass && r.pass;
        if (r.has_order) {
            ++out.rows;
            if (!r.order_pass) ++out.failures;
            out.pass = out.pass && r.order_pass;
        }
    }
    report["suite_checks"] = suite_rows;

    ojson summary = ojson::object();
    summary["rows"] = out.rows;
    summary["failures"] = out.failures;
    report["summary"] = summary;
    report["pass"] = out.pass;
    out.report = std::move(report);
    return out;
}

}  // namespace madelung
