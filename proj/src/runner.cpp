#include "madelung/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "madelung/error.hpp"
#include "madelung/framestrain.hpp"
#include "madelung/madelung.hpp"
#include "madelung/metricstrain.hpp"
#include "madelung/relativistic.hpp"
#include "madelung/wire.hpp"

namespace madelung {

using ojson = nlohmann::ordered_json;

namespace {

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

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    Mat3 r{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k)
                s += a[static_cast<std::size_t>(i * 3 + k)] * b[static_cast<std::size_t>(k * 3 + j)];
            r[static_cast<std::size_t>(i * 3 + j)] = s;
        }
    return r;
}

Mat3 mat_axpy(const Mat3& base, double scale, const Mat3& add) {
    Mat3 r{};
    for (std::size_t e = 0; e < 9; ++e) r[e] = base[e] + scale * add[e];
    return r;
}

struct Stats {
    double min = 0.0, max = 0.0, mean = 0.0;
    std::size_t count = 0;
};

Stats stats_of(const std::vector<double>& v, const std::vector<std::uint8_t>& mask) {
    Stats s;
    double sum = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!mask.empty() && !mask[i]) continue;
        if (s.count == 0) {
            s.min = s.max = v[i];
        } else {
            s.min = std::min(s.min, v[i]);
            s.max = std::max(s.max, v[i]);
        }
        sum += v[i];
        ++s.count;
    }
    if (s.count) s.mean = sum / static_cast<double>(s.count);
    return s;
}

/// The grid point at coordinate zero on every axis, if it exists.
std::optional<std::size_t> origin_point(const Grid& grid) {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < grid.dim(); ++a) {
        const auto ua = static_cast<std::size_t>(a);
        const double pos = -grid.origin(a) / grid.spacing(a);
        const int i = static_cast<int>(std::lround(pos));
        if (i < 0 || i >= grid.shape(a)) return std::nullopt;
        if (std::fabs(grid.coord(a, i)) > 1e-9) return std::nullopt;
        idx[ua] = i;
    }
    return grid.ravel(idx);
}

// ---------------------------------------------------------------------------
// The per-scenario execution context
// ---------------------------------------------------------------------------

class Runner {
  public:
    Runner(const Scenario& sc, std::vector<std::string>& warnings)
        : sc_(sc), warnings_(warnings) {}

    void run_all() {
        std::set<std::string> seen;
        for (const std::string& op : sc_.outputs) {
            if (!seen.insert(op).second)
                fail(ErrorKind::config, "outputs: operation '" + op + "' listed twice");
            run_op(op);
        }
    }

    const std::vector<std::pair<std::string, ojson>>& op_reports() const { return op_reports_; }
    const std::map<std::string, double>& metrics() const { return metrics_; }
    const std::vector<std::pair<std::string, Table>>& dump_tables() const { return dumps_; }

  private:
    // ---- memoized intermediates -------------------------------------------
    const WaveState& wave() {
        if (!wave_) {
            require_grid("wave-state operations");
            if (sc_.grid->lorentzian())
                fail(ErrorKind::config,
                     "this operation runs on euclidean grids; the grid is lorentzian");
            if (!sc_.amplitude)
                fail(ErrorKind::config, "a density or amplitude field is required");
            ScalarField S = sc_.action ? *sc_.action : make_scalar(sc_.grid);
            std::optional<ScalarField> V;
            if (sc_.potential) V = *sc_.potential;
            wave_ = make_wave_state(*sc_.amplitude, std::move(S), std::move(V), sc_.hbar,
                                    sc_.mass, sc_.stationary);
        }
        return *wave_;
    }

    const RelWaveState& rel() {
        if (!rel_) {
            require_grid("relativistic operations");
            if (!sc_.grid->lorentzian())
                fail(ErrorKind::config,
                     "this operation runs on lorentzian grids; the grid is euclidean");
            if (!sc_.amplitude)
                fail(ErrorKind::config, "a density or amplitude field is required");
            ScalarField S = sc_.action ? *sc_.action : make_scalar(sc_.grid);
            rel_ = make_rel_wave_state(*sc_.amplitude, std::move(S), sc_.mass, sc_.hbar, sc_.c);
        }
        return *rel_;
    }

    const ConformalDeformation& conformal() {
        if (!conformal_) {
            require_grid("frame-deformation operations");
            if (!sc_.amplitude)
                fail(ErrorKind::config, "a density or amplitude field is required");
            conformal_ = make_conformal(*sc_.amplitude);
        }
        return *conformal_;
    }

    const MatrixField& stress() {
        if (!stress_) stress_ = sc_.grid && sc_.grid->lorentzian()
                                    ? rel_stress_tensor(rel())
                                    : stress_tensor(wave());
        return *stress_;
    }

    const MetricStrainField& metric_strain() {
        if (!metric_strain_) {
            if (!sc_.strain_lower)
                fail(ErrorKind::config, "a strain section is required for metric operations");
            metric_strain_ = strain_from_deformation(*sc_.strain_lower);
        }
        return *metric_strain_;
    }

    const RelFieldReport& rel_report() {
        if (!rel_report_) rel_report_ = rel_field_residuals(rel());
        return *rel_report_;
    }

    struct CurvePipeline {
        SampledCurve resampled;
        AdaptedFrame frames;
        StrainRates rates;
        double ds = 0.0;
    };

    const CurvePipeline& curve_pipeline() {
        if (!curve_) {
            if (!sc_.curve) fail(ErrorKind::config, "a curve section is required");
            CurvePipeline cp;
            const int n_out = sc_.curve_samples + 5;
            cp.resampled = arclength_resample(*sc_.curve, n_out);
            cp.ds = cp.resampled.params[1] - cp.resampled.params[0];
            cp.frames = frenet_frame(cp.resampled);
            cp.rates = strain_rates(cp.frames, cp.ds);
            curve_ = std::move(cp);
        }
        return *curve_;
    }

    // ---- bookkeeping ------------------------------------------------------
    void require_grid(const char* what) {
        if (!sc_.grid) fail(ErrorKind::config, std::string(what) + ": a grid is required");
    }

    ojson* current_op_ = nullptr;

    void metric(const std::string& name, double value) {
        if (!metrics_.emplace(name, value).second)
            fail(ErrorKind::internal_consistency, "metric '" + name + "' computed twice");
        (*current_op_)[name] = value;
    }

    void metric_norms(const std::string& prefix, const Norms& n) {
        metric(prefix + ".sup", n.sup);
        metric(prefix + ".l2", n.l2);
    }

    void dump(const std::string& name, Table table) {
        dumps_.emplace_back(name, std::move(table));
    }

    template <class F>
    void origin_metric(const std::string& name, const F& field, std::size_t comp,
                       std::size_t comps) {
        if (!sc_.grid) return;
        const auto p0 = origin_point(*sc_.grid);
        if (!p0 || !field.mask[*p0]) return;
        metric(name, field.values[*p0 * comps + comp]);
    }

    // ---- operations -------------------------------------------------------
    void run_op(const std::string& op) {
        ojson entry = ojson::object();
        current_op_ = &entry;

        if (op == "density") op_density();
        else if (op == "quantum_potential") op_quantum_potential();
        else if (op == "quantum_force") op_quantum_force();
        else if (op == "stress_tensor") op_stress_tensor();
        else if (op == "constitutive_stress") op_constitutive_stress();
        else if (op == "mean_pressure") op_mean_pressure();
        else if (op == "equilibrium_residual") op_equilibrium_residual();
        else if (op == "field_equations") op_field_equations();
        else if (op == "lagrangian_density") op_lagrangian_density();
        else if (op == "kg_residual") op_kg_residual();
        else if (op == "effective_mass") op_effective_mass();
        else if (op == "dispersion_residual") op_dispersion_residual();
        else if (op == "energy_momentum") op_energy_momentum();
        else if (op == "strain_one_form") op_strain_one_form();
        else if (op == "strain_differential") op_strain_differential();
        else if (op == "torsion") op_torsion();
        else if (op == "curvature_residual") op_curvature_residual();
        else if (op == "compatibility") op_compatibility();
        else if (op == "frame_rates") op_frame_rates();
        else if (op == "couple_stress") op_couple_stress();
        else if (op == "plate_couple_stress") op_plate_couple_stress();
        else if (op == "strain_tensor") op_strain_tensor();
        else if (op == "connection") op_connection();
        else if (op == "curvature") op_curvature();
        else if (op == "inverse_strain") op_inverse_strain();
        else if (op == "inverse_strain_sweep") op_inverse_strain_sweep();
        else
            fail(ErrorKind::config,
                 "outputs: unknown operation '" + op +
                     "'; available: density, quantum_potential, quantum_force, stress_tensor, "
                     "constitutive_stress, mean_pressure, equilibrium_residual, field_equations, "
                     "lagrangian_density, kg_residual, effective_mass, dispersion_residual, "
                     "energy_momentum, strain_one_form, strain_differential, torsion, "
                     "curvature_residual, compatibility, frame_rates, couple_stress, "
                     "plate_couple_stress, strain_tensor, connection, curvature, inverse_strain, "
                     "inverse_strain_sweep");

        op_reports_.emplace_back(op, std::move(entry));
        current_op_ = nullptr;
    }

    void op_density() {
        ScalarField rho;
        if (sc_.grid && sc_.grid->lorentzian()) {
            const RelWaveState& s = rel();
            rho = make_scalar(s.grid);
            rho.mask = s.R.mask;
            for (std::size_t p = 0; p < rho.values.size(); ++p)
                rho.values[p] = s.R.values[p] * s.R.values[p];
        } else {
            rho = density(wave());
        }
        metric_norms("density", norms(rho));
        origin_metric("density.at_origin", rho, 0, 1);
        dump("rho", scalar_table(rho, "rho"));
    }

    void op_quantum_potential() {
        const ScalarField vq = quantum_potential(wave());
        metric_norms("quantum_potential", norms(vq));
        origin_metric("quantum_potential.at_origin", vq, 0, 1);
        dump("V_q", scalar_table(vq, "V_q"));
    }

    void op_quantum_force() {
        const CovectorField fq = quantum_force(wave());
        metric_norms("quantum_force", norms(fq));
        dump("f_q", covector_table(fq, "f_q"));
    }

    void op_stress_tensor() {
        const MatrixField& sigma = stress();
        const Norms n = norms(sigma);
        metric_norms("stress", n);
        const int d = sigma.grid->dim();
        double offdiag = 0.0, diag_gap = 0.0;
        for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
            if (!sigma.mask[p]) continue;
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j) {
                    if (i != j) offdiag = std::max(offdiag, std::fabs(sigma.at(p, i, j)));
                    else if (i + 1 < d)
                        diag_gap = std::max(
                            diag_gap, std::fabs(sigma.at(p, i, i) - sigma.at(p, i + 1, i + 1)));
                }
        }
        metric("stress.offdiag_sup", offdiag);
        metric("stress.offdiag_over_sup", n.sup > 0.0 ? offdiag / n.sup : 0.0);
        metric("stress.diag_pair_gap", diag_gap);
        metric("stress.diag_pair_over_sup", n.sup > 0.0 ? diag_gap / n.sup : 0.0);
        for (int i = 0; i < d; ++i)
            origin_metric("stress.at_origin." + std::to_string(i) + std::to_string(i), sigma,
                          static_cast<std::size_t>(i * d + i),
                          static_cast<std::size_t>(d * d));
        dump("sigma", matrix_table(sigma, "sigma"));
    }

    void op_constitutive_stress() {
        const MatrixField sigma_c = constitutive_stress(conformal(), sc_.hbar, sc_.mass);
        metric("constitutive.sup", norms(sigma_c).sup);
        // Cross-route comparison wherever the wave-state stress is defined:
        // purely spatial grids (the non-relativistic tensor) and lorentzian
        // grids (the four-stress); a leading euclidean time axis has no
        // wave-state stress to compare against.
        const bool comparable =
            sc_.grid && (!sc_.grid->has_time_axis() || sc_.grid->lorentzian());
        if (comparable) {
            const MatrixField& sigma_w = stress();
            double gap = 0.0;
            std::size_t compared = 0;
            const std::size_t comps =
                static_cast<std::size_t>(sc_.grid->dim() * sc_.grid->dim());
            for (std::size_t p = 0; p < sigma_c.mask.size(); ++p) {
                if (!sigma_c.mask[p] || !sigma_w.mask[p]) continue;
                ++compared;
                for (std::size_t c = 0; c < comps; ++c)
                    gap = std::max(gap, std::fabs(sigma_c.values[p * comps + c] -
                                                  sigma_w.values[p * comps + c]));
            }
            const double sup = norms(sigma_w).sup;
            metric("constitutive.match_gap", gap);
            metric("constitutive.match_over_sup",
                   sup > 0.0 ? gap / sup : (gap > 0.0 ? 1e300 : 0.0));
            metric("constitutive.match_points", static_cast<double>(compared));
        }
        dump("sigma_constitutive", matrix_table(sigma_c, "sigma_constitutive"));
    }

    void op_mean_pressure() {
        if (sc_.grid && sc_.grid->lorentzian()) {
            const ScalarField pr = rel_mean_pressure(rel());
            metric_norms("pressure", norms(pr));
            origin_metric("pressure.at_origin", pr, 0, 1);
            dump("mean_pressure", scalar_table(pr, "mean_pressure"));
            return;
        }
        const MeanPressureRoutes routes = mean_pressure_routes(wave());
        metric_norms("pressure", norms(routes.pressure));
        metric("pressure.gap_trace_direct", routes.gap_trace_direct);
        metric("pressure.gap_trace_potential", routes.gap_trace_potential);
        metric("pressure.gap_direct_potential", routes.gap_direct_potential);
        const double worst = std::max({routes.gap_trace_direct, routes.gap_trace_potential,
                                       routes.gap_direct_potential});
        metric("pressure.gap_over_scale",
               routes.constituent_scale > 0.0 ? worst / routes.constituent_scale : 0.0);
        origin_metric("pressure.at_origin", routes.pressure, 0, 1);
        dump("mean_pressure", scalar_table(routes.pressure, "mean_pressure"));
    }

    void op_equilibrium_residual() {
        const CovectorField r = equilibrium_residual(wave());
        metric_norms("equilibrium", norms(r));
        dump("equilibrium", covector_table(r, "equilibrium"));
    }

    void op_field_equations() {
        if (sc_.grid && sc_.grid->lorentzian()) {
            const RelFieldReport& rep = rel_report();
            metric_norms("continuity", rep.continuity_norms);
            metric_norms("mass_shell", rep.mass_shell_norms);
            dump("continuity", scalar_table(rep.continuity_residual, "continuity"));
            dump("mass_shell", scalar_table(rep.mass_shell_residual, "mass_shell"));
            return;
        }
        const MadelungReport rep = field_equation_residuals(wave());
        metric_norms("continuity", rep.continuity_norms);
        metric_norms("hamilton_jacobi", rep.hj_norms);
        metric("vorticity_kinematic.sup", rep.vorticity_kinematic_norms.sup);
        metric("vorticity_dynamic.sup", rep.vorticity_dynamic_norms.sup);
        if (rep.equilibrium) metric("equilibrium_from_field_equations.sup", rep.equilibrium_norms.sup);
        if (wave().unwrap_warnings > 0)
            warnings_.push_back("phase unwrap: " + std::to_string(wave().unwrap_warnings) +
                                " inconsistent links");
        dump("continuity", scalar_table(rep.continuity_residual, "continuity"));
        dump("hamilton_jacobi", scalar_table(rep.hj_residual, "hamilton_jacobi"));
    }

    void op_lagrangian_density() {
        const ScalarField lag = sc_.grid && sc_.grid->lorentzian() ? rel_lagrangian(rel())
                                                                   : lagrangian_density(wave());
        metric_norms("lagrangian", norms(lag));
        origin_metric("lagrangian.at_origin", lag, 0, 1);
        dump("lagrangian", scalar_table(lag, "lagrangian"));
    }

    void op_kg_residual() {
        const ComplexResidual res = kg_residual(rel());
        metric("kg.real_sup", res.real_norms.sup);
        metric("kg.real_l2", res.real_norms.l2);
        metric("kg.imag_sup", res.imag_norms.sup);
        metric("kg.imag_l2", res.imag_norms.l2);
        dump("kg_real", scalar_table(res.real_part, "kg_real"));
        dump("kg_imag", scalar_table(res.imag_part, "kg_imag"));
    }

    void op_effective_mass() {
        const EffectiveMass em = effective_mass(rel());
        double dev = 0.0;
        for (std::size_t p = 0; p < em.mass.mask.size(); ++p)
            if (em.mass.mask[p]) dev = std::max(dev, std::fabs(em.mass.values[p] - sc_.mass));
        metric("effective_mass.sup", norms(em.mass).sup);
        metric("effective_mass.max_dev_from_rest", dev);
        metric("effective_mass.tachyonic_count", static_cast<double>(em.tachyonic_count));
        if (em.tachyonic_count > 0)
            warnings_.push_back("effective mass: " + std::to_string(em.tachyonic_count) +
                                " points with a negative radicand were masked (tachyonic)");
        dump("effective_mass", scalar_table(em.mass, "effective_mass"));
    }

    void op_dispersion_residual() {
        const ScalarField disp = dispersion_residual(rel());
        metric_norms("dispersion", norms(disp));
        const RelFieldReport& rep = rel_report();
        const double h2 = sc_.hbar * sc_.hbar;
        double gap = 0.0;
        for (std::size_t p = 0; p < disp.mask.size(); ++p) {
            if (!disp.mask[p] || !rep.mass_shell_residual.mask[p]) continue;
            gap = std::max(gap, std::fabs(rep.mass_shell_residual.values[p] -
                                          h2 * disp.values[p]));
        }
        const double scale =
            sc_.mass * sc_.c * sc_.mass * sc_.c + rep.mass_shell_norms.sup;
        metric("dispersion.vs_mass_shell_gap", gap);
        metric("dispersion.vs_mass_shell_over_scale", gap / scale);
        dump("dispersion", scalar_table(disp, "dispersion"));
    }

    void op_energy_momentum() {
        if (!sc_.four_velocity)
            fail(ErrorKind::config, "energy_momentum requires a four_velocity entry");
        require_grid("energy_momentum");
        CovectorField u = make_covector(sc_.grid);
        for (std::size_t p = 0; p < u.mask.size(); ++p)
            for (int mu = 0; mu < sc_.grid->dim(); ++mu)
                u.at(p, mu) = (*sc_.four_velocity)[static_cast<std::size_t>(mu)];
        const EnergyMomentum em = energy_momentum_tensor(rel(), u);
        metric("energy_momentum.sup", norms(em.tensor).sup);
        metric_norms("em_divergence", em.divergence_norms);
        double time_sup = 0.0;
        for (std::size_t p = 0; p < em.divergence.mask.size(); ++p)
            if (em.divergence.mask[p])
                time_sup = std::max(time_sup, std::fabs(em.divergence.at(p, 0)));
        metric("em_divergence.time_sup", time_sup);
        dump("energy_momentum", matrix_table(em.tensor, "energy_momentum"));
        dump("em_divergence", covector_table(em.divergence, "em_divergence"));
    }

    void op_strain_one_form() {
        const CovectorField omega = strain_one_form(conformal());
        metric_norms("strain_one_form", norms(omega));
        dump("strain_one_form", covector_table(omega, "strain_one_form"));
    }

    void op_strain_differential() {
        const MatrixField d = strain_differential(conformal());
        metric_norms("strain_differential", norms(d));
        dump("strain_differential", matrix_table(d, "strain_differential"));
    }

    void op_torsion() {
        const TorsionStructure ts = torsion_and_structure(conformal());
        metric("torsion.sup", norms(ts.torsion).sup);
        metric("torsion.route_gap", ts.route_gap);
        metric("torsion.structure_gap", ts.structure_gap);
        dump("torsion", three_index_table(ts.torsion, "torsion"));
        dump("torsion_connection", three_index_table(ts.torsion_connection, "torsion_connection"));
        dump("structure_functions", three_index_table(ts.structure, "structure_functions"));
    }

    void op_curvature_residual() {
        const MatrixField res = curvature_residual(conformal());
        metric_norms("curvature_residual", norms(res));
        dump("curvature_residual", matrix_table(res, "curvature_residual"));
    }

    void op_compatibility() {
        const CompatibilityReport rep = compatibility_suite(conformal(), sc_.frame_components);
        metric("compatibility.theta_sup", rep.theta_norms.sup);
        metric("compatibility.covector_sup", rep.covector_norms.sup);
        metric("compatibility.connection_sup", rep.connection_norms.sup);
        metric("compatibility.metric_sup", rep.metric_norms.sup);
        metric("compatibility.volume_sup", rep.volume_norms.sup);
    }

    void op_frame_rates() {
        const CurvePipeline& cp = curve_pipeline();
        metric("curve.length", curve_length(*sc_.curve));
        metric("curve.resample_ds", cp.ds);

        const StrainRates& sr = cp.rates;
        std::vector<double> total(sr.kappa.size(), 0.0);
        std::vector<double> lam_abs(sr.kappa.size(), 0.0);
        for (std::size_t i = 0; i < sr.kappa.size(); ++i) {
            total[i] = std::hypot(sr.kappa[i], sr.lambda[i]);
            lam_abs[i] = std::fabs(sr.lambda[i]);
        }
        const Stats curv = stats_of(total, sr.mask);
        const Stats lam = stats_of(lam_abs, sr.mask);
        const Stats tors = stats_of(sr.tau, sr.mask);
        metric("curve.valid_samples", static_cast<double>(curv.count));
        metric("rate_curvature.min", curv.min);
        metric("rate_curvature.max", curv.max);
        metric("rate_curvature.mean", curv.mean);
        metric("rate_lambda.sup", lam.max);
        metric("rate_torsion.min", tors.min);
        metric("rate_torsion.max", tors.max);
        metric("rate_torsion.mean", tors.mean);

        // Fourth-order reconstruction of the frames from the rates: the
        // round trip bounds the self-consistency of rates and frames.
        std::size_t first = 0;
        while (first < sr.mask.size() && !sr.mask[first]) ++first;
        double worst = 0.0;
        if (first < sr.mask.size()) {
            Mat3 frame = cp.frames.frames[first];
            for (std::size_t i = first; i + 1 < sr.mask.size() && sr.mask[i + 1]; ++i) {
                const Mat3 w0 = rate_matrix(sr.kappa[i], sr.lambda[i], sr.tau[i]);
                const Mat3 w1 = rate_matrix(sr.kappa[i + 1], sr.lambda[i + 1], sr.tau[i + 1]);
                Mat3 wm{};
                for (std::size_t e = 0; e < 9; ++e) wm[e] = 0.5 * (w0[e] + w1[e]);
                const Mat3 k1 = mat_mul(w0, frame);
                const Mat3 k2 = mat_mul(wm, mat_axpy(frame, 0.5 * cp.ds, k1));
                const Mat3 k3 = mat_mul(wm, mat_axpy(frame, 0.5 * cp.ds, k2));
                const Mat3 k4 = mat_mul(w1, mat_axpy(frame, cp.ds, k3));
                for (std::size_t e = 0; e < 9; ++e)
                    frame[e] += cp.ds / 6.0 * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e]);
                for (std::size_t e = 0; e < 9; ++e)
                    worst = std::max(worst, std::fabs(frame[e] - cp.frames.frames[i + 1][e]));
            }
        }
        metric("frame_reconstruction.sup", worst);

        std::vector<double> frame_flat;
        frame_flat.reserve(cp.frames.frames.size() * 9);
        for (const Mat3& f : cp.frames.frames)
            frame_flat.insert(frame_flat.end(), f.begin(), f.end());
        std::vector<std::string> frame_cols;
        for (int r = 1; r <= 3; ++r)
            for (int c = 1; c <= 3; ++c)
                frame_cols.push_back("e" + std::to_string(r) + "_" + std::to_string(c));
        dump("frames", curve_table(cp.resampled.params, frame_cols, frame_flat, cp.frames.mask));

        std::vector<double> rate_flat;
        for (std::size_t i = 0; i < sr.kappa.size(); ++i) {
            rate_flat.push_back(sr.kappa[i]);
            rate_flat.push_back(sr.lambda[i]);
            rate_flat.push_back(sr.tau[i]);
        }
        dump("rates",
             curve_table(cp.resampled.params, {"kappa", "lambda", "tau"}, rate_flat, sr.mask));
    }

    void op_couple_stress() {
        if (!sc_.stiffness)
            fail(ErrorKind::config, "couple_stress requires a stiffness matrix");
        const CurvePipeline& cp = curve_pipeline();
        const std::vector<Vec3> m = wire_couple_stress(cp.rates, *sc_.stiffness);
        std::vector<double> comp(m.size(), 0.0);
        double sup = 0.0;
        std::vector<double> flat;
        flat.reserve(m.size() * 3);
        for (const Vec3& v : m)
            for (const double e : v) {
                flat.push_back(e);
                sup = std::max(sup, std::fabs(e));
            }
        metric("couple_stress.sup", sup);
        for (int c = 0; c < 3; ++c) {
            for (std::size_t i = 0; i < m.size(); ++i) comp[i] = m[i][static_cast<std::size_t>(c)];
            const Stats st = stats_of(comp, cp.rates.mask);
            const std::string prefix = "couple_stress.m" + std::to_string(c + 1);
            metric(prefix + ".min", st.min);
            metric(prefix + ".max", st.max);
            metric(prefix + ".mean", st.mean);
        }
        dump("couple_stress",
             curve_table(cp.resampled.params, {"m1", "m2", "m3"}, flat, cp.rates.mask));
    }

    void op_plate_couple_stress() {
        if (!sc_.surface) fail(ErrorKind::config, "plate_couple_stress requires a surface field");
        if (!sc_.plate) fail(ErrorKind::config, "plate_couple_stress requires a plate section");
        const PlateCoupleStress pcs = plate_couple_stress(*sc_.surface, *sc_.plate);
        const auto emit = [&](const char* name, const ScalarField& f) {
            const Stats st = stats_of(f.values, f.mask);
            const std::string prefix = std::string("plate_") + name;
            metric(prefix + ".min", st.min);
            metric(prefix + ".max", st.max);
            dump(prefix, scalar_table(f, prefix));
        };
        emit("K", pcs.K);
        emit("Lambda", pcs.Lambda);
        emit("Pi", pcs.Pi);
    }

    void op_strain_tensor() {
        const MetricStrainField& m = metric_strain();
        metric("strain.sup", norms(m.E_lower).sup);
        metric("strain.singular_count", static_cast<double>(m.singular_count));
        if (m.singular_count > 0)
            warnings_.push_back("metric strain: " + std::to_string(m.singular_count) +
                                " singular points masked");
        dump("E", matrix_table(m.E_lower, "E"));
        dump("metric", matrix_table(m.g_lower, "metric"));
    }

    void op_connection() {
        const MetricStrainField& m = metric_strain();
        const ThreeIndexField gamma = connection_from_strain(m);
        metric("connection.sup", norms(gamma).sup);
        const auto p0 = origin_point(*m.grid);
        if (p0 && gamma.mask[*p0]) {
            const int d = m.grid->dim();
            for (int l = 0; l < d; ++l)
                for (int mu = 0; mu < d; ++mu)
                    for (int nu = mu; nu < d; ++nu)
                        metric("connection.at_origin." + std::to_string(l) + std::to_string(mu) +
                                   std::to_string(nu),
                               gamma.at(*p0, l, mu, nu));
        }
        dump("gamma", three_index_table(gamma, "gamma"));
    }

    void op_curvature() {
        const CurvatureStack stack = curvature_stack(metric_strain());
        const double riemann_sup = norms(stack.riemann).sup;
        metric("metric_curvature.riemann_sup", riemann_sup);
        metric("metric_curvature.ricci_sup", norms(stack.ricci).sup);
        metric("metric_curvature.scalar_sup", norms(stack.scalar).sup);
        metric("metric_curvature.einstein_sup", norms(stack.einstein).sup);
        metric("metric_curvature.antisymmetry_gap", stack.antisymmetry_gap);
        metric("metric_curvature.bianchi_gap", stack.bianchi_gap);
        metric("metric_curvature.bianchi_over_scale",
               riemann_sup > 0.0 ? stack.bianchi_gap / riemann_sup : 0.0);
        dump("ricci", matrix_table(stack.ricci, "ricci"));
        dump("ricci_scalar", scalar_table(stack.scalar, "ricci_scalar"));
        dump("einstein", matrix_table(stack.einstein, "einstein"));
    }

    void op_inverse_strain() {
        const InverseStrainPair pair = inverse_strain_pair(metric_strain());
        metric("inverse_strain.compatibility_sup", pair.compatibility_residual);
        metric("inverse_strain.first_order_error", pair.first_order_error);
        dump("E_upper", matrix_table(pair.E_upper, "E_upper"));
    }

    void op_inverse_strain_sweep() {
        if (sc_.epsilon_sweep.empty())
            fail(ErrorKind::config, "inverse_strain_sweep requires an epsilon_sweep list");
        // The first-order error of a constant strain is grid-independent, so
        // a minimal spacetime grid carries the sweep.
        auto g = Grid::lorentzian(4, {5, 5, 5, 5}, {0.25, 0.25, 0.25, 0.25},
                                  {-0.5, -0.5, -0.5, -0.5});
        std::vector<double> log_eps, log_err;
        for (std::size_t i = 0; i < sc_.epsilon_sweep.size(); ++i) {
            const double eps = sc_.epsilon_sweep[i];
            MatrixField e = make_matrix(g, Symmetry::symmetric);
            for (std::size_t p = 0; p < e.mask.size(); ++p) e.at(p, 0, 0) = eps;
            const InverseStrainPair pair = inverse_strain_pair(strain_from_deformation(e));
            metric("inverse_strain_sweep.err" + std::to_string(i), pair.first_order_error);
            log_eps.push_back(std::log(eps));
            log_err.push_back(std::log(pair.first_order_error));
        }
        // Least-squares slope of log error against log strain magnitude.
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < log_eps.size(); ++i) {
            mx += log_eps[i];
            my += log_err[i];
        }
        mx /= static_cast<double>(log_eps.size());
        my /= static_cast<double>(log_eps.size());
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < log_eps.size(); ++i) {
            num += (log_eps[i] - mx) * (log_err[i] - my);
            den += (log_eps[i] - mx) * (log_eps[i] - mx);
        }
        metric("inverse_strain_sweep.slope", num / den);
    }

    // ---- state ------------------------------------------------------------
    const Scenario& sc_;
    std::vector<std::string>& warnings_;
    std::vector<std::pair<std::string, ojson>> op_reports_;
    std::map<std::string, double> metrics_;
    std::vector<std::pair<std::string, Table>> dumps_;

    std::optional<WaveState> wave_;
    std::optional<RelWaveState> rel_;
    std::optional<ConformalDeformation> conformal_;
    std::optional<MatrixField> stress_;
    std::optional<MetricStrainField> metric_strain_;
    std::optional<RelFieldReport> rel_report_;
    std::optional<CurvePipeline> curve_;
};

ojson conventions_block(const Scenario& sc) {
    ojson c = ojson::object();
    if (sc.grid) {
        if (sc.grid->lorentzian()) {
            std::string sig = "+";
            for (int a = 1; a < sc.grid->dim(); ++a) sig += "-";
            c["signature"] = sig;
        } else {
            c["signature"] = sc.grid->has_time_axis() ? "euclidean (leading time axis)"
                                                      : "euclidean";
        }
    }
    c["stress_tensor"] =
        "sigma = (hbar^2 / 4 mass) * rho * hessian(log rho); the squared-gradient "
        "coupling enters with hbar^2";
    c["mean_pressure"] = "-trace(sigma) / dim, signature-raised trace on lorentzian grids";
    c["frame_connection_sign"] =
        "-1: the parallelizing connection is minus the logarithmic strain form";
    c["curve_rates"] = "kappa = -<e1', e2>; lambda = +<e1', e3>; tau = -<e3', e2>";
    c["wave_phase"] = "psi = R * exp(-i S / hbar)";
    return c;
}

ojson grid_block(const Grid& g) {
    ojson out = ojson::object();
    out["dim"] = g.dim();
    ojson shape = ojson::array(), spacing = ojson::array(), origin = ojson::array();
    for (int a = 0; a < g.dim(); ++a) {
        shape.push_back(g.shape(a));
        spacing.push_back(g.spacing(a));
        origin.push_back(g.origin(a));
    }
    out["shape"] = shape;
    out["spacing"] = spacing;
    out["origin"] = origin;
    out["points"] = g.point_count();
    out["h"] = g.max_spacing();
    return out;
}

}  // namespace

std::string report_to_string(const nlohmann::ordered_json& report) {
    return report.dump(2) + "\n";
}

RunResult run_scenario(const Scenario& sc, const RunOptions& opt) {
    RunResult out;

    Runner runner(sc, out.warnings);
    runner.run_all();

    // Checks against the coarse-run metrics.
    const auto lookup = [](const std::map<std::string, double>& metrics,
                           const std::string& name) {
        const auto it = metrics.find(name);
        if (it == metrics.end()) {
            std::string available;
            for (const auto& [k, v] : metrics) {
                (void)v;
                if (!available.empty()) available += ", ";
                available += k;
            }
            fail(ErrorKind::config,
                 "checks: unknown metric '" + name + "'; available: " + available);
        }
        return it->second;
    };

    bool all_pass = true;
    for (const CheckSpec& spec : sc.checks) {
        CheckResult r;
        r.id = spec.id;
        r.metric = spec.metric;
        r.target = spec.target;
        r.tol = spec.tol;
        r.value = lookup(runner.metrics(), spec.metric);
        r.pass = std::fabs(r.value - r.target) <= r.tol;
        all_pass = all_pass && r.pass;
        out.checks.push_back(r);
    }

    // Optional h -> h/2 companion for convergence orders.
    struct OrderRow {
        std::string id, metric;
        double coarse = 0.0, fine = 0.0;
        ConvergenceOrder order;
        bool pass = false;
    };
    std::vector<OrderRow> order_rows;
    bool any_order_checks = false;
    for (const CheckSpec& spec : sc.checks)
        if (spec.tol_is_h2 && spec.target == 0.0) any_order_checks = true;
    if (opt.refine && any_order_checks) {
        const Scenario fine =
            parse_scenario(refined_config(sc.config).dump(), sc.base_dir,
                           "scenario '" + sc.name + "' (refined)");
        std::vector<std::string> fine_warnings;
        Runner fine_runner(fine, fine_warnings);
        fine_runner.run_all();
        for (const CheckSpec& spec : sc.checks) {
            if (!spec.tol_is_h2 || spec.target != 0.0) continue;
            OrderRow row;
            row.id = spec.id;
            row.metric = spec.metric;
            row.coarse = lookup(runner.metrics(), spec.metric);
            row.fine = lookup(fine_runner.metrics(), spec.metric);
            row.order = convergence_order(row.coarse, row.fine);
            row.pass = row.order.exact || std::fabs(row.order.order - 2.0) <= 0.2;
            all_pass = all_pass && row.pass;
            order_rows.push_back(row);
        }
    }
    out.pass = all_pass;

    // Report assembly.
    ojson report = ojson::object();
    report["tool"] = "madelung";
    report["format_version"] = 1;
    if (opt.with_timestamp) report["timestamp"] = iso_timestamp();
    report["scenario"] = sc.config;
    ojson constants = ojson::object();
    constants["hbar"] = sc.hbar;
    constants["mass"] = sc.mass;
    constants["c"] = sc.c;
    report["constants"] = constants;
    report["conventions"] = conventions_block(sc);
    if (sc.grid) report["grid"] = grid_block(*sc.grid);

    ojson ops = ojson::array();
    for (const auto& [name, entry] : runner.op_reports()) {
        ojson e = ojson::object();
        e["op"] = name;
        e["metrics"] = entry;
        ops.push_back(e);
    }
    report["operations"] = ops;

    ojson checks = ojson::array();
    for (const CheckResult& r : out.checks) {
        ojson e = ojson::object();
        e["id"] = r.id;
        e["metric"] = r.metric;
        e["value"] = r.value;
        e["target"] = r.target;
        e["tol"] = r.tol;
        e["pass"] = r.pass;
        checks.push_back(e);
    }
    report["checks"] = checks;

    if (opt.refine) {
        ojson rows = ojson::array();
        for (const OrderRow& r : order_rows) {
            ojson e = ojson::object();
            e["id"] = r.id;
            e["metric"] = r.metric;
            e["coarse"] = r.coarse;
            e["fine"] = r.fine;
            if (r.order.exact)
                e["order"] = "exact";
            else
                e["order"] = r.order.order;
            e["pass"] = r.pass;
            rows.push_back(e);
        }
        report["convergence"] = rows;
    }

    ojson warn = ojson::array();
    for (const auto& w : out.warnings) warn.push_back(w);
    report["warnings"] = warn;
    report["pass"] = out.pass;
    out.report = std::move(report);

    // Requested dumps, resolved against everything the operations produced.
    std::map<std::string, const Table*> produced;
    for (const auto& [name, table] : runner.dump_tables()) {
        produced[name] = &table;
        out.available_dumps.push_back(name);
    }
    std::sort(out.available_dumps.begin(), out.available_dumps.end());
    for (const std::string& want : sc.dumps) {
        const auto it = produced.find(want);
        if (it == produced.end()) {
            std::string available;
            for (const std::string& name : out.available_dumps) {
                if (!available.empty()) available += ", ";
                available += name;
            }
            fail(ErrorKind::config, "unknown field '" + want +
                                        "'; available for this scenario: " + available);
        }
        out.dumps.push_back({want, *it->second});
    }
    return out;
}

}  // namespace madelung
