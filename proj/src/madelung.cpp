#include "madelung/madelung.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace madelung {
namespace {

constexpr double kFloorFraction = 1e-8;
constexpr double kPi = 3.141592653589793238462643383279502884;

double masked_max(const ScalarField& f) {
    double m = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t p = 0; p < f.mask.size(); ++p) {
        if (!f.mask[p]) continue;
        any = true;
        m = std::max(m, f.values[p]);
    }
    return any ? m : 0.0;
}

ScalarField log_density(const WaveState& w) {
    ScalarField ln = make_scalar(w.grid);
    ln.mask = w.R.mask;
    for (std::size_t p = 0; p < ln.mask.size(); ++p)
        // 2*log(R): the doubling is exact in binary floating point, which
        // keeps stencils of ln(rho) in exact lockstep with stencils of ln(R).
        ln.values[p] = ln.mask[p] ? 2.0 * std::log(w.R.values[p]) : 0.0;
    return ln;
}

/// (Laplacian R) / R with the floor guard; every valid output point has a
/// valid (hence floored) amplitude underneath it.
ScalarField laplacian_ratio(const WaveState& w) {
    ScalarField lap = laplacian(w.R);
    for (std::size_t p = 0; p < lap.mask.size(); ++p)
        if (lap.mask[p]) lap.values[p] /= w.R.values[p];
    require_valid_points(lap.mask, "amplitude curvature ratio");
    return lap;
}

void require_spatial_grid(const WaveState& w, const char* op) {
    if (w.grid->lorentzian())
        fail(ErrorKind::config, std::string(op) + ": needs a Euclidean grid");
    if (w.grid->has_time_axis())
        fail(ErrorKind::config, std::string(op) + ": needs a purely spatial grid");
}

/// dS/dt if the grid has a time axis; the zero field for a declared
/// stationary state; a configuration error otherwise.
ScalarField time_derivative(const WaveState& w, const ScalarField& f, const char* op) {
    if (w.grid->has_time_axis()) {
        CovectorField g = gradient(f);
        ScalarField dt = make_scalar(w.grid);
        dt.mask = g.mask;
        for (std::size_t p = 0; p < dt.mask.size(); ++p)
            dt.values[p] = dt.mask[p] ? g.at(p, 0) : 0.0;
        return dt;
    }
    if (!w.stationary)
        fail(ErrorKind::config,
             std::string(op) + ": grid has no time axis and the state is not declared stationary");
    ScalarField dt = make_scalar(w.grid);
    dt.mask = f.mask;
    return dt;
}

}  // namespace

WaveState make_wave_state(ScalarField R, ScalarField S, std::optional<ScalarField> V,
                          double hbar, double mass, bool stationary) {
    if (!(hbar > 0.0) || !(mass > 0.0))
        fail(ErrorKind::constraint, "wave state: hbar and mass must be positive");
    if (!R.grid || !S.grid || !R.grid->same_layout(*S.grid))
        fail(ErrorKind::config, "wave state: amplitude and action grids differ");
    if (V && !R.grid->same_layout(*V->grid))
        fail(ErrorKind::config, "wave state: potential grid differs");
    if (R.grid->lorentzian())
        fail(ErrorKind::config, "wave state: needs a Euclidean grid");

    for (std::size_t p = 0; p < R.mask.size(); ++p)
        if (R.mask[p] && R.values[p] < 0.0)
            fail(ErrorKind::constraint, "wave state: amplitude is negative at a valid point");

    const double max_r = masked_max(R);
    if (max_r <= 0.0)
        fail(ErrorKind::empty_support, "wave state: amplitude vanishes everywhere");
    const double floor = kFloorFraction * max_r;

    Mask m = R.mask;
    for (std::size_t p = 0; p < m.size(); ++p) {
        const bool ok = m[p] && S.mask[p] && (!V || V->mask[p]) && R.values[p] >= floor;
        m[p] = ok ? 1 : 0;
    }
    if (valid_count(m) == 0)
        fail(ErrorKind::empty_support, "wave state: no point survives the amplitude floor");

    WaveState w;
    w.grid = R.grid;
    w.R = std::move(R);
    w.S = std::move(S);
    w.V = std::move(V);
    w.R.mask = m;
    w.S.mask = m;
    if (w.V) w.V->mask = std::move(m);
    w.hbar = hbar;
    w.mass = mass;
    w.amplitude_floor = floor;
    w.stationary = stationary;
    return w;
}

WaveState decompose(const ScalarField& psi_real, const ScalarField& psi_imag,
                    double hbar, double mass) {
    if (!psi_real.grid || !psi_imag.grid || !psi_real.grid->same_layout(*psi_imag.grid))
        fail(ErrorKind::config, "decompose: component grids differ");
    const GridPtr grid = psi_real.grid;
    const std::size_t n = grid->point_count();

    ScalarField amp = make_scalar(grid);
    std::vector<double> phase(n, 0.0);
    double max_r = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const bool ok = psi_real.mask[p] && psi_imag.mask[p];
        amp.mask[p] = ok ? 1 : 0;
        if (!ok) continue;
        amp.values[p] = std::hypot(psi_real.values[p], psi_imag.values[p]);
        max_r = std::max(max_r, amp.values[p]);
    }
    if (max_r <= 0.0)
        fail(ErrorKind::empty_support, "decompose: wave vanishes everywhere");
    const double floor = kFloorFraction * max_r;

    Mask valid = amp.mask;
    for (std::size_t p = 0; p < n; ++p)
        if (valid[p] && amp.values[p] < floor) valid[p] = 0;

    // Line-sweep unwrap in storage order (axis 0 slowest). Each point is
    // anchored to its nearest already-processed neighbor: decrement the last
    // nonzero index, falling back toward axis 0 across masked gaps. The very
    // first valid point of each connected region keeps its principal value.
    std::array<int, kMaxDim> idx{};
    for (std::size_t p = 0; p < n; ++p) {
        if (!valid[p]) continue;
        phase[p] = std::atan2(psi_imag.values[p], psi_real.values[p]);
        grid->unravel(p, idx);
        for (int a = grid->dim() - 1; a >= 0; --a) {
            if (idx[static_cast<std::size_t>(a)] == 0) continue;
            const std::size_t q = p - grid->stride(a);
            if (!valid[q]) continue;
            const double jump = phase[p] - phase[q];
            phase[p] -= 2.0 * kPi * std::round(jump / (2.0 * kPi));
            break;
        }
    }

    // Count links the sweep could not make consistent: adjacent valid points
    // whose unwrapped phases still differ by more than pi. A nonzero count
    // means a phase vortex or under-resolved phase gradient.
    std::size_t warnings = 0;
    for (int a = 0; a < grid->dim(); ++a) {
        const std::size_t s = grid->stride(a);
        for (std::size_t p = 0; p < n; ++p) {
            grid->unravel(p, idx);
            if (idx[static_cast<std::size_t>(a)] + 1 >= grid->shape(a)) continue;
            if (!valid[p] || !valid[p + s]) continue;
            if (std::fabs(phase[p + s] - phase[p]) > kPi * (1.0 + 1e-12)) ++warnings;
        }
    }

    ScalarField action = make_scalar(grid);
    action.mask = valid;
    for (std::size_t p = 0; p < n; ++p)
        action.values[p] = valid[p] ? -hbar * phase[p] : 0.0;
    amp.mask = std::move(valid);

    WaveState w = make_wave_state(std::move(amp), std::move(action), std::nullopt,
                                  hbar, mass, /*stationary=*/false);
    w.unwrap_warnings = warnings;
    return w;
}

ScalarField density(const WaveState& w) {
    ScalarField rho = make_scalar(w.grid);
    rho.mask = w.R.mask;
    for (std::size_t p = 0; p < rho.mask.size(); ++p)
        rho.values[p] = rho.mask[p] ? w.R.values[p] * w.R.values[p] : 0.0;
    return rho;
}

ScalarField quantum_potential(const WaveState& w) {
    ScalarField ratio = laplacian_ratio(w);
    const double scale = -(w.hbar * w.hbar) / (2.0 * w.mass);
    for (std::size_t p = 0; p < ratio.mask.size(); ++p)
        if (ratio.mask[p]) ratio.values[p] *= scale;
    return ratio;
}

CovectorField quantum_force(const WaveState& w) {
    const ScalarField ratio = laplacian_ratio(w);
    CovectorField f = gradient(ratio);
    const double scale = (w.hbar * w.hbar) / (2.0 * w.mass);
    for (double& v : f.values) v *= scale;
    require_valid_points(f.mask, "quantum force");
    return f;
}

MatrixField stress_tensor(const WaveState& w) {
    require_spatial_grid(w, "stress tensor");
    const ScalarField rho = density(w);
    const ScalarField ln_rho = log_density(w);

    MatrixField sigma = hessian(ln_rho);
    sigma.symmetry = Symmetry::symmetric;
    const double quarter = (w.hbar * w.hbar) / (4.0 * w.mass);
    const int d = w.grid->dim();
    for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
        if (!sigma.mask[p]) continue;
        const double weight = quarter * rho.values[p];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sigma.at(p, i, j) = weight * sigma.at(p, i, j);
    }

    // Product form (hbar^2/2m)(R d^2R - dR dR); identical in exact
    // arithmetic, so any gap beyond stencil error flags a bug.
    const MatrixField hess_r = hessian(w.R);
    const CovectorField grad_r = gradient(w.R);
    const double half = (w.hbar * w.hbar) / (2.0 * w.mass);
    double gap = 0.0;
    double constituent = 0.0;
    for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
        if (!sigma.mask[p] || !hess_r.mask[p] || !grad_r.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double curvature = half * w.R.values[p] * hess_r.at(p, i, j);
                const double slope = half * grad_r.at(p, i) * grad_r.at(p, j);
                gap = std::max(gap, std::fabs((curvature - slope) - sigma.at(p, i, j)));
                constituent = std::max({constituent, std::fabs(curvature), std::fabs(slope),
                                        std::fabs(sigma.at(p, i, j))});
            }
    }
    require_route_agreement(gap, constituent, w.grid->max_spacing(), "stress tensor");
    require_valid_points(sigma.mask, "stress tensor");
    return sigma;
}

MeanPressureRoutes mean_pressure_routes(const WaveState& w) {
    require_spatial_grid(w, "mean pressure");
    if (w.grid->dim() != 3)
        fail(ErrorKind::config, "mean pressure: the 1/3 trace factor requires a 3-D grid");

    const MatrixField sigma = stress_tensor(w);
    MeanPressureRoutes out;
    out.pressure = make_scalar(w.grid);
    ScalarField& pressure = out.pressure;
    pressure.mask = sigma.mask;
    for (std::size_t p = 0; p < pressure.mask.size(); ++p) {
        if (!pressure.mask[p]) continue;
        pressure.values[p] = -(sigma.at(p, 0, 0) + sigma.at(p, 1, 1) + sigma.at(p, 2, 2)) / 3.0;
    }

    // Closed forms: (hbar^2/6m)(|dR|^2 - R lap R) and rho V_q/3 + (hbar^2/6m)|dR|^2.
    const CovectorField grad_r = gradient(w.R);
    const ScalarField lap_r = laplacian(w.R);
    const ScalarField v_q = quantum_potential(w);
    const ScalarField rho = density(w);
    const double sixth = (w.hbar * w.hbar) / (6.0 * w.mass);
    double constituent = 0.0;
    for (std::size_t p = 0; p < pressure.mask.size(); ++p) {
        if (!pressure.mask[p] || !grad_r.mask[p] || !lap_r.mask[p] || !v_q.mask[p]) continue;
        double slope_sq = 0.0;
        for (int k = 0; k < 3; ++k) slope_sq += grad_r.at(p, k) * grad_r.at(p, k);
        const double curvature = w.R.values[p] * lap_r.values[p];
        const double direct = sixth * (slope_sq - curvature);
        const double potential_form = rho.values[p] * v_q.values[p] / 3.0 + sixth * slope_sq;
        out.gap_trace_direct =
            std::max(out.gap_trace_direct, std::fabs(direct - pressure.values[p]));
        out.gap_trace_potential =
            std::max(out.gap_trace_potential, std::fabs(potential_form - pressure.values[p]));
        out.gap_direct_potential =
            std::max(out.gap_direct_potential, std::fabs(direct - potential_form));
        constituent = std::max({constituent, sixth * slope_sq, std::fabs(sixth * curvature),
                                std::fabs(pressure.values[p])});
    }
    out.constituent_scale = constituent;
    const double gap = std::max({out.gap_trace_direct, out.gap_trace_potential,
                                 out.gap_direct_potential});
    require_route_agreement(gap, constituent, w.grid->max_spacing(), "mean pressure");
    return out;
}

ScalarField mean_pressure(const WaveState& w) {
    return mean_pressure_routes(w).pressure;
}

CovectorField equilibrium_residual(const WaveState& w) {
    require_spatial_grid(w, "equilibrium residual");
    const MatrixField sigma = stress_tensor(w);
    const CovectorField div_sigma = tensor_divergence(sigma, ContractIndex::second);
    const CovectorField force = quantum_force(w);
    const ScalarField rho = density(w);

    CovectorField resid = make_covector(w.grid);
    resid.mask = mask_and(div_sigma.mask, force.mask);
    require_valid_points(resid.mask, "equilibrium residual");
    const int d = w.grid->dim();
    for (std::size_t p = 0; p < resid.mask.size(); ++p) {
        if (!resid.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            resid.at(p, i) = div_sigma.at(p, i) - rho.values[p] * force.at(p, i);
    }
    return resid;
}

MadelungReport field_equation_residuals(const WaveState& w) {
    if (w.grid->lorentzian())
        fail(ErrorKind::config, "field equations: needs a Euclidean grid");
    const int d = w.grid->dim();
    const bool timed = w.grid->has_time_axis();

    const ScalarField rho = density(w);
    const ScalarField drho_dt = time_derivative(w, rho, "continuity residual");
    const ScalarField ds_dt = time_derivative(w, w.S, "energy balance residual");
    const CovectorField grad_s = gradient(w.S);

    // Spatial momentum covector (time component pinned to zero).
    CovectorField momentum = make_covector(w.grid);
    momentum.mask = grad_s.mask;
    for (std::size_t p = 0; p < momentum.mask.size(); ++p) {
        if (!momentum.mask[p]) continue;
        for (int k : w.grid->spatial_axes()) momentum.at(p, k) = grad_s.at(p, k);
    }

    MadelungReport report;

    // Continuity: m drho/dt + div(rho p).
    CovectorField flux = make_covector(w.grid);
    flux.mask = momentum.mask;
    for (std::size_t p = 0; p < flux.mask.size(); ++p) {
        if (!flux.mask[p]) continue;
        for (int k : w.grid->spatial_axes())
            flux.at(p, k) = rho.values[p] * momentum.at(p, k);
    }
    const ScalarField div_flux = covector_divergence(flux);
    report.continuity_residual = make_scalar(w.grid);
    report.continuity_residual.mask = mask_and(div_flux.mask, drho_dt.mask);
    for (std::size_t p = 0; p < report.continuity_residual.mask.size(); ++p) {
        if (!report.continuity_residual.mask[p]) continue;
        report.continuity_residual.values[p] =
            w.mass * drho_dt.values[p] + div_flux.values[p];
    }

    // Energy balance: dS/dt + |dS|^2/2m + V + V_q.
    const ScalarField v_q = quantum_potential(w);
    report.hj_residual = make_scalar(w.grid);
    report.hj_residual.mask = mask_and(mask_and(ds_dt.mask, momentum.mask), v_q.mask);
    for (std::size_t p = 0; p < report.hj_residual.mask.size(); ++p) {
        if (!report.hj_residual.mask[p]) continue;
        double kinetic = 0.0;
        for (int k : w.grid->spatial_axes())
            kinetic += momentum.at(p, k) * momentum.at(p, k);
        report.hj_residual.values[p] = ds_dt.values[p] + kinetic / (2.0 * w.mass) +
                                       (w.V ? w.V->values[p] : 0.0) + v_q.values[p];
    }

    // Irrotationality: the exterior derivative of the momentum covector.
    // Time-mixing rows are cleared; they are evolution terms, not vorticity.
    report.vorticity_dynamic = exterior_derivative(momentum);
    if (timed) {
        for (std::size_t p = 0; p < report.vorticity_dynamic.mask.size(); ++p)
            for (int k = 0; k < d; ++k) {
                report.vorticity_dynamic.at(p, 0, k) = 0.0;
                report.vorticity_dynamic.at(p, k, 0) = 0.0;
            }
    }
    report.vorticity_kinematic = report.vorticity_dynamic;
    for (double& v : report.vorticity_kinematic.values) v /= w.mass;

    if (!timed) report.equilibrium = equilibrium_residual(w);

    report.continuity_norms = norms(report.continuity_residual);
    report.hj_norms = norms(report.hj_residual);
    report.vorticity_kinematic_norms = norms(report.vorticity_kinematic);
    report.vorticity_dynamic_norms = norms(report.vorticity_dynamic);
    if (report.equilibrium) report.equilibrium_norms = norms(*report.equilibrium);
    return report;
}

ScalarField lagrangian_density(const WaveState& w) {
    if (w.grid->lorentzian())
        fail(ErrorKind::config, "lagrangian density: needs a Euclidean grid");
    const ScalarField rho = density(w);
    const ScalarField ds_dt = time_derivative(w, w.S, "lagrangian density");
    const CovectorField grad_s = gradient(w.S);
    const CovectorField grad_rho = gradient(rho);

    ScalarField lag = make_scalar(w.grid);
    lag.mask = mask_and(mask_and(ds_dt.mask, grad_s.mask), grad_rho.mask);
    require_valid_points(lag.mask, "lagrangian density");
    const double eighth = (w.hbar * w.hbar) / (8.0 * w.mass);
    for (std::size_t p = 0; p < lag.mask.size(); ++p) {
        if (!lag.mask[p]) continue;
        double kinetic = 0.0;
        double slope_sq = 0.0;
        for (int k : w.grid->spatial_axes()) {
            kinetic += grad_s.at(p, k) * grad_s.at(p, k);
            slope_sq += grad_rho.at(p, k) * grad_rho.at(p, k);
        }
        const double r = rho.values[p];
        lag.values[p] = -r * (ds_dt.values[p] + kinetic / (2.0 * w.mass) +
                              (w.V ? w.V->values[p] : 0.0) + eighth * slope_sq / (r * r));
    }
    return lag;
}

}  // namespace madelung
