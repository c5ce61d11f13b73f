#include "madelung/relativistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace madelung {
namespace {

constexpr double kFloorFraction = 1e-8;

/// eta-weighted square of a covector at point p: sum_mu s_mu a_mu^2.
double eta_square(const Grid& g, const CovectorField& a, std::size_t p) {
    double acc = 0.0;
    for (int mu = 0; mu < g.dim(); ++mu) {
        const double v = a.at(p, mu);
        acc += static_cast<double>(g.signature(mu)) * v * v;
    }
    return acc;
}

ScalarField box_ratio(const RelWaveState& s) {
    ScalarField lap = laplacian(s.R);  // signature-weighted: the wave operator
    for (std::size_t p = 0; p < lap.mask.size(); ++p)
        if (lap.mask[p]) lap.values[p] /= s.R.values[p];
    require_valid_points(lap.mask, "wave-operator ratio");
    return lap;
}

}  // namespace

RelWaveState make_rel_wave_state(ScalarField R, ScalarField S,
                                 double m0, double hbar, double c) {
    if (!(m0 > 0.0) || !(hbar > 0.0) || !(c > 0.0))
        fail(ErrorKind::constraint, "relativistic state: m0, hbar, c must be positive");
    if (!R.grid || !S.grid || !R.grid->same_layout(*S.grid))
        fail(ErrorKind::config, "relativistic state: amplitude and action grids differ");
    if (!R.grid->lorentzian())
        fail(ErrorKind::config, "relativistic state: needs a Lorentzian grid");

    for (std::size_t p = 0; p < R.mask.size(); ++p)
        if (R.mask[p] && R.values[p] < 0.0)
            fail(ErrorKind::constraint, "relativistic state: amplitude is negative at a valid point");

    double max_r = 0.0;
    for (std::size_t p = 0; p < R.mask.size(); ++p)
        if (R.mask[p]) max_r = std::max(max_r, R.values[p]);
    if (max_r <= 0.0)
        fail(ErrorKind::empty_support, "relativistic state: amplitude vanishes everywhere");
    const double floor = kFloorFraction * max_r;

    Mask m = R.mask;
    for (std::size_t p = 0; p < m.size(); ++p)
        m[p] = (m[p] && S.mask[p] && R.values[p] >= floor) ? 1 : 0;
    if (valid_count(m) == 0)
        fail(ErrorKind::empty_support, "relativistic state: no point survives the amplitude floor");

    RelWaveState s;
    s.grid = R.grid;
    s.R = std::move(R);
    s.S = std::move(S);
    s.R.mask = m;
    s.S.mask = std::move(m);
    s.m0 = m0;
    s.hbar = hbar;
    s.c = c;
    s.amplitude_floor = floor;
    return s;
}

ComplexResidual kg_residual(const RelWaveState& s) {
    const std::size_t n = s.grid->point_count();
    ScalarField re = make_scalar(s.grid);
    ScalarField im = make_scalar(s.grid);
    re.mask = s.R.mask;
    im.mask = s.R.mask;
    for (std::size_t p = 0; p < n; ++p) {
        if (!re.mask[p]) continue;
        const double theta = s.S.values[p] / s.hbar;  // psi = R exp(-i theta)
        re.values[p] = s.R.values[p] * std::cos(theta);
        im.values[p] = -s.R.values[p] * std::sin(theta);
    }

    const double k0 = s.m0 * s.c / s.hbar;
    ComplexResidual out;
    out.real_part = laplacian(re);
    out.imag_part = laplacian(im);
    for (std::size_t p = 0; p < n; ++p) {
        if (out.real_part.mask[p]) out.real_part.values[p] += k0 * k0 * re.values[p];
        if (out.imag_part.mask[p]) out.imag_part.values[p] += k0 * k0 * im.values[p];
    }
    out.real_norms = norms(out.real_part);
    out.imag_norms = norms(out.imag_part);
    return out;
}

RelFieldReport rel_field_residuals(const RelWaveState& s) {
    const CovectorField p_field = gradient(s.S);
    const int d = s.grid->dim();

    // Current conservation: d_mu (rho p^mu); the divergence helper applies
    // the signature raising, so the flux is stored with lower index.
    CovectorField flux = make_covector(s.grid);
    flux.mask = p_field.mask;
    for (std::size_t p = 0; p < flux.mask.size(); ++p) {
        if (!flux.mask[p]) continue;
        const double rho = s.R.values[p] * s.R.values[p];
        for (int mu = 0; mu < d; ++mu) flux.at(p, mu) = rho * p_field.at(p, mu);
    }

    RelFieldReport report;
    report.continuity_residual = covector_divergence(flux);

    const ScalarField ratio = box_ratio(s);
    const double m2c2 = (s.m0 * s.c) * (s.m0 * s.c);
    report.mass_shell_residual = make_scalar(s.grid);
    report.mass_shell_residual.mask = mask_and(p_field.mask, ratio.mask);
    for (std::size_t p = 0; p < ratio.mask.size(); ++p) {
        if (!report.mass_shell_residual.mask[p]) continue;
        report.mass_shell_residual.values[p] =
            eta_square(*s.grid, p_field, p) - m2c2 +
            (s.hbar * s.hbar) * ratio.values[p];
    }
    report.continuity_norms = norms(report.continuity_residual);
    report.mass_shell_norms = norms(report.mass_shell_residual);
    return report;
}

EffectiveMass effective_mass(const RelWaveState& s) {
    const ScalarField ratio = box_ratio(s);
    EffectiveMass out;
    out.mass = make_scalar(s.grid);
    out.mass.mask.assign(ratio.mask.size(), 0);
    out.tachyonic.assign(ratio.mask.size(), 0);
    const double scale = (s.hbar * s.hbar) / (s.c * s.c);
    for (std::size_t p = 0; p < ratio.mask.size(); ++p) {
        if (!ratio.mask[p]) continue;
        const double radicand = s.m0 * s.m0 - scale * ratio.values[p];
        if (radicand < 0.0) {
            out.tachyonic[p] = 1;
            ++out.tachyonic_count;
        } else {
            out.mass.mask[p] = 1;
            out.mass.values[p] = std::sqrt(radicand);
        }
    }
    return out;
}

ScalarField dispersion_residual(const RelWaveState& s) {
    const CovectorField p_field = gradient(s.S);
    const ScalarField ratio = box_ratio(s);
    const int d = s.grid->dim();
    const double k0 = s.m0 * s.c / s.hbar;

    ScalarField out = make_scalar(s.grid);
    out.mask = mask_and(p_field.mask, ratio.mask);
    require_valid_points(out.mask, "dispersion residual");
    for (std::size_t p = 0; p < out.mask.size(); ++p) {
        if (!out.mask[p]) continue;
        double k_sq = 0.0;
        for (int mu = 0; mu < d; ++mu) {
            const double k = p_field.at(p, mu) / s.hbar;
            k_sq += static_cast<double>(s.grid->signature(mu)) * k * k;
        }
        out.values[p] = k_sq - k0 * k0 + ratio.values[p];
    }
    return out;
}

MatrixField rel_stress_tensor(const RelWaveState& s) {
    const std::size_t n = s.grid->point_count();
    const int d = s.grid->dim();

    ScalarField rho = make_scalar(s.grid);
    ScalarField ln_rho = make_scalar(s.grid);
    rho.mask = s.R.mask;
    ln_rho.mask = s.R.mask;
    for (std::size_t p = 0; p < n; ++p) {
        if (!rho.mask[p]) continue;
        rho.values[p] = s.R.values[p] * s.R.values[p];
        // Exact doubling keeps ln(rho) stencils in lockstep with ln(R) ones.
        ln_rho.values[p] = 2.0 * std::log(s.R.values[p]);
    }

    MatrixField sigma = hessian(ln_rho);
    sigma.symmetry = Symmetry::symmetric;
    const double quarter = (s.hbar * s.hbar) / (4.0 * s.m0);
    for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
        if (!sigma.mask[p]) continue;
        const double weight = quarter * rho.values[p];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sigma.at(p, i, j) = weight * sigma.at(p, i, j);
    }

    const MatrixField hess_r = hessian(s.R);
    const CovectorField grad_r = gradient(s.R);
    const double half = (s.hbar * s.hbar) / (2.0 * s.m0);
    double gap = 0.0;
    double constituent = 0.0;
    for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
        if (!sigma.mask[p] || !hess_r.mask[p] || !grad_r.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double curvature = half * s.R.values[p] * hess_r.at(p, i, j);
                const double slope = half * grad_r.at(p, i) * grad_r.at(p, j);
                gap = std::max(gap, std::fabs((curvature - slope) - sigma.at(p, i, j)));
                constituent = std::max({constituent, std::fabs(curvature), std::fabs(slope),
                                        std::fabs(sigma.at(p, i, j))});
            }
    }
    require_route_agreement(gap, constituent, s.grid->max_spacing(), "four-stress tensor");
    require_valid_points(sigma.mask, "four-stress tensor");
    return sigma;
}

EnergyMomentum energy_momentum_tensor(const RelWaveState& s, const CovectorField& u) {
    if (!u.grid || !s.grid->same_layout(*u.grid))
        fail(ErrorKind::config, "energy-momentum: four-velocity grid differs");
    const int d = s.grid->dim();

    const MatrixField sigma = rel_stress_tensor(s);
    Mask m = mask_and(sigma.mask, u.mask);
    require_valid_points(m, "energy-momentum tensor");

    for (std::size_t p = 0; p < m.size(); ++p) {
        if (!m[p]) continue;
        if (std::fabs(eta_square(*s.grid, u, p) - 1.0) > 1e-6)
            fail(ErrorKind::constraint, "energy-momentum: four-velocity is not unit-normalized");
    }

    EnergyMomentum out;
    out.tensor = make_matrix(s.grid, Symmetry::symmetric);
    out.tensor.mask = m;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (!m[p]) continue;
        const double rho = s.R.values[p] * s.R.values[p];
        for (int mu = 0; mu < d; ++mu)
            for (int nu = 0; nu < d; ++nu) {
                const double raise =
                    static_cast<double>(s.grid->signature(mu) * s.grid->signature(nu));
                out.tensor.at(p, mu, nu) = s.m0 * rho * u.at(p, mu) * u.at(p, nu) -
                                           raise * sigma.at(p, mu, nu);
            }
    }

    // Lower the second index; the signature weight inside the divergence
    // contraction then raises it back, leaving plain d_nu T^{mu nu}.
    MatrixField mixed = make_matrix(s.grid);
    mixed.mask = out.tensor.mask;
    for (std::size_t p = 0; p < m.size(); ++p) {
        if (!m[p]) continue;
        for (int mu = 0; mu < d; ++mu)
            for (int nu = 0; nu < d; ++nu)
                mixed.at(p, mu, nu) =
                    static_cast<double>(s.grid->signature(nu)) * out.tensor.at(p, mu, nu);
    }
    out.divergence = tensor_divergence(mixed, ContractIndex::second);
    out.divergence_norms = norms(out.divergence);
    return out;
}

ScalarField rel_mean_pressure(const RelWaveState& s) {
    if (s.grid->dim() != 4)
        fail(ErrorKind::config, "mean pressure: the 1/4 trace factor requires a 4-D grid");
    const MatrixField sigma = rel_stress_tensor(s);

    ScalarField pressure = make_scalar(s.grid);
    pressure.mask = sigma.mask;
    for (std::size_t p = 0; p < pressure.mask.size(); ++p) {
        if (!pressure.mask[p]) continue;
        double trace = 0.0;
        for (int mu = 0; mu < 4; ++mu)
            trace += static_cast<double>(s.grid->signature(mu)) * sigma.at(p, mu, mu);
        pressure.values[p] = -trace / 4.0;
    }

    // Closed forms with the trace-derived sign:
    // (hbar^2/8 m0)(|dR|^2_eta - R Box R) and rho V_q/4 + (hbar^2/8 m0)|dR|^2_eta.
    const CovectorField grad_r = gradient(s.R);
    const ScalarField box_r = laplacian(s.R);
    const double eighth = (s.hbar * s.hbar) / (8.0 * s.m0);
    const double half = (s.hbar * s.hbar) / (2.0 * s.m0);
    double gap = 0.0;
    double constituent = 0.0;
    for (std::size_t p = 0; p < pressure.mask.size(); ++p) {
        if (!pressure.mask[p] || !grad_r.mask[p] || !box_r.mask[p]) continue;
        const double slope_sq = eta_square(*s.grid, grad_r, p);
        const double curvature = s.R.values[p] * box_r.values[p];
        const double direct = eighth * (slope_sq - curvature);
        const double rho = s.R.values[p] * s.R.values[p];
        const double v_q = -half * box_r.values[p] / s.R.values[p];
        const double potential_form = rho * v_q / 4.0 + eighth * slope_sq;
        gap = std::max({gap, std::fabs(direct - pressure.values[p]),
                        std::fabs(potential_form - pressure.values[p])});
        constituent = std::max({constituent, std::fabs(eighth * slope_sq),
                                std::fabs(eighth * curvature), std::fabs(pressure.values[p])});
    }
    require_route_agreement(gap, constituent, s.grid->max_spacing(), "relativistic mean pressure");
    return pressure;
}

ScalarField rel_lagrangian(const RelWaveState& s) {
    const CovectorField grad_r = gradient(s.R);
    const CovectorField grad_s = gradient(s.S);

    ScalarField lag = make_scalar(s.grid);
    lag.mask = mask_and(grad_r.mask, grad_s.mask);
    require_valid_points(lag.mask, "relativistic lagrangian");
    const double half_coeff = (s.hbar * s.hbar) / (2.0 * s.m0);
    const double mc2 = s.m0 * s.c * s.c;
    for (std::size_t p = 0; p < lag.mask.size(); ++p) {
        if (!lag.mask[p]) continue;
        const double rho = s.R.values[p] * s.R.values[p];
        lag.values[p] = -half_coeff * eta_square(*s.grid, grad_r, p) -
                        0.5 * rho * (eta_square(*s.grid, grad_s, p) / s.m0 + mc2);
    }
    return lag;
}

}  // namespace madelung
