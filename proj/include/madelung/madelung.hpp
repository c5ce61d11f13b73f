#pragma once

// Non-relativistic Madelung medium built from an amplitude/action pair:
// density, quantum potential and force, the density-gradient stress tensor,
// mean pressure, and the residuals of the hydrodynamic field equations.

#include <optional>

#include "madelung/calculus.hpp"
#include "madelung/grid.hpp"

namespace madelung {

/// Amplitude/action description of a scalar wave on a Euclidean grid
/// (optionally with a leading time axis). All derived quantities share the
/// state mask: points whose amplitude falls below `amplitude_floor` are
/// excluded so ratios like (Laplacian R)/R stay finite.
struct WaveState {
    GridPtr grid;
    ScalarField R;                 // amplitude, >= 0 on valid points
    ScalarField S;                 // action, same units as hbar
    std::optional<ScalarField> V;  // external potential, may be absent
    double hbar = 1.0;
    double mass = 1.0;
    double amplitude_floor = 0.0;  // 1e-8 * max amplitude
    bool stationary = false;       // declared time-independent (no time axis)
    std::size_t unwrap_warnings = 0;  // inconsistent phase links seen by decompose
};

/// Validates invariants (positive constants, Euclidean grid, non-negative
/// amplitude), computes the amplitude floor, and installs the shared state
/// mask on all member fields.
WaveState make_wave_state(ScalarField R,
                          ScalarField S,
                          std::optional<ScalarField> V,
                          double hbar,
                          double mass,
                          bool stationary = false);

/// Polar decomposition of a complex wave sampled as (real, imaginary):
/// R = |psi| and S = -hbar * arg(psi), the phase unwrapped by sequential
/// line sweeps (axis 0 first, then outward axis by axis). Adjacent valid
/// points whose unwrapped phases still differ by more than pi (phase
/// vortices, aliasing) are counted in `unwrap_warnings`.
WaveState decompose(const ScalarField& psi_real,
                    const ScalarField& psi_imag,
                    double hbar,
                    double mass);

/// rho = R^2 on the state mask.
ScalarField density(const WaveState& w);

/// V_q = -(hbar^2 / 2m) * (Laplacian R) / R over the spatial axes.
/// Mask shrinks by two layers; the division is guarded by the floor.
ScalarField quantum_potential(const WaveState& w);

/// f_q = -d V_q = +(hbar^2 / 2m) * d[(Laplacian R) / R].
/// Computed as the gradient of the guarded ratio; mask shrinks three layers.
CovectorField quantum_force(const WaveState& w);

/// sigma_ij = (hbar^2 / 4m) * rho * d^2(ln rho)/dx^i dx^j on a purely
/// spatial grid. The algebraically equal product form
/// (hbar^2 / 2m) * (R d^2R - dR dR) is evaluated alongside and the two must
/// agree within 10 h^2 relative to the size of the terms involved; a larger
/// gap indicates a stencil bug and raises an internal-consistency error.
MatrixField stress_tensor(const WaveState& w);

/// Mean pressure -1/3 trace(sigma) on a 3-D spatial grid. Two equivalent
/// closed forms, (hbar^2/6m)(|dR|^2 - R Laplacian R) and
/// rho V_q / 3 + (hbar^2/6m)|dR|^2, are evaluated alongside and the three
/// results must agree within 10 h^2 of the constituent scale.
ScalarField mean_pressure(const WaveState& w);

/// Mean pressure plus the measured three-way route comparison: the largest
/// pointwise gap between each pair of the three equivalent forms, and the
/// constituent scale the agreement guard compares them against.
struct MeanPressureRoutes {
    ScalarField pressure;            // the -1/3 trace form
    double gap_trace_direct = 0.0;   // |trace form - gradient/Laplacian form|
    double gap_trace_potential = 0.0;// |trace form - potential form|
    double gap_direct_potential = 0.0;
    double constituent_scale = 0.0;
};

MeanPressureRoutes mean_pressure_routes(const WaveState& w);

/// Residual of the momentum-balance identity, component i:
/// sum_j d_j sigma_ij - rho * (f_q)_i. Zero analytically for any smooth
/// amplitude, so the discrete value measures stencil error only.
CovectorField equilibrium_residual(const WaveState& w);

/// Residuals of the hydrodynamic field equations plus the irrotationality
/// checks. Time derivatives need a time axis; a state without one must be
/// declared stationary (the time terms are then zero).
struct MadelungReport {
    ScalarField continuity_residual;   // m drho/dt + div(rho dS)
    ScalarField hj_residual;           // dS/dt + |dS|^2/2m + V + V_q
    MatrixField vorticity_kinematic;   // d(dS/m), spatial block
    MatrixField vorticity_dynamic;     // d(dS), spatial block
    // Momentum balance, only evaluated on purely spatial grids.
    std::optional<CovectorField> equilibrium;

    Norms continuity_norms;
    Norms hj_norms;
    Norms vorticity_kinematic_norms;
    Norms vorticity_dynamic_norms;
    Norms equilibrium_norms;
};

MadelungReport field_equation_residuals(const WaveState& w);

/// Pointwise Lagrangian density
/// -rho [ dS/dt + |dS|^2/(2m) + V + (hbar^2/8m) |d rho|^2 / rho^2 ].
ScalarField lagrangian_density(const WaveState& w);

}  // namespace madelung
