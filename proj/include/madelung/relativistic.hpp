#pragma once

// Relativistic Madelung medium on a Lorentzian grid (signature +,-,-,-,
// x^0 = c t): wave-equation residual, hydrodynamic residuals, smeared
// effective mass, four-stress, energy-momentum tensor, mean pressure and
// Lagrangian density. All traces and raisings use the flat metric
// diag(+1,-1,...,-1) carried by the grid.

#include "madelung/calculus.hpp"
#include "madelung/grid.hpp"

namespace madelung {

/// Amplitude/action pair on a Lorentzian grid. dim may be 2..4; the 1+1-D
/// form is used by closed-form test scenarios. Floor masking as in the
/// non-relativistic state.
struct RelWaveState {
    GridPtr grid;
    ScalarField R;
    ScalarField S;
    double m0 = 1.0;  // rest mass
    double hbar = 1.0;
    double c = 1.0;
    double amplitude_floor = 0.0;
};

RelWaveState make_rel_wave_state(ScalarField R, ScalarField S,
                                 double m0, double hbar, double c);

/// Residual of the wave equation Box psi + (m0 c / hbar)^2 psi = 0 with
/// psi = R exp(-i S / hbar) reconstituted pointwise, split into real and
/// imaginary parts. Box is the signature-weighted flat wave operator.
struct ComplexResidual {
    ScalarField real_part;
    ScalarField imag_part;
    Norms real_norms;
    Norms imag_norms;
};

ComplexResidual kg_residual(const RelWaveState& s);

/// Hydrodynamic residuals: current conservation div(rho p#) with p = dS over
/// all axes, and the mass-shell balance p^2 - m0^2 c^2 + hbar^2 (Box R)/R.
/// The second field is reported as-is; for degenerate states (constant S)
/// it simply evaluates to -m0^2 c^2.
struct RelFieldReport {
    ScalarField continuity_residual;
    ScalarField mass_shell_residual;
    Norms continuity_norms;
    Norms mass_shell_norms;
};

RelFieldReport rel_field_residuals(const RelWaveState& s);

/// Pointwise effective mass m with m^2 c^2 = m0^2 c^2 - hbar^2 (Box R)/R.
/// Points with a negative radicand get no mass value; they are collected in
/// the tachyonic mask instead of raising an error.
struct EffectiveMass {
    ScalarField mass;       // valid where the radicand is non-negative
    Mask tachyonic;         // radicand < 0 (subset of the evaluated points)
    std::size_t tachyonic_count = 0;
};

EffectiveMass effective_mass(const RelWaveState& s);

/// k^2 - k0^2 + (Box R)/R with k = p/hbar and k0 = m0 c / hbar: the
/// frequency/wave-number form of the mass-shell balance.
ScalarField dispersion_residual(const RelWaveState& s);

/// sigma_{mu nu} = (hbar^2 / 4 m0) rho d^2(ln rho), the full coordinate
/// Hessian including time rows. The product form
/// (hbar^2 / 2 m0)(R d^2 R - dR dR) is cross-checked as in the
/// non-relativistic module.
MatrixField rel_stress_tensor(const RelWaveState& s);

/// T^{mu nu} = m0 rho u^mu u^nu - sigma^{mu nu} for a scenario-supplied
/// four-velocity (the container holds the contravariant components; it must
/// be unit-normalized, eta(u,u) = 1, within 1e-6). The divergence residual
/// d_nu T^{mu nu} is formed by lowering the second index and contracting
/// with the signature weights.
struct EnergyMomentum {
    MatrixField tensor;        // contravariant components T^{mu nu}
    CovectorField divergence;  // component mu: d_nu T^{mu nu}
    Norms divergence_norms;
};

EnergyMomentum energy_momentum_tensor(const RelWaveState& s, const CovectorField& u);

/// Mean pressure -1/4 sigma^mu_mu (trace with signature raising) on a 4-D
/// grid. The equivalent closed forms (hbar^2/8 m0)(|dR|^2_eta - R Box R)
/// and rho V_q/4 + (hbar^2/8 m0)|dR|^2_eta are evaluated alongside and must
/// agree within 10 h^2 of the constituent scale.
ScalarField rel_mean_pressure(const RelWaveState& s);

/// Lagrangian density
/// -(hbar^2 / 2 m0)|dR|^2_eta - rho/2 (|dS|^2_eta / m0 + m0 c^2).
ScalarField rel_lagrangian(const RelWaveState& s);

}  // namespace madelung
