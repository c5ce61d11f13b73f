#pragma once

// Conformal frame deformations: the logarithmic strain 1-form, its symmetric
// differential, the constitutive stress law, pointwise polar decomposition of
// general frame deformations, and the flat connection that makes the deformed
// coframe parallel (with its torsion and structure functions).
//
// Sign conventions used throughout (a single self-consistent pair):
//   * the strain 1-form is  omega = d(ln R)  (positive sign);
//   * the parallelizing connection is  omega_conn = -d(ln R), i.e. the
//     coefficient field carries convention_sign = -1 relative to the strain
//     form. Covariant derivatives of covector components use the dual
//     (positive) coefficient, which is what makes the coframe parallel and
//     the torsion identities close.

#include <array>
#include <cstddef>

#include "madelung/calculus.hpp"
#include "madelung/grid.hpp"

namespace madelung {

/// A pointwise dilatation R > 0 of a Euclidean or Lorentzian grid. The
/// deformed metric is rho * (base metric) with rho = R^2, and the deformed
/// coframe is theta^i = R dx^i.
struct ConformalDeformation {
    GridPtr grid;
    ScalarField R;      ///< dilatation factor, floor-masked
    ScalarField rho;    ///< R^2 on the same mask
    ScalarField log_r;  ///< ln R on the same mask (0 at masked-out points)
    double amplitude_floor = 0.0;
};

/// Validates and floor-masks the dilatation factor: a negative value at a
/// valid point is a constraint violation, an everywhere-vanishing one leaves
/// no support; points below 1e-8 * max R are masked out.
ConformalDeformation make_conformal(ScalarField R);

/// Deformed metric g = rho * base, base = identity (Euclidean) or the
/// signature diagonal (Lorentzian). Diagonal sign pattern re-asserted.
MatrixField deformed_metric(const ConformalDeformation& c);

/// Deformed coframe rows theta^i_j = R * delta^i_j.
MatrixField coframe(const ConformalDeformation& c);

/// omega = gradient(ln R), one mask layer spent.
CovectorField strain_one_form(const ConformalDeformation& c);

/// Symmetric differential of the strain form: hessian(ln R). The
/// antisymmetric part of the naive exterior derivative of omega is checked
/// internally (closedness of an exact form) before the symmetric part is
/// returned.
MatrixField strain_differential(const ConformalDeformation& c);

/// Constitutive stress (hbar^2 / 2 mass) * rho * hessian(ln R). Matches the
/// wave-state stress tensor bitwise when fed the same amplitude, because the
/// two routes share the hessian operator and differ only by exact
/// power-of-two factor rearrangements.
MatrixField constitutive_stress(const ConformalDeformation& c, double hbar, double mass);

/// Pointwise polar factors of a frame deformation h together with the
/// frame-variation coefficients omega(i,j,k) = sum_m (d_k h_im) (h^-1)_mj and
/// their split into the antisymmetric (rotation-algebra) and symmetric parts.
struct PolarFrame {
    MatrixField rotation;            ///< h * strain^-1, orthonormal within 1e-10
    MatrixField strain;              ///< sqrt(h^T h), symmetric positive-definite
    ThreeIndexField omega;           ///< (d_k h) h^-1
    ThreeIndexField omega_rotation;  ///< antisymmetric part in (i, j)
    ThreeIndexField omega_strain;    ///< symmetric part in (i, j)
    Mask singular;                   ///< points dropped by the determinant floor
    std::size_t singular_count = 0;
};

/// Polar decomposition at every valid point of h. Points with
/// |det h| <= 1e-10 are masked out and flagged in `singular` instead of
/// raising; the rotation orthonormality bound is enforced on the rest.
PolarFrame polar_frame_decomposition(const MatrixField& h);

/// The connection that parallelizes the deformed coframe. omega_scalar is
/// the (positive) strain 1-form; the coefficient field is
/// coeffs(i,j,k) = convention_sign * omega_k * delta^i_j with
/// convention_sign = -1.
struct TeleparallelConnection {
    GridPtr grid;
    CovectorField omega_scalar;
    ThreeIndexField omega_coeffs;
    double convention_sign = -1.0;
};

/// Builds the parallelizing connection and verifies its defining property:
/// the covariant derivative of the coframe rows (coordinate components
/// R delta^i_j) cancels within stencil error.
TeleparallelConnection teleparallel_connection(const ConformalDeformation& c);

/// Torsion of the parallel frame computed along independent routes, plus the
/// anholonomy structure functions. All three are stored against the
/// coordinate 2-form basis (values of (d wedge theta^i)_{jk}, bounded by
/// |dR|); per-theta-basis coefficients would carry a 1/rho factor that makes
/// the route comparison unbounded near the amplitude floor:
///   torsion            raw exterior derivative of each coframe row R dx^i;
///   torsion_connection antisymmetrized connection coefficients scaled by
///                      the frame factor R;
///   structure          frame-bracket structure functions with the two lower
///                      indices pulled back to the coordinate basis (factor
///                      rho); equal to minus the torsion.
/// Route agreement is enforced internally; the gaps are reported.
struct TorsionStructure {
    ThreeIndexField torsion;
    ThreeIndexField torsion_connection;
    ThreeIndexField structure;
    double route_gap = 0.0;     ///< sup |torsion - torsion_connection|
    double structure_gap = 0.0; ///< sup |torsion + structure|
};

TorsionStructure torsion_and_structure(const ConformalDeformation& c);

/// Curvature residual of the parallelizing connection: the exterior
/// derivative of the quotient-form connection -dR/R (the wedge-square term
/// vanishes identically for a scalar-diagonal connection). Analytically zero;
/// discretely an order-2 quantity because the quotient is taken before the
/// second derivative. Two mask layers spent.
MatrixField curvature_residual(const ConformalDeformation& c);

/// Parallelism and compatibility residuals of the connection. Each field is
/// the coefficient of the structurally fixed index pattern (delta^i_j for the
/// coframe check, the base-metric entry for the metric check), so scalars
/// and covectors suffice.
struct CompatibilityReport {
    CovectorField theta_parallelism;      ///< d_k R - (d_k ln R) R
    MatrixField covector_parallelism;     ///< (i,k): d_k(R a_i) - (d_k ln R) R a_i
    CovectorField transformed_connection; ///< R omega_k + rho d_k(1/R) (deformed-frame connection, frame-scale weighted)
    CovectorField metric_compatibility;   ///< d_k rho - 2 (d_k ln R) rho
    CovectorField volume_parallelism;     ///< d_k rho^{d/2} - d (d_k ln R) rho^{d/2}
    Norms theta_norms;
    Norms covector_norms;
    Norms connection_norms;
    Norms metric_norms;
    Norms volume_norms;
};

/// Runs the compatibility checks; `frame_components` are the constant
/// theta-components a_i of the test covector (entries beyond the grid
/// dimension ignored).
CompatibilityReport compatibility_suite(const ConformalDeformation& c,
                                        const std::array<double, kMaxDim>& frame_components);

}  // namespace madelung
