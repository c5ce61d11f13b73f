#pragma once

// Metric elasticity on a flat Lorentzian background: the strain E = g - eta
// of a spacetime metric, the Levi-Civita connection written in terms of that
// strain, the exact and first-order inverse-strain relations, the curvature
// stack (Riemann / Ricci / scalar / Einstein) for verification scenarios,
// and the vierbein (coframe) view g = eta(h, h).
//
// Index conventions: eta = diag(grid signature); Gamma^l_{mu nu} is stored
// as ThreeIndexField at(p, l, mu, nu); the Riemann tensor R^r_{s m n} =
// d_m Gamma^r_{n s} - d_n Gamma^r_{m s} + Gamma^r_{m a} Gamma^a_{n s}
// - Gamma^r_{n a} Gamma^a_{m s} is stored as FourIndexField at(p, r, s, m, n).

#include <cstddef>

#include "madelung/grid.hpp"

namespace madelung {

/// Finite metric strain: E = g - eta with the derived lowered metric
/// g = eta + E and its pointwise inverse. Points where g is singular
/// (|det| <= 1e-10) are masked out rather than rejected.
struct MetricStrainField {
    GridPtr grid;
    MatrixField E_lower;
    MatrixField g_lower;
    MatrixField g_upper;
    Mask mask;
    std::size_t singular_count = 0;
};

/// Builds the strain field from a lowered metric. The metric must be
/// symmetric within 1e-10 of its scale; the upper triangle is authoritative
/// and is mirrored so that all downstream symmetry identities hold exactly.
MetricStrainField strain_from_metric(const MatrixField& g_lower);

/// Same construction starting from the strain itself (g = eta + E).
MetricStrainField strain_from_deformation(const MatrixField& E_lower);

/// Exact raised strain E_upper = g_upper - eta, the sup-norm residual of the
/// exact compatibility relation between lowered and raised strain (an
/// algebraic consequence of g g^{-1} = I, so it must sit at the quality of
/// the pointwise inverse), and the sup-norm error of the first-order formula
/// E_upper ~ -eta E eta.
struct InverseStrainPair {
    MatrixField E_upper;
    double compatibility_residual = 0.0;
    double first_order_error = 0.0;
};

InverseStrainPair inverse_strain_pair(const MetricStrainField& m);

/// Levi-Civita connection written through the strain:
///   Gamma^l_{mu nu} = 1/2 g^{la} (d_mu E_{a nu} + d_nu E_{mu a} - d_a E_{mu nu}).
/// Exactly symmetric in (mu, nu) by construction; cross-checked against the
/// direct computation from g (independent differentiation) within 1e-12 of
/// the connection scale.
ThreeIndexField connection_from_strain(const MetricStrainField& m);

/// Full curvature stack by central differences of Gamma plus quadratic
/// Gamma Gamma terms. The two diagnostic gaps record the first cyclic
/// (Bianchi) symmetry residual and the last-two-index antisymmetry residual;
/// the latter is exactly zero for this evaluation order.
struct CurvatureStack {
    ThreeIndexField gamma;
    FourIndexField riemann;
    MatrixField ricci;
    ScalarField scalar;
    MatrixField einstein;
    Mask mask;
    double bianchi_gap = 0.0;
    double antisymmetry_gap = 0.0;
};

CurvatureStack curvature_stack(const MetricStrainField& m);

/// Covariant divergence of the Einstein tensor (index raised with g_upper):
///   div_nu = d_mu G^mu_nu + Gamma^mu_{mu a} G^a_nu - Gamma^a_{mu nu} G^mu_a.
/// Vanishes analytically (contracted Bianchi); the numeric value measures
/// stencil error.
CovectorField einstein_divergence(const MetricStrainField& m, const CurvatureStack& stack);

/// Coframe field h^k_mu with pointwise invertibility enforced by the factory.
struct VierbeinField {
    GridPtr grid;
    MatrixField h;
};

VierbeinField make_vierbein(const MatrixField& h);

/// Metric assembled from the coframe: g_{mu nu} = sum_k s_k h^k_mu h^k_nu
/// with s_k the grid signature. For h = R * I this reproduces the conformal
/// deformed metric rho * eta with rho = R^2, entrywise.
MatrixField vierbein_metric(const VierbeinField& v);

}  // namespace madelung
