#pragma once

// Closed-form curvature reference for the conformally flat spacetime metric
//   g = exp(psi) * eta,
//   psi = 0.2 x0 + 0.1 x1 - 0.15 x2 + 0.05 x3 + 0.05 (x0 x1 - x2 x3).
// The Ricci tensor, scalar curvature, and Einstein tensor were evaluated
// symbolically at five probe points and frozen here (row-major 4x4
// components). Shared by the unit tests, the verification suite, and the
// acceptance gate so all three compare against the same constants.

#include <array>
#include <cstddef>

#include "madelung/grid.hpp"

namespace madelung {

struct CurvatureProbe {
    std::array<double, 4> x;           ///< probe coordinates (t, x, y, z)
    std::array<double, 16> ricci;      ///< R_{mu nu}, row-major
    double scalar;                     ///< R
    std::array<double, 16> einstein;   ///< G_{mu nu}, row-major
};

/// The five frozen probes.
const std::array<CurvatureProbe, 5>& conformal_probes();

/// The conformal exponent psi at a point.
double conformal_probe_psi(const std::array<double, kMaxDim>& x);

/// Centered n^4 Lorentzian grid of spacing h (the probe coordinates land on
/// grid points for n = 13, h = 0.1 and any refinement of it).
GridPtr conformal_probe_grid(int n, double h);

/// The metric exp(psi) * eta sampled on the grid (diagonal, signature signs
/// included).
MatrixField conformal_probe_metric(GridPtr g);

/// Flattened index of the grid point nearest to the probe coordinates.
std::size_t conformal_probe_point(const Grid& g, const std::array<double, 4>& coords);

/// Largest absolute frozen component per tensor family over the probe set;
/// the scales that relative tolerances are taken against (signed components
/// cross zero, so componentwise relative error is ill-defined).
struct ProbeScales {
    double ricci = 0.0;
    double scalar = 0.0;
    double einstein = 0.0;
};

ProbeScales conformal_probe_scales();

/// Worst deviation between a computed curvature stack entry and the frozen
/// value, divided by the family scale, maximized over all probes and both
/// tensors plus the scalar.
struct CurvatureStack;
double conformal_probe_deviation(const CurvatureStack& st, const Grid& g);

}  // namespace madelung
