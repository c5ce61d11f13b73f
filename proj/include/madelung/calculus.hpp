#pragma once

// Second-order central-difference calculus on masked grid fields. No
// one-sided stencils anywhere: each derivative order costs one mask layer.

#include <array>
#include <cmath>
#include <optional>

#include "madelung/grid.hpp"

namespace madelung {

/// d f: covector with component k = df/dx^k for every axis k.
CovectorField gradient(const ScalarField& f);

/// Symmetric second-derivative matrix. Mixed entries are computed as nested
/// central first differences in both orders and averaged; the worst
/// pre-averaging asymmetry (pure rounding, the nests commute algebraically)
/// is written to *asymmetry when given. Mask shrinks by two layers.
MatrixField hessian(const ScalarField& f, double* asymmetry = nullptr);

/// Signature-weighted flat Laplace operator: sum_k s_k d^2f/(dx^k)^2 over the
/// grid's derivative axes (spatial axes on a Euclidean grid, all axes with
/// their signs on a Lorentzian one).
ScalarField laplacian(const ScalarField& f);

/// Jacobian of a covector: entry (j, k) = d a_j / dx^k.
MatrixField jacobian(const CovectorField& a);

/// (d a)_{jk} = d_j a_k - d_k a_j, all axes, antisymmetric by construction.
MatrixField exterior_derivative(const CovectorField& a);

/// Per-component gradient of a matrix field: entry (i, j, k) = d_k m_{ij}.
ThreeIndexField grad_matrix(const MatrixField& m);

/// Per-component gradient of a three-index field: (i, j, k, l) = d_l t_{ijk}.
FourIndexField grad_three(const ThreeIndexField& t);

enum class ContractIndex : std::uint8_t { first, second };

/// Covector with component i = sum_j w_j d_j m_{ij} (ContractIndex::second)
/// or sum_j w_j d_j m_{ji} (ContractIndex::first), where w_j is the grid's
/// derivative-axis weight (signature raising on Lorentzian grids).
CovectorField tensor_divergence(const MatrixField& m, ContractIndex index);

/// Scalar divergence sum_k w_k d_k a_k over the derivative axes.
ScalarField covector_divergence(const CovectorField& a);

// ============================================================================
// Norms, comparison, convergence
// ============================================================================

struct Norms {
    double sup = 0.0;  // max |v| over valid points and components
    double l2 = 0.0;   // sqrt(cell_volume * sum v^2), same domain
    std::size_t points = 0;
};

namespace detail {
template <class F>
std::size_t comps_per_point(const F& f) {
    return f.values.size() / f.mask.size();
}
}  // namespace detail

template <class F>
Norms norms(const F& f) {
    const std::size_t comps = detail::comps_per_point(f);
    Norms n;
    double sq = 0.0;
    for (std::size_t p = 0; p < f.mask.size(); ++p) {
        if (!f.mask[p]) continue;
        ++n.points;
        for (std::size_t c = 0; c < comps; ++c) {
            const double v = f.values[p * comps + c];
            n.sup = std::max(n.sup, std::fabs(v));
            sq += v * v;
        }
    }
    n.l2 = std::sqrt(sq * f.grid->cell_volume());
    return n;
}

/// Norms of (a - b) over the intersection of the two masks (same grid layout
/// required). Use for route-agreement checks.
template <class F>
Norms diff_norms(const F& a, const F& b) {
    if (!a.grid->same_layout(*b.grid)) fail(ErrorKind::config, "diff_norms: mismatched grids");
    const std::size_t comps = detail::comps_per_point(a);
    Norms n;
    double sq = 0.0;
    for (std::size_t p = 0; p < a.mask.size(); ++p) {
        if (!a.mask[p] || !b.mask[p]) continue;
        ++n.points;
        for (std::size_t c = 0; c < comps; ++c) {
            const double v = a.values[p * comps + c] - b.values[p * comps + c];
            n.sup = std::max(n.sup, std::fabs(v));
            sq += v * v;
        }
    }
    n.l2 = std::sqrt(sq * a.grid->cell_volume());
    return n;
}

/// Sup norm restricted to points whose coordinates lie inside [lo, hi] on
/// every axis (used to compare refined grids over the coarse interior).
template <class F>
double sup_in_box(const F& f, const std::array<double, kMaxDim>& lo, const std::array<double, kMaxDim>& hi) {
    const std::size_t comps = detail::comps_per_point(f);
    std::array<double, kMaxDim> x{};
    double sup = 0.0;
    for (std::size_t p = 0; p < f.mask.size(); ++p) {
        if (!f.mask[p]) continue;
        f.grid->point_coords(p, x);
        bool inside = true;
        for (int a = 0; a < f.grid->dim(); ++a) {
            const auto ua = static_cast<std::size_t>(a);
            if (x[ua] < lo[ua] - 1e-12 || x[ua] > hi[ua] + 1e-12) inside = false;
        }
        if (!inside) continue;
        for (std::size_t c = 0; c < comps; ++c)
            sup = std::max(sup, std::fabs(f.values[p * comps + c]));
    }
    return sup;
}

/// Coordinate bounding box of the valid region (for sup_in_box).
template <class F>
void valid_box(const F& f, std::array<double, kMaxDim>& lo, std::array<double, kMaxDim>& hi) {
    lo.fill(1e300);
    hi.fill(-1e300);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < f.mask.size(); ++p) {
        if (!f.mask[p]) continue;
        f.grid->point_coords(p, x);
        for (int a = 0; a < f.grid->dim(); ++a) {
            const auto ua = static_cast<std::size_t>(a);
            lo[ua] = std::min(lo[ua], x[ua]);
            hi[ua] = std::max(hi[ua], x[ua]);
        }
    }
}

/// Observed convergence order log2(err_h / err_h2). Errors at or below the
/// exact-match floor (1e-12, desk-scale fields are O(1)) mean the stencil was
/// exact on this input; the order is then undefined and `exact` is set.
/// Guard for pairs of discretizations of one algebraic expression: the gap
/// must stay within 10 h^2 of the size of the terms that entered them (the
/// constituent scale, not the result scale — results may cancel to ~0).
/// A larger gap means a stencil bug, hence internal-consistency.
void require_route_agreement(double gap_sup, double constituent_scale, double h,
                             const char* what);

struct ConvergenceOrder {
    bool exact = false;
    double order = 0.0;
};

constexpr double kExactMatchFloor = 1e-12;

inline ConvergenceOrder convergence_order(double err_h, double err_h2) {
    if (err_h <= kExactMatchFloor || err_h2 <= kExactMatchFloor) return {true, 0.0};
    return {false, std::log2(err_h / err_h2)};
}

}  // namespace madelung
