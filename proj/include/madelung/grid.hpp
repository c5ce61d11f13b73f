#pragma once

// Uniform rectilinear grids (1..4 axes, Euclidean or Lorentzian signature)
// and the dense point-major field containers the operators work on.
//
// Conventions used throughout:
//   * axis 0 is the time axis whenever one exists; x^0 = c*t so spacing is a
//     plain length and no factor of c ever enters a stencil;
//   * a grid is "Lorentzian" when its signature mixes signs (+,-,-,-);
//   * every field carries a validity mask; derivative operators shrink it by
//     one layer per derivative order and never touch invalid points.

#include <array>
#include <cstdint>
#include <cstddef>
#include <memory>
#include <vector>

#include "madelung/error.hpp"

namespace madelung {

enum class AxisRole : std::uint8_t { space, time };

class Grid;
using GridPtr = std::shared_ptr<const Grid>;
using Mask = std::vector<std::uint8_t>;

constexpr int kMaxDim = 4;

class Grid {
  public:
    /// Validating factory; the only way to obtain a Grid.
    /// Requires: 1 <= dim <= 4, shape >= 5 and spacing > 0 per axis,
    /// signature entries in {-1,+1}, at most one time axis (at position 0),
    /// and a Lorentzian signature only in the form (+1, -1, ..., -1) with a
    /// leading time axis.
    static GridPtr create(int dim,
                          const std::array<int, kMaxDim>& shape,
                          const std::array<double, kMaxDim>& spacing,
                          const std::array<double, kMaxDim>& origin,
                          const std::array<int, kMaxDim>& signature,
                          const std::array<AxisRole, kMaxDim>& roles);

    /// All-space Euclidean grid.
    static GridPtr euclidean(int dim,
                             const std::array<int, kMaxDim>& shape,
                             const std::array<double, kMaxDim>& spacing,
                             const std::array<double, kMaxDim>& origin);

    /// Euclidean grid whose leading axis is time (non-relativistic evolution).
    static GridPtr euclidean_with_time(int dim,
                                       const std::array<int, kMaxDim>& shape,
                                       const std::array<double, kMaxDim>& spacing,
                                       const std::array<double, kMaxDim>& origin);

    /// Lorentzian grid, signature (+1, -1, ..., -1), axis 0 = time.
    static GridPtr lorentzian(int dim,
                              const std::array<int, kMaxDim>& shape,
                              const std::array<double, kMaxDim>& spacing,
                              const std::array<double, kMaxDim>& origin);

    int dim() const { return dim_; }
    int shape(int axis) const { return shape_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    double origin(int axis) const { return origin_[static_cast<std::size_t>(axis)]; }
    int signature(int axis) const { return signature_[static_cast<std::size_t>(axis)]; }
    AxisRole role(int axis) const { return roles_[static_cast<std::size_t>(axis)]; }

    std::size_t point_count() const { return points_; }
    std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

    bool lorentzian() const { return lorentzian_; }
    bool has_time_axis() const { return roles_[0] == AxisRole::time; }
    /// Largest spacing over the axes a derivative may run along; the "h" in
    /// every h^2 tolerance.
    double max_spacing() const;
    /// Product of spacings: the cell volume used by the weighted L2 norm.
    double cell_volume() const;

    double coord(int axis, int index) const {
        return origin_[static_cast<std::size_t>(axis)] + spacing_[static_cast<std::size_t>(axis)] * index;
    }

    void unravel(std::size_t p, std::array<int, kMaxDim>& idx) const {
        for (int a = 0; a < dim_; ++a) {
            idx[static_cast<std::size_t>(a)] = static_cast<int>(p / strides_[static_cast<std::size_t>(a)]);
            p %= strides_[static_cast<std::size_t>(a)];
        }
    }
    std::size_t ravel(const std::array<int, kMaxDim>& idx) const {
        std::size_t p = 0;
        for (int a = 0; a < dim_; ++a) p += static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]) * strides_[static_cast<std::size_t>(a)];
        return p;
    }
    void point_coords(std::size_t p, std::array<double, kMaxDim>& x) const {
        std::array<int, kMaxDim> idx{};
        unravel(p, idx);
        for (int a = 0; a < dim_; ++a) x[static_cast<std::size_t>(a)] = coord(a, idx[static_cast<std::size_t>(a)]);
    }

    /// Axes the Laplace operator (and divergence contractions) run over:
    /// all axes, signature-weighted, on a Lorentzian grid; the spatial axes
    /// with weight +1 on a Euclidean one.
    const std::vector<int>& derivative_axes() const { return deriv_axes_; }
    double derivative_weight(int axis) const {
        return lorentzian_ ? static_cast<double>(signature(axis)) : 1.0;
    }
    const std::vector<int>& spatial_axes() const { return spatial_axes_; }

    bool same_layout(const Grid& other) const;

  private:
    Grid() = default;

    int dim_ = 0;
    std::array<int, kMaxDim> shape_{};
    std::array<double, kMaxDim> spacing_{};
    std::array<double, kMaxDim> origin_{};
    std::array<int, kMaxDim> signature_{};
    std::array<AxisRole, kMaxDim> roles_{};
    std::array<std::size_t, kMaxDim> strides_{};
    std::size_t points_ = 0;
    bool lorentzian_ = false;
    std::vector<int> deriv_axes_;
    std::vector<int> spatial_axes_;
};

// ============================================================================
// Field containers. Point-major storage: values[p * comps + c]. All fields
// are plain value types; grids are shared immutable.
// ============================================================================

enum class Symmetry : std::uint8_t { none, symmetric, antisymmetric };

struct ScalarField {
    GridPtr grid;
    std::vector<double> values;
    Mask mask;

    double operator[](std::size_t p) const { return values[p]; }
    double& operator[](std::size_t p) { return values[p]; }
};

struct CovectorField {
    GridPtr grid;
    std::vector<double> values;
    Mask mask;

    double at(std::size_t p, int k) const { return values[p * static_cast<std::size_t>(grid->dim()) + static_cast<std::size_t>(k)]; }
    double& at(std::size_t p, int k) { return values[p * static_cast<std::size_t>(grid->dim()) + static_cast<std::size_t>(k)]; }
};

struct MatrixField {
    GridPtr grid;
    Symmetry symmetry = Symmetry::none;
    std::vector<double> values;
    Mask mask;

    std::size_t comp(int i, int j) const {
        const int d = grid->dim();
        return static_cast<std::size_t>(i * d + j);
    }
    double at(std::size_t p, int i, int j) const {
        const int d = grid->dim();
        return values[p * static_cast<std::size_t>(d * d) + comp(i, j)];
    }
    double& at(std::size_t p, int i, int j) {
        const int d = grid->dim();
        return values[p * static_cast<std::size_t>(d * d) + comp(i, j)];
    }
};

struct ThreeIndexField {
    GridPtr grid;
    std::vector<double> values;
    Mask mask;

    double at(std::size_t p, int i, int j, int k) const {
        const int d = grid->dim();
        return values[(p * static_cast<std::size_t>(d * d * d)) + static_cast<std::size_t>((i * d + j) * d + k)];
    }
    double& at(std::size_t p, int i, int j, int k) {
        const int d = grid->dim();
        return values[(p * static_cast<std::size_t>(d * d * d)) + static_cast<std::size_t>((i * d + j) * d + k)];
    }
};

struct FourIndexField {
    GridPtr grid;
    std::vector<double> values;
    Mask mask;

    double at(std::size_t p, int i, int j, int k, int l) const {
        const int d = grid->dim();
        return values[p * static_cast<std::size_t>(d * d * d * d) + static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
    }
    double& at(std::size_t p, int i, int j, int k, int l) {
        const int d = grid->dim();
        return values[p * static_cast<std::size_t>(d * d * d * d) + static_cast<std::size_t>(((i * d + j) * d + k) * d + l)];
    }
};

ScalarField make_scalar(GridPtr grid);
CovectorField make_covector(GridPtr grid);
MatrixField make_matrix(GridPtr grid, Symmetry symmetry = Symmetry::none);
ThreeIndexField make_three_index(GridPtr grid);
FourIndexField make_four_index(GridPtr grid);

/// Fill a scalar field by evaluating fn at every grid point (mask untouched).
template <class Fn>
void fill(ScalarField& f, Fn&& fn) {
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < f.grid->point_count(); ++p) {
        f.grid->point_coords(p, x);
        f.values[p] = fn(x);
    }
}

// ============================================================================
// Mask algebra
// ============================================================================

/// Chebyshev-box erosion by `layers` layers; points outside the grid count as
/// invalid, so the boundary is always stripped. Separable per-axis min filter.
Mask erode(const Grid& grid, const Mask& mask, int layers);

/// Intersection of two masks over the same grid.
Mask mask_and(const Mask& a, const Mask& b);

std::size_t valid_count(const Mask& mask);

/// Throws a stencil-domain error when no valid point remains.
void require_valid_points(const Mask& mask, const char* op_name);

}  // namespace madelung
