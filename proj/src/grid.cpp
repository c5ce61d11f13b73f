#include "madelung/grid.hpp"

#include <algorithm>
#include <string>

namespace madelung {

GridPtr Grid::create(int dim,
                     const std::array<int, kMaxDim>& shape,
                     const std::array<double, kMaxDim>& spacing,
                     const std::array<double, kMaxDim>& origin,
                     const std::array<int, kMaxDim>& signature,
                     const std::array<AxisRole, kMaxDim>& roles) {
    if (dim < 1 || dim > kMaxDim)
        fail(ErrorKind::constraint, "grid dim must be between 1 and 4, got " + std::to_string(dim));

    int time_axes = 0;
    bool any_minus = false;
    for (int a = 0; a < dim; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (shape[ua] < 5)
            fail(ErrorKind::constraint,
                 "grid axis " + std::to_string(a) + " needs at least 5 points, got " + std::to_string(shape[ua]));
        if (!(spacing[ua] > 0.0))
            fail(ErrorKind::constraint, "grid axis " + std::to_string(a) + " spacing must be positive");
        if (signature[ua] != 1 && signature[ua] != -1)
            fail(ErrorKind::constraint, "grid signature entries must be +1 or -1");
        if (signature[ua] == -1) any_minus = true;
        if (roles[ua] == AxisRole::time) {
            ++time_axes;
            if (a != 0) fail(ErrorKind::constraint, "time axis must be axis 0");
        }
    }
    if (time_axes > 1) fail(ErrorKind::constraint, "at most one time axis allowed");
    if (any_minus) {
        // Lorentzian: exactly (+1, -1, ..., -1) with a leading time axis.
        if (time_axes != 1 || signature[0] != 1)
            fail(ErrorKind::constraint, "Lorentzian grid requires time axis 0 with signature +1");
        for (int a = 1; a < dim; ++a)
            if (signature[static_cast<std::size_t>(a)] != -1)
                fail(ErrorKind::constraint, "Lorentzian grid requires signature -1 on spatial axes");
    }

    auto g = std::shared_ptr<Grid>(new Grid());
    g->dim_ = dim;
    g->shape_ = shape;
    g->spacing_ = spacing;
    g->origin_ = origin;
    g->signature_ = signature;
    g->roles_ = roles;
    g->lorentzian_ = any_minus;

    g->points_ = 1;
    for (int a = dim - 1; a >= 0; --a) {
        g->strides_[static_cast<std::size_t>(a)] = g->points_;
        g->points_ *= static_cast<std::size_t>(shape[static_cast<std::size_t>(a)]);
    }

    for (int a = 0; a < dim; ++a) {
        if (g->roles_[static_cast<std::size_t>(a)] == AxisRole::space) g->spatial_axes_.push_back(a);
        if (any_minus || g->roles_[static_cast<std::size_t>(a)] == AxisRole::space) g->deriv_axes_.push_back(a);
    }
    return g;
}

GridPtr Grid::euclidean(int dim,
                        const std::array<int, kMaxDim>& shape,
                        const std::array<double, kMaxDim>& spacing,
                        const std::array<double, kMaxDim>& origin) {
    std::array<int, kMaxDim> sig{};
    std::array<AxisRole, kMaxDim> roles{};
    sig.fill(1);
    roles.fill(AxisRole::space);
    return create(dim, shape, spacing, origin, sig, roles);
}

GridPtr Grid::euclidean_with_time(int dim,
                                  const std::array<int, kMaxDim>& shape,
                                  const std::array<double, kMaxDim>& spacing,
                                  const std::array<double, kMaxDim>& origin) {
    std::array<int, kMaxDim> sig{};
    std::array<AxisRole, kMaxDim> roles{};
    sig.fill(1);
    roles.fill(AxisRole::space);
    roles[0] = AxisRole::time;
    return create(dim, shape, spacing, origin, sig, roles);
}

GridPtr Grid::lorentzian(int dim,
                         const std::array<int, kMaxDim>& shape,
                         const std::array<double, kMaxDim>& spacing,
                         const std::array<double, kMaxDim>& origin) {
    if (dim < 2) fail(ErrorKind::constraint, "Lorentzian grid needs at least a time and a space axis");
    std::array<int, kMaxDim> sig{};
    std::array<AxisRole, kMaxDim> roles{};
    sig.fill(-1);
    sig[0] = 1;
    roles.fill(AxisRole::space);
    roles[0] = AxisRole::time;
    return create(dim, shape, spacing, origin, sig, roles);
}

double Grid::max_spacing() const {
    double h = 0.0;
    for (int a = 0; a < dim_; ++a) h = std::max(h, spacing_[static_cast<std::size_t>(a)]);
    return h;
}

double Grid::cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= spacing_[static_cast<std::size_t>(a)];
    return v;
}

bool Grid::same_layout(const Grid& other) const {
    if (dim_ != other.dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        const auto ua = static_cast<std::size_t>(a);
        if (shape_[ua] != other.shape_[ua] || spacing_[ua] != other.spacing_[ua] ||
            origin_[ua] != other.origin_[ua] || signature_[ua] != other.signature_[ua] ||
            roles_[ua] != other.roles_[ua])
            return false;
    }
    return true;
}

// ----------------------------------------------------------------------------

namespace {

template <class F>
F make_field(GridPtr grid, std::size_t comps, Symmetry symmetry = Symmetry::none) {
    F f;
    f.grid = std::move(grid);
    f.values.assign(f.grid->point_count() * comps, 0.0);
    f.mask.assign(f.grid->point_count(), 1);
    if constexpr (requires { f.symmetry; }) f.symmetry = symmetry;
    return f;
}

}  // namespace

ScalarField make_scalar(GridPtr grid) { return make_field<ScalarField>(std::move(grid), 1); }

CovectorField make_covector(GridPtr grid) {
    const auto d = static_cast<std::size_t>(grid->dim());
    return make_field<CovectorField>(std::move(grid), d);
}

MatrixField make_matrix(GridPtr grid, Symmetry symmetry) {
    const auto d = static_cast<std::size_t>(grid->dim());
    auto f = make_field<MatrixField>(std::move(grid), d * d);
    f.symmetry = symmetry;
    return f;
}

ThreeIndexField make_three_index(GridPtr grid) {
    const auto d = static_cast<std::size_t>(grid->dim());
    return make_field<ThreeIndexField>(std::move(grid), d * d * d);
}

FourIndexField make_four_index(GridPtr grid) {
    const auto d = static_cast<std::size_t>(grid->dim());
    return make_field<FourIndexField>(std::move(grid), d * d * d * d);
}

Mask erode(const Grid& grid, const Mask& mask, int layers) {
    Mask cur = mask;
    Mask next(cur.size());
    for (int layer = 0; layer < layers; ++layer) {
        // Box erosion is separable: run a 1-D min filter along each axis.
        for (int a = 0; a < grid.dim(); ++a) {
            const std::size_t stride = grid.stride(a);
            const int extent = grid.shape(a);
            for (std::size_t p = 0; p < cur.size(); ++p) {
                const int ia = static_cast<int>((p / stride) % static_cast<std::size_t>(extent));
                std::uint8_t v = cur[p];
                if (ia == 0 || ia == extent - 1)
                    v = 0;
                else
                    v = static_cast<std::uint8_t>(v & cur[p - stride] & cur[p + stride]);
                next[p] = v;
            }
            std::swap(cur, next);
        }
    }
    return cur;
}

Mask mask_and(const Mask& a, const Mask& b) {
    if (a.size() != b.size()) fail(ErrorKind::config, "mask intersection over mismatched grids");
    Mask out(a.size());
    for (std::size_t p = 0; p < a.size(); ++p) out[p] = static_cast<std::uint8_t>(a[p] & b[p]);
    return out;
}

std::size_t valid_count(const Mask& mask) {
    std::size_t n = 0;
    for (auto v : mask) n += v;
    return n;
}

void require_valid_points(const Mask& mask, const char* op_name) {
    if (valid_count(mask) == 0)
        fail(ErrorKind::stencil_domain, std::string(op_name) + ": no valid points remain after mask erosion");
}

}  // namespace madelung
