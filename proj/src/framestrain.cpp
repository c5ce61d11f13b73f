#include "madelung/framestrain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "madelung/smallmat.hpp"

namespace madelung {
namespace {

constexpr double kFloorFraction = 1e-8;
constexpr double kDetFloor = 1e-10;
constexpr double kOrthoTol = 1e-10;

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

/// Loads the dim x dim block at point p into a stack matrix.
smallmat::Mat load_point(const MatrixField& h, std::size_t p, int dim) {
    smallmat::Mat m{};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) smallmat::at(m, dim, i, j) = h.at(p, i, j);
    return m;
}

}  // namespace

ConformalDeformation make_conformal(ScalarField R) {
    if (!R.grid) fail(ErrorKind::config, "conformal deformation: missing grid");
    for (std::size_t p = 0; p < R.mask.size(); ++p)
        if (R.mask[p] && R.values[p] < 0.0)
            fail(ErrorKind::constraint, "conformal deformation: dilatation factor is negative at a valid point");

    const double max_r = masked_max(R);
    if (max_r <= 0.0)
        fail(ErrorKind::empty_support, "conformal deformation: dilatation factor vanishes everywhere");
    const double floor = kFloorFraction * max_r;

    Mask m = R.mask;
    for (std::size_t p = 0; p < m.size(); ++p)
        if (m[p] && R.values[p] < floor) m[p] = 0;
    if (valid_count(m) == 0)
        fail(ErrorKind::empty_support, "conformal deformation: no point survives the amplitude floor");

    ConformalDeformation c;
    c.grid = R.grid;
    c.R = std::move(R);
    c.R.mask = m;
    c.rho = make_scalar(c.grid);
    c.log_r = make_scalar(c.grid);
    c.rho.mask = m;
    c.log_r.mask = std::move(m);
    for (std::size_t p = 0; p < c.rho.mask.size(); ++p) {
        if (!c.rho.mask[p]) {
            c.rho.values[p] = 0.0;
            c.log_r.values[p] = 0.0;
            continue;
        }
        // Same product and logarithm as the wave-state density route; the
        // constitutive identity depends on these values matching bitwise.
        c.rho.values[p] = c.R.values[p] * c.R.values[p];
        c.log_r.values[p] = std::log(c.R.values[p]);
    }
    c.amplitude_floor = floor;
    return c;
}

MatrixField deformed_metric(const ConformalDeformation& c) {
    MatrixField g = make_matrix(c.grid, Symmetry::symmetric);
    g.mask = c.rho.mask;
    const int d = c.grid->dim();
    for (std::size_t p = 0; p < g.mask.size(); ++p) {
        if (!g.mask[p]) continue;
        for (int i = 0; i < d; ++i) {
            const double entry = c.rho.values[p] * static_cast<double>(c.grid->signature(i));
            g.at(p, i, i) = entry;
            if (entry * static_cast<double>(c.grid->signature(i)) <= 0.0)
                fail(ErrorKind::internal_consistency, "deformed metric: diagonal sign pattern broken");
        }
    }
    return g;
}

MatrixField coframe(const ConformalDeformation& c) {
    MatrixField theta = make_matrix(c.grid);
    theta.mask = c.R.mask;
    const int d = c.grid->dim();
    for (std::size_t p = 0; p < theta.mask.size(); ++p) {
        if (!theta.mask[p]) continue;
        for (int i = 0; i < d; ++i) theta.at(p, i, i) = c.R.values[p];
    }
    return theta;
}

CovectorField strain_one_form(const ConformalDeformation& c) {
    CovectorField omega = gradient(c.log_r);
    require_valid_points(omega.mask, "strain one-form");
    return omega;
}

MatrixField strain_differential(const ConformalDeformation& c) {
    MatrixField d_omega = hessian(c.log_r);
    d_omega.symmetry = Symmetry::symmetric;
    require_valid_points(d_omega.mask, "strain differential");

    // Closedness of the exact form: the naive exterior derivative of omega
    // must sit at stencil error (it is rounding-exact for commuting central
    // differences); anything larger flags a broken operator.
    const CovectorField omega = gradient(c.log_r);
    const MatrixField curl = exterior_derivative(omega);
    require_route_agreement(norms(curl).sup, norms(omega).sup, c.grid->max_spacing(),
                            "strain differential closedness");
    return d_omega;
}

MatrixField constitutive_stress(const ConformalDeformation& c, double hbar, double mass) {
    if (!(hbar > 0.0) || !(mass > 0.0))
        fail(ErrorKind::constraint, "constitutive stress: hbar and mass must be positive");

    MatrixField sigma = hessian(c.log_r);
    sigma.symmetry = Symmetry::symmetric;
    const double half = (hbar * hbar) / (2.0 * mass);
    const int d = c.grid->dim();
    for (std::size_t p = 0; p < sigma.mask.size(); ++p) {
        if (!sigma.mask[p]) continue;
        const double weight = half * c.rho.values[p];
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) sigma.at(p, i, j) = weight * sigma.at(p, i, j);
    }
    require_valid_points(sigma.mask, "constitutive stress");
    return sigma;
}

PolarFrame polar_frame_decomposition(const MatrixField& h) {
    const GridPtr grid = h.grid;
    const int d = grid->dim();
    const std::size_t n = grid->point_count();

    PolarFrame out;
    out.rotation = make_matrix(grid);
    out.strain = make_matrix(grid, Symmetry::symmetric);
    out.rotation.mask.assign(n, 0);
    out.strain.mask.assign(n, 0);
    out.singular.assign(n, 0);

    double ortho_worst = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (!h.mask[p]) continue;
        const smallmat::Mat hp = load_point(h, p, d);
        if (std::fabs(smallmat::determinant(hp, d)) <= kDetFloor) {
            out.singular[p] = 1;
            ++out.singular_count;
            continue;
        }
        const smallmat::Mat gram = smallmat::mul(smallmat::transpose(hp, d), hp, d);
        const smallmat::SqrtPair sqrt_pair = smallmat::spd_sqrt(gram, d);
        const smallmat::Mat rot = smallmat::mul(hp, sqrt_pair.root_inv, d);

        const smallmat::Mat check = smallmat::mul(smallmat::transpose(rot, d), rot, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double target = (i == j) ? 1.0 : 0.0;
                ortho_worst = std::max(ortho_worst, std::fabs(smallmat::at(check, d, i, j) - target));
            }

        out.rotation.mask[p] = 1;
        out.strain.mask[p] = 1;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                out.rotation.at(p, i, j) = smallmat::at(rot, d, i, j);
                out.strain.at(p, i, j) = smallmat::at(sqrt_pair.root, d, i, j);
            }
    }
    if (ortho_worst > kOrthoTol)
        fail(ErrorKind::degeneracy, "polar decomposition: rotation factor lost orthonormality");
    require_valid_points(out.rotation.mask, "polar decomposition");

    // Frame-variation coefficients (d_k h) h^-1 and their split. The
    // derivative needs only neighbor h values, so its mask is one erosion of
    // the field mask intersected with the nonsingular points.
    const ThreeIndexField dh = grad_matrix(h);
    out.omega = make_three_index(grid);
    out.omega.mask = dh.mask;
    for (std::size_t p = 0; p < n; ++p)
        if (out.omega.mask[p] && out.singular[p]) out.omega.mask[p] = 0;

    for (std::size_t p = 0; p < n; ++p) {
        if (!out.omega.mask[p]) continue;
        const smallmat::Mat hinv = smallmat::inverse(load_point(h, p, d), d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    double sum = 0.0;
                    for (int m = 0; m < d; ++m) sum += dh.at(p, i, m, k) * smallmat::at(hinv, d, m, j);
                    out.omega.at(p, i, j, k) = sum;
                }
    }

    out.omega_rotation = make_three_index(grid);
    out.omega_strain = make_three_index(grid);
    out.omega_rotation.mask = out.omega.mask;
    out.omega_strain.mask = out.omega.mask;
    for (std::size_t p = 0; p < n; ++p) {
        if (!out.omega.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double a = out.omega.at(p, i, j, k);
                    const double b = out.omega.at(p, j, i, k);
                    out.omega_rotation.at(p, i, j, k) = 0.5 * (a - b);
                    out.omega_strain.at(p, i, j, k) = 0.5 * (a + b);
                }
    }
    return out;
}

TeleparallelConnection teleparallel_connection(const ConformalDeformation& c) {
    TeleparallelConnection conn;
    conn.grid = c.grid;
    conn.convention_sign = -1.0;
    conn.omega_scalar = strain_one_form(c);

    const int d = c.grid->dim();
    conn.omega_coeffs = make_three_index(c.grid);
    conn.omega_coeffs.mask = conn.omega_scalar.mask;
    for (std::size_t p = 0; p < conn.omega_coeffs.mask.size(); ++p) {
        if (!conn.omega_coeffs.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k)
                conn.omega_coeffs.at(p, i, i, k) = conn.convention_sign * conn.omega_scalar.at(p, k);
    }

    // Defining property: the coframe rows (coordinate components R delta^i_j)
    // are parallel, i.e. d_k R cancels against (d_k ln R) R within stencil
    // error at every valid point.
    const CovectorField grad_r = gradient(c.R);
    double gap = 0.0;
    double constituent = 0.0;
    for (std::size_t p = 0; p < grad_r.mask.size(); ++p) {
        if (!grad_r.mask[p] || !conn.omega_scalar.mask[p]) continue;
        for (int k = 0; k < d; ++k) {
            const double slope = grad_r.at(p, k);
            const double transported = conn.omega_scalar.at(p, k) * c.R.values[p];
            gap = std::max(gap, std::fabs(slope - transported));
            constituent = std::max({constituent, std::fabs(slope), std::fabs(transported)});
        }
    }
    require_route_agreement(gap, constituent, c.grid->max_spacing(), "coframe parallelism");
    return conn;
}

TorsionStructure torsion_and_structure(const ConformalDeformation& c) {
    const int d = c.grid->dim();
    const std::size_t n = c.grid->point_count();

    TorsionStructure ts;
    ts.torsion = make_three_index(c.grid);
    ts.torsion_connection = make_three_index(c.grid);
    ts.structure = make_three_index(c.grid);

    // All three routes are reported against the coordinate 2-form basis
    // (upper frame index, lower coordinate form indices), i.e. as the
    // anholonomy components (d wedge theta^i)_{jk}. This normalization is
    // bounded by |dR| everywhere, so the agreement between routes is an
    // absolute O(h^2) statement even where the amplitude approaches the
    // floor; per-frame-basis components would carry a 1/rho factor that
    // amplifies stencil error without bound near the floor.

    // Route (a): raw exterior derivative of each coframe row R dx^i.
    Mask route_mask;
    for (int i = 0; i < d; ++i) {
        CovectorField row = make_covector(c.grid);
        row.mask = c.R.mask;
        for (std::size_t p = 0; p < n; ++p)
            if (row.mask[p]) row.at(p, i) = c.R.values[p];
        const MatrixField d_row = exterior_derivative(row);
        if (i == 0) route_mask = d_row.mask;
        for (std::size_t p = 0; p < n; ++p) {
            if (!d_row.mask[p]) continue;
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) ts.torsion.at(p, i, j, k) = d_row.at(p, j, k);
        }
    }
    ts.torsion.mask = route_mask;

    // Route (b): antisymmetrized connection coefficients. With the stored
    // convention omega^i_{jk} = sign * delta^i_j (d ln R)_k, sign = -1, the
    // frame-scale pull-back gives R * (omega_j delta^i_k - omega_k delta^i_j),
    // which equals route (a) exactly in the continuum.
    const CovectorField grad_log = gradient(c.log_r);
    // Route (c): structure functions of the frame bracket [e_j, e_k] with
    // e_j = (1/R) d_j, whose frame components are d_j(1/R) delta^i_k -
    // d_k(1/R) delta^i_j; stored with both lower indices pulled back to the
    // coordinate basis (factor rho), in which the identity reads
    // torsion = -structure.
    ScalarField inv_r = make_scalar(c.grid);
    inv_r.mask = c.R.mask;
    for (std::size_t p = 0; p < n; ++p)
        if (inv_r.mask[p]) inv_r.values[p] = 1.0 / c.R.values[p];
    const CovectorField grad_inv = gradient(inv_r);

    ts.torsion_connection.mask = mask_and(route_mask, grad_log.mask);
    ts.structure.mask = mask_and(route_mask, grad_inv.mask);
    for (std::size_t p = 0; p < n; ++p) {
        if (ts.torsion_connection.mask[p]) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        const double wj = grad_log.at(p, j) * c.R.values[p];
                        const double wk = grad_log.at(p, k) * c.R.values[p];
                        ts.torsion_connection.at(p, i, j, k) =
                            wj * ((i == k) ? 1.0 : 0.0) - wk * ((i == j) ? 1.0 : 0.0);
                    }
        }
        if (ts.structure.mask[p]) {
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        const double sj = grad_inv.at(p, j) * c.rho.values[p];
                        const double sk = grad_inv.at(p, k) * c.rho.values[p];
                        ts.structure.at(p, i, j, k) =
                            sj * ((i == k) ? 1.0 : 0.0) - sk * ((i == j) ? 1.0 : 0.0);
                    }
        }
    }

    double constituent = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (!ts.torsion.mask[p] || !ts.torsion_connection.mask[p] || !ts.structure.mask[p]) continue;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                for (int k = 0; k < d; ++k) {
                    const double a = ts.torsion.at(p, i, j, k);
                    const double b = ts.torsion_connection.at(p, i, j, k);
                    const double s = ts.structure.at(p, i, j, k);
                    ts.route_gap = std::max(ts.route_gap, std::fabs(a - b));
                    ts.structure_gap = std::max(ts.structure_gap, std::fabs(a + s));
                    constituent = std::max({constituent, std::fabs(a), std::fabs(b), std::fabs(s)});
                }
    }
    require_route_agreement(ts.route_gap, constituent, c.grid->max_spacing(), "torsion routes");
    require_route_agreement(ts.structure_gap, constituent, c.grid->max_spacing(),
                            "torsion vs structure functions");
    return ts;
}

MatrixField curvature_residual(const ConformalDeformation& c) {
    // Quotient form of the connection: -(d_k R)/R taken pointwise, so the
    // outer exterior derivative sees a genuinely nonlinear field and the
    // residual measures discretization curvature rather than exact stencil
    // cancellation. The wedge-square term of the structure equation is zero
    // identically for a connection proportional to the identity.
    const CovectorField grad_r = gradient(c.R);
    CovectorField conn = make_covector(c.grid);
    conn.mask = grad_r.mask;
    const int d = c.grid->dim();
    for (std::size_t p = 0; p < conn.mask.size(); ++p) {
        if (!conn.mask[p]) continue;
        for (int k = 0; k < d; ++k) conn.at(p, k) = -grad_r.at(p, k) / c.R.values[p];
    }
    MatrixField residual = exterior_derivative(conn);
    require_valid_points(residual.mask, "curvature residual");
    return residual;
}

CompatibilityReport compatibility_suite(const ConformalDeformation& c,
                                        const std::array<double, kMaxDim>& frame_components) {
    const int d = c.grid->dim();
    const std::size_t n = c.grid->point_count();
    const double h = c.grid->max_spacing();

    const CovectorField grad_r = gradient(c.R);
    const CovectorField grad_log = gradient(c.log_r);
    const CovectorField grad_rho = gradient(c.rho);
    ScalarField inv_r = make_scalar(c.grid);
    inv_r.mask = c.R.mask;
    for (std::size_t p = 0; p < n; ++p)
        if (inv_r.mask[p]) inv_r.values[p] = 1.0 / c.R.values[p];
    const CovectorField grad_inv = gradient(inv_r);
    const Mask m = mask_and(mask_and(grad_r.mask, grad_log.mask), grad_inv.mask);

    CompatibilityReport rep;
    rep.theta_parallelism = make_covector(c.grid);
    rep.transformed_connection = make_covector(c.grid);
    rep.metric_compatibility = make_covector(c.grid);
    rep.volume_parallelism = make_covector(c.grid);
    rep.covector_parallelism = make_matrix(c.grid);
    rep.theta_parallelism.mask = m;
    rep.transformed_connection.mask = m;
    rep.metric_compatibility.mask = m;
    rep.covector_parallelism.mask = m;

    // Volume element rho^{d/2} differentiated as its own field.
    ScalarField volume = make_scalar(c.grid);
    volume.mask = c.rho.mask;
    for (std::size_t p = 0; p < n; ++p)
        if (volume.mask[p]) volume.values[p] = std::pow(c.rho.values[p], 0.5 * d);
    const CovectorField grad_vol = gradient(volume);
    rep.volume_parallelism.mask = mask_and(m, grad_vol.mask);

    // Coordinate components of the constant-frame-component covector, each
    // differentiated as its own field.
    std::array<ScalarField, kMaxDim> alpha;
    std::array<CovectorField, kMaxDim> grad_alpha;
    for (int i = 0; i < d; ++i) {
        alpha[static_cast<std::size_t>(i)] = make_scalar(c.grid);
        ScalarField& a = alpha[static_cast<std::size_t>(i)];
        a.mask = c.R.mask;
        for (std::size_t p = 0; p < n; ++p)
            if (a.mask[p]) a.values[p] = c.R.values[p] * frame_components[static_cast<std::size_t>(i)];
        grad_alpha[static_cast<std::size_t>(i)] = gradient(a);
    }

    double theta_gap = 0.0, theta_scale = 0.0;
    double cov_gap = 0.0, cov_scale = 0.0;
    double conn_gap = 0.0, conn_scale = 0.0;
    double metric_gap = 0.0, metric_scale = 0.0;
    double vol_gap = 0.0, vol_scale = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        if (m[p]) {
            for (int k = 0; k < d; ++k) {
                const double slope = grad_r.at(p, k);
                const double transported = grad_log.at(p, k) * c.R.values[p];
                rep.theta_parallelism.at(p, k) = slope - transported;
                theta_gap = std::max(theta_gap, std::fabs(slope - transported));
                theta_scale = std::max({theta_scale, std::fabs(slope), std::fabs(transported)});

                // Transformation law for the connection under the frame
                // scale A = R: the deformed-frame form is omega + A d(A^-1),
                // which must vanish. Reported contracted with A (components
                // R omega_k + rho d_k(1/R)), so the residual stays bounded by
                // |dR| instead of inheriting an unbounded 1/R amplification
                // of the d(1/R) stencil error near the amplitude floor.
                const double scaled_omega = grad_log.at(p, k) * c.R.values[p];
                const double scaled_inv = grad_inv.at(p, k) * c.rho.values[p];
                rep.transformed_connection.at(p, k) = scaled_omega + scaled_inv;
                conn_gap = std::max(conn_gap, std::fabs(rep.transformed_connection.at(p, k)));
                conn_scale =
                    std::max({conn_scale, std::fabs(scaled_omega), std::fabs(scaled_inv)});

                const double rho_slope = grad_rho.at(p, k);
                const double rho_transported = 2.0 * grad_log.at(p, k) * c.rho.values[p];
                rep.metric_compatibility.at(p, k) = rho_slope - rho_transported;
                metric_gap = std::max(metric_gap, std::fabs(rho_slope - rho_transported));
                metric_scale = std::max({metric_scale, std::fabs(rho_slope), std::fabs(rho_transported)});

                for (int i = 0; i < d; ++i) {
                    const double a_slope = grad_alpha[static_cast<std::size_t>(i)].at(p, k);
                    const double a_transported =
                        grad_log.at(p, k) * alpha[static_cast<std::size_t>(i)].values[p];
                    rep.covector_parallelism.at(p, i, k) = a_slope - a_transported;
                    cov_gap = std::max(cov_gap, std::fabs(a_slope - a_transported));
                    cov_scale = std::max({cov_scale, std::fabs(a_slope), std::fabs(a_transported)});
                }
            }
        }
        if (rep.volume_parallelism.mask[p]) {
            for (int k = 0; k < d; ++k) {
                const double v_slope = grad_vol.at(p, k);
                const double v_transported = d * grad_log.at(p, k) * volume.values[p];
                rep.volume_parallelism.at(p, k) = v_slope - v_transported;
                vol_gap = std::max(vol_gap, std::fabs(v_slope - v_transported));
                vol_scale = std::max({vol_scale, std::fabs(v_slope), std::fabs(v_transported)});
            }
        }
    }
    require_route_agreement(theta_gap, theta_scale, h, "coframe parallelism");
    require_route_agreement(cov_gap, cov_scale, h, "covector parallelism");
    require_route_agreement(conn_gap, conn_scale, h, "transformed connection");
    require_route_agreement(metric_gap, metric_scale, h, "metric compatibility");
    require_route_agreement(vol_gap, vol_scale, h, "volume parallelism");

    rep.theta_norms = norms(rep.theta_parallelism);
    rep.covector_norms = norms(rep.covector_parallelism);
    rep.connection_norms = norms(rep.transformed_connection);
    rep.metric_norms = norms(rep.metric_compatibility);
    rep.volume_norms = norms(rep.volume_parallelism);
    return rep;
}

}  // namespace madelung
