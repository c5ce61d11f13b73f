#include "madelung/metricstrain.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "madelung/calculus.hpp"
#include "madelung/error.hpp"
#include "madelung/smallmat.hpp"

namespace madelung {
namespace {

constexpr double kDetFloor = 1e-10;      // below this |det g| the point is masked
constexpr double kInverseTol = 1e-10;    // g g^{-1} = I quality demanded of survivors
constexpr double kSymmetryTol = 1e-10;   // input symmetry validation
constexpr double kRouteTol = 1e-12;      // strain route vs direct metric route

void require_spacetime(const GridPtr& grid, const char* op) {
    if (!grid) fail(ErrorKind::config, std::string(op) + ": missing grid");
    if (grid->dim() != 4 || !grid->lorentzian())
        fail(ErrorKind::constraint, std::string(op) + ": needs a 4-D Lorentzian grid");
}

void require_symmetric(const MatrixField& f, const char* op) {
    double scale = 0.0, asym = 0.0;
    for (std::size_t p = 0; p < f.mask.size(); ++p) {
        if (!f.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                scale = std::max(scale, std::fabs(f.at(p, i, j)));
                if (j > i) asym = std::max(asym, std::fabs(f.at(p, i, j) - f.at(p, j, i)));
            }
    }
    if (asym > kSymmetryTol * std::max(1.0, scale))
        fail(ErrorKind::constraint, std::string(op) + ": input matrix is not symmetric");
}

double eta_entry(const Grid& grid, int i, int j) {
    return (i == j) ? static_cast<double>(grid.signature(i)) : 0.0;
}

/// Computes determinants and inverses for the already-populated g_lower,
/// masking singular points and enforcing the inverse-quality invariant.
void finish_strain(MetricStrainField& out, const char* op) {
    out.g_upper = make_matrix(out.grid);
    for (std::size_t p = 0; p < out.mask.size(); ++p) {
        if (!out.mask[p]) continue;
        smallmat::Mat g{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) smallmat::at(g, 4, i, j) = out.g_lower.at(p, i, j);
        const double det = smallmat::determinant(g, 4);
        if (std::fabs(det) <= kDetFloor) {
            out.mask[p] = 0;
            ++out.singular_count;
            continue;
        }
        const smallmat::Mat inv = smallmat::inverse(g, 4);
        double residual = 0.0;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                out.g_upper.at(p, i, j) = smallmat::at(inv, 4, i, j);
                double s = 0.0;
                for (int k = 0; k < 4; ++k)
                    s += smallmat::at(g, 4, i, k) * smallmat::at(inv, 4, k, j);
                residual = std::max(residual, std::fabs(s - (i == j ? 1.0 : 0.0)));
            }
        if (residual > kInverseTol)
            fail(ErrorKind::internal_consistency,
                 std::string(op) + ": pointwise inverse fails the identity check");
    }
    require_valid_points(out.mask, op);
    out.E_lower.mask = out.mask;
    out.g_lower.mask = out.mask;
    out.g_upper.mask = out.mask;
}

}  // namespace

MetricStrainField strain_from_metric(const MatrixField& g_in) {
    const char* op = "strain from metric";
    require_spacetime(g_in.grid, op);
    require_symmetric(g_in, op);

    MetricStrainField out;
    out.grid = g_in.grid;
    out.E_lower = make_matrix(out.grid, Symmetry::symmetric);
    out.g_lower = make_matrix(out.grid, Symmetry::symmetric);
    out.mask = g_in.mask;
    for (std::size_t p = 0; p < out.mask.size(); ++p) {
        if (!out.mask[p]) continue;
        // The upper triangle is authoritative; mirroring keeps every
        // downstream symmetry identity exact rather than tolerance-level.
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                const double g = g_in.at(p, i, j);
                const double e = g - eta_entry(*out.grid, i, j);
                out.g_lower.at(p, i, j) = g;
                out.g_lower.at(p, j, i) = g;
                out.E_lower.at(p, i, j) = e;
                out.E_lower.at(p, j, i) = e;
            }
    }
    finish_strain(out, op);
    return out;
}

MetricStrainField strain_from_deformation(const MatrixField& E_in) {
    const char* op = "strain from deformation";
    require_spacetime(E_in.grid, op);
    require_symmetric(E_in, op);

    MetricStrainField out;
    out.grid = E_in.grid;
    out.E_lower = make_matrix(out.grid, Symmetry::symmetric);
    out.g_lower = make_matrix(out.grid, Symmetry::symmetric);
    out.mask = E_in.mask;
    for (std::size_t p = 0; p < out.mask.size(); ++p) {
        if (!out.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                const double e = E_in.at(p, i, j);
                const double g = e + eta_entry(*out.grid, i, j);
                out.E_lower.at(p, i, j) = e;
                out.E_lower.at(p, j, i) = e;
                out.g_lower.at(p, i, j) = g;
                out.g_lower.at(p, j, i) = g;
            }
    }
    finish_strain(out, op);
    return out;
}

InverseStrainPair inverse_strain_pair(const MetricStrainField& m) {
    InverseStrainPair out;
    out.E_upper = make_matrix(m.grid, Symmetry::symmetric);
    out.E_upper.mask = m.mask;
    const auto& grid = *m.grid;
    for (std::size_t p = 0; p < m.mask.size(); ++p) {
        if (!m.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                out.E_upper.at(p, i, j) = m.g_upper.at(p, i, j) - eta_entry(grid, i, j);
        for (int n = 0; n < 4; ++n) {
            const double sn = static_cast<double>(grid.signature(n));
            for (int u = 0; u < 4; ++u) {
                const double su = static_cast<double>(grid.signature(u));
                // eta E^ + E eta^ + E E^ collapses to g g^{-1} - I, so this
                // residual sits at the quality of the pointwise inverse.
                double r = sn * out.E_upper.at(p, n, u) + m.E_lower.at(p, n, u) * su;
                for (int k = 0; k < 4; ++k)
                    r += m.E_lower.at(p, n, k) * out.E_upper.at(p, k, u);
                out.compatibility_residual = std::max(out.compatibility_residual, std::fabs(r));

                const double first_order = -sn * su * m.E_lower.at(p, n, u);
                out.first_order_error = std::max(
                    out.first_order_error, std::fabs(out.E_upper.at(p, n, u) - first_order));
            }
        }
    }
    return out;
}

ThreeIndexField connection_from_strain(const MetricStrainField& m) {
    const char* op = "connection from strain";
    const ThreeIndexField gradE = grad_matrix(m.E_lower);
    const ThreeIndexField gradG = grad_matrix(m.g_lower);

    ThreeIndexField gamma = make_three_index(m.grid);
    gamma.mask = gradE.mask;
    require_valid_points(gamma.mask, op);

    double gap = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < gamma.mask.size(); ++p) {
        if (!gamma.mask[p]) continue;
        for (int l = 0; l < 4; ++l)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = mu; nu < 4; ++nu) {
                    double from_e = 0.0, from_g = 0.0;
                    for (int a = 0; a < 4; ++a) {
                        const double gua = m.g_upper.at(p, l, a);
                        from_e += gua * (gradE.at(p, a, nu, mu) + gradE.at(p, mu, a, nu) -
                                         gradE.at(p, mu, nu, a));
                        from_g += gua * (gradG.at(p, a, nu, mu) + gradG.at(p, mu, a, nu) -
                                         gradG.at(p, mu, nu, a));
                    }
                    from_e *= 0.5;
                    from_g *= 0.5;
                    gamma.at(p, l, mu, nu) = from_e;
                    gamma.at(p, l, nu, mu) = from_e;
                    gap = std::max(gap, std::fabs(from_e - from_g));
                    scale = std::max(scale, std::fabs(from_e));
                }
    }
    if (gap > kRouteTol * std::max(scale, 1e-30))
        fail(ErrorKind::internal_consistency,
             std::string(op) + ": strain route and direct metric route disagree");
    return gamma;
}

CurvatureStack curvature_stack(const MetricStrainField& m) {
    CurvatureStack st;
    st.gamma = connection_from_strain(m);
    const FourIndexField dGamma = grad_three(st.gamma);
    st.mask = dGamma.mask;

    st.riemann = make_four_index(m.grid);
    st.riemann.mask = st.mask;
    st.ricci = make_matrix(m.grid);
    st.ricci.mask = st.mask;
    st.scalar = make_scalar(m.grid);
    st.scalar.mask = st.mask;
    st.einstein = make_matrix(m.grid);
    st.einstein.mask = st.mask;

    double riemann_sup = 0.0;
    for (std::size_t p = 0; p < st.mask.size(); ++p) {
        if (!st.mask[p]) continue;
        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
                for (int mu = 0; mu < 4; ++mu)
                    for (int nu = 0; nu < 4; ++nu) {
                        const double dp = dGamma.at(p, r, nu, s, mu);
                        const double dm = dGamma.at(p, r, mu, s, nu);
                        double qp = 0.0, qm = 0.0;
                        for (int a = 0; a < 4; ++a) {
                            qp += st.gamma.at(p, r, mu, a) * st.gamma.at(p, a, nu, s);
                            qm += st.gamma.at(p, r, nu, a) * st.gamma.at(p, a, mu, s);
                        }
                        const double value = (dp - dm) + (qp - qm);
                        st.riemann.at(p, r, s, mu, nu) = value;
                        riemann_sup = std::max(riemann_sup, std::fabs(value));
                    }

        for (int s = 0; s < 4; ++s)
            for (int nu = 0; nu < 4; ++nu) {
                double sum = 0.0;
                for (int mu = 0; mu < 4; ++mu) sum += st.riemann.at(p, mu, s, mu, nu);
                st.ricci.at(p, s, nu) = sum;
            }

        double scalar = 0.0;
        for (int s = 0; s < 4; ++s)
            for (int nu = 0; nu < 4; ++nu)
                scalar += m.g_upper.at(p, s, nu) * st.ricci.at(p, s, nu);
        st.scalar.values[p] = scalar;

        for (int s = 0; s < 4; ++s)
            for (int nu = 0; nu < 4; ++nu)
                st.einstein.at(p, s, nu) =
                    st.ricci.at(p, s, nu) - 0.5 * scalar * m.g_lower.at(p, s, nu);

        for (int r = 0; r < 4; ++r)
            for (int s = 0; s < 4; ++s)
                for (int mu = 0; mu < 4; ++mu)
                    for (int nu = 0; nu < 4; ++nu) {
                        st.antisymmetry_gap =
                            std::max(st.antisymmetry_gap,
                                     std::fabs(st.riemann.at(p, r, s, mu, nu) +
                                               st.riemann.at(p, r, s, nu, mu)));
                        st.bianchi_gap = std::max(
                            st.bianchi_gap, std::fabs(st.riemann.at(p, r, s, mu, nu) +
                                                      st.riemann.at(p, r, mu, nu, s) +
                                                      st.riemann.at(p, r, nu, s, mu)));
                    }
    }
    require_route_agreement(st.bianchi_gap, riemann_sup, m.grid->max_spacing(),
                            "first curvature symmetry");
    return st;
}

CovectorField einstein_divergence(const MetricStrainField& m, const CurvatureStack& stack) {
    MatrixField mixed = make_matrix(m.grid);
    mixed.mask = stack.mask;
    for (std::size_t p = 0; p < mixed.mask.size(); ++p) {
        if (!mixed.mask[p]) continue;
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                double s = 0.0;
                for (int a = 0; a < 4; ++a)
                    s += m.g_upper.at(p, mu, a) * stack.einstein.at(p, a, nu);
                mixed.at(p, mu, nu) = s;
            }
    }
    const ThreeIndexField dMixed = grad_matrix(mixed);

    CovectorField out = make_covector(m.grid);
    out.mask = dMixed.mask;
    require_valid_points(out.mask, "einstein divergence");
    for (std::size_t p = 0; p < out.mask.size(); ++p) {
        if (!out.mask[p]) continue;
        for (int nu = 0; nu < 4; ++nu) {
            double s = 0.0;
            for (int mu = 0; mu < 4; ++mu) s += dMixed.at(p, mu, nu, mu);
            for (int a = 0; a < 4; ++a) {
                double trace_gamma = 0.0;
                for (int mu = 0; mu < 4; ++mu) trace_gamma += stack.gamma.at(p, mu, mu, a);
                s += trace_gamma * mixed.at(p, a, nu);
            }
            for (int mu = 0; mu < 4; ++mu)
                for (int a = 0; a < 4; ++a)
                    s -= stack.gamma.at(p, a, mu, nu) * mixed.at(p, mu, a);
            out.at(p, nu) = s;
        }
    }
    return out;
}

VierbeinField make_vierbein(const MatrixField& h) {
    require_spacetime(h.grid, "vierbein");
    for (std::size_t p = 0; p < h.mask.size(); ++p) {
        if (!h.mask[p]) continue;
        smallmat::Mat hm{};
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) smallmat::at(hm, 4, i, j) = h.at(p, i, j);
        if (std::fabs(smallmat::determinant(hm, 4)) <= kDetFloor)
            fail(ErrorKind::degeneracy,
                 "vierbein: coframe is singular at point " + std::to_string(p));
    }
    VierbeinField v;
    v.grid = h.grid;
    v.h = h;
    return v;
}

MatrixField vierbein_metric(const VierbeinField& v) {
    MatrixField g = make_matrix(v.grid, Symmetry::symmetric);
    g.mask = v.h.mask;
    const auto& grid = *v.grid;
    for (std::size_t p = 0; p < g.mask.size(); ++p) {
        if (!g.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k)
                    s += static_cast<double>(grid.signature(k)) * v.h.at(p, k, i) *
                         v.h.at(p, k, j);
                g.at(p, i, j) = s;
                g.at(p, j, i) = s;
            }
    }
    return g;
}

}  // namespace madelung
