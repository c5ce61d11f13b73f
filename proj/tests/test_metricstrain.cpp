#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "madelung/calculus.hpp"
#include "madelung/conformal_oracle.hpp"
#include "madelung/error.hpp"
#include "madelung/framestrain.hpp"
#include "madelung/grid.hpp"
#include "madelung/metricstrain.hpp"

using namespace madelung;

namespace {

GridPtr spacetime(int n, double h) {
    const double x0 = -0.5 * h * (n - 1);
    return Grid::lorentzian(4, {n, n, n, n}, {h, h, h, h}, {x0, x0, x0, x0});
}

/// Diagonal metric rho(x) * eta sampled on the grid.
template <class Fn>
MatrixField conformal_metric(GridPtr g, Fn&& rho) {
    MatrixField m = make_matrix(g, Symmetry::symmetric);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        const double r = rho(x);
        for (int i = 0; i < 4; ++i)
            m.at(p, i, i) = static_cast<double>(g->signature(i)) * r;
    }
    return m;
}

MatrixField flat_metric(GridPtr g) {
    return conformal_metric(g, [](const std::array<double, kMaxDim>&) { return 1.0; });
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::config;
}

/// Least-squares slope of ln(err) against ln(eps).
double loglog_slope(const std::vector<double>& eps, const std::vector<double>& err) {
    const auto n = static_cast<double>(eps.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double x = std::log(eps[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::size_t probe_index(const Grid& g, const std::array<double, 4>& coords) {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < 4; ++a) {
        const double t = (coords[static_cast<std::size_t>(a)] - g.origin(a)) / g.spacing(a);
        idx[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(t));
    }
    return g.ravel(idx);
}

}  // namespace

TEST_CASE("strain factory: flat, scaled, and weak-field metrics") {
    auto g = spacetime(5, 0.25);

    const MetricStrainField flat = strain_from_metric(flat_metric(g));
    CHECK(flat.singular_count == 0);
    for (std::size_t p = 0; p < flat.mask.size(); ++p) {
        REQUIRE(flat.mask[p] == 1);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                CHECK(flat.E_lower.at(p, i, j) == 0.0);
                CHECK(flat.g_upper.at(p, i, j) ==
                      (i == j ? static_cast<double>(g->signature(i)) : 0.0));
            }
    }

    const MetricStrainField scaled = strain_from_metric(
        conformal_metric(g, [](const std::array<double, kMaxDim>&) { return 1.5; }));
    const std::size_t c = probe_index(*g, {0.0, 0.0, 0.0, 0.0});
    CHECK(scaled.E_lower.at(c, 0, 0) == 0.5);
    CHECK(scaled.E_lower.at(c, 1, 1) == -0.5);
    CHECK(scaled.E_lower.at(c, 2, 2) == -0.5);
    CHECK(scaled.E_lower.at(c, 3, 3) == -0.5);
    CHECK(scaled.E_lower.at(c, 0, 1) == 0.0);

    // Weak field: only g00 deviates, E00 = 2 phi.
    MatrixField weak = flat_metric(g);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        weak.at(p, 0, 0) = 1.0 + 2.0 * (0.01 * x[1]);
    }
    const MetricStrainField wf = strain_from_metric(weak);
    for (std::size_t p = 0; p < wf.mask.size(); ++p) {
        g->point_coords(p, x);
        CHECK(std::fabs(wf.E_lower.at(p, 0, 0) - 0.02 * x[1]) <= 1e-15);
        CHECK(wf.E_lower.at(p, 1, 1) == 0.0);
        CHECK(wf.E_lower.at(p, 0, 1) == 0.0);
    }

    // Round trip from the deformation side.
    const MetricStrainField back = strain_from_deformation(wf.E_lower);
    for (std::size_t p = 0; p < back.mask.size(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(back.g_lower.at(p, i, j) == wf.g_lower.at(p, i, j));
}

TEST_CASE("strain factory: validation and singular masking") {
    auto g = spacetime(5, 0.25);

    MatrixField asym = flat_metric(g);
    asym.at(12, 0, 1) = 0.3;  // upper entry only: not symmetric
    CHECK(kind_of([&] { strain_from_metric(asym); }) == ErrorKind::constraint);

    auto euclid = Grid::euclidean(3, {5, 5, 5}, {0.25, 0.25, 0.25}, {-0.5, -0.5, -0.5});
    MatrixField wrong_grid = make_matrix(euclid);
    CHECK(kind_of([&] { strain_from_metric(wrong_grid); }) == ErrorKind::constraint);

    MatrixField nearly_singular = flat_metric(g);
    const std::size_t q = probe_index(*g, {0.25, 0.0, 0.0, 0.0});
    nearly_singular.at(q, 0, 0) = 1e-12;
    const MetricStrainField m = strain_from_metric(nearly_singular);
    CHECK(m.singular_count == 1);
    CHECK(m.mask[q] == 0);
    CHECK(m.mask[probe_index(*g, {0.0, 0.0, 0.0, 0.0})] == 1);
}

TEST_CASE("inverse strain: exact compatibility and first-order error") {
    auto g = spacetime(5, 0.25);

    // Single diagonal strain component of size eps: the exact raised strain
    // is -eps/(1+eps); the first-order formula gives -eps.
    auto sweep_error = [&](double eps) {
        MatrixField metric = flat_metric(g);
        for (std::size_t p = 0; p < g->point_count(); ++p) metric.at(p, 0, 0) = 1.0 + eps;
        const MetricStrainField m = strain_from_metric(metric);
        const InverseStrainPair pair = inverse_strain_pair(m);
        CHECK(pair.compatibility_residual <= 1e-10);
        return pair.first_order_error;
    };

    const double e1 = sweep_error(0.1);
    CHECK(std::fabs(e1 - 0.00909090909090909) <= 1e-12);
    const double e2 = sweep_error(0.01);
    CHECK(std::fabs(e2 - 9.900990099009901e-5) <= 1e-15);
    const double e3 = sweep_error(0.001);
    CHECK(std::fabs(e3 - 9.99000999000999e-7) <= 5e-16);

    const double slope = loglog_slope({0.1, 0.01, 0.001}, {e1, e2, e3});
    CHECK(std::fabs(slope - 2.0) <= 0.1);
    CHECK(std::fabs(slope - 1.9795206961605474) <= 1e-9);

    // An off-diagonal strain exercises the full index contraction.
    MatrixField metric = flat_metric(g);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        metric.at(p, 0, 1) = 0.05;
        metric.at(p, 1, 0) = 0.05;
    }
    const InverseStrainPair pair = inverse_strain_pair(strain_from_metric(metric));
    CHECK(pair.compatibility_residual <= 1e-10);
    // The first-order formula predicts zero diagonal response, but the exact
    // raised strain develops E^00 = -eps^2/(1 - eps^2) = -1/401: that
    // second-order diagonal term dominates the error.
    CHECK(std::fabs(pair.first_order_error - 1.0 / 401.0) <= 1e-12);

    const std::size_t c = probe_index(*g, {0.0, 0.0, 0.0, 0.0});
    const InverseStrainPair eps_pair = inverse_strain_pair(strain_from_metric([&] {
        MatrixField mm = flat_metric(g);
        for (std::size_t p = 0; p < g->point_count(); ++p) mm.at(p, 0, 0) = 1.1;
        return mm;
    }()));
    CHECK(std::fabs(eps_pair.E_upper.at(c, 0, 0) - (-0.09090909090909091)) <= 1e-12);
}

TEST_CASE("connection: flat and constant strains give exactly zero") {
    auto g = spacetime(7, 0.2);

    const ThreeIndexField flat = connection_from_strain(strain_from_metric(flat_metric(g)));
    const ThreeIndexField scaled = connection_from_strain(strain_from_metric(
        conformal_metric(g, [](const std::array<double, kMaxDim>&) { return 1.5; })));

    MatrixField off = flat_metric(g);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        off.at(p, 0, 1) = 0.05;
        off.at(p, 1, 0) = 0.05;
    }
    const ThreeIndexField offc = connection_from_strain(strain_from_metric(off));

    for (const ThreeIndexField* gamma : {&flat, &scaled, &offc}) {
        std::size_t valid = 0;
        for (std::size_t p = 0; p < gamma->mask.size(); ++p) {
            if (!gamma->mask[p]) continue;
            ++valid;
            for (int l = 0; l < 4; ++l)
                for (int mu = 0; mu < 4; ++mu)
                    for (int nu = 0; nu < 4; ++nu) CHECK(gamma->at(p, l, mu, nu) == 0.0);
        }
        CHECK(valid == 5u * 5u * 5u * 5u);
    }
}

TEST_CASE("connection: weak field matches the closed form") {
    auto g = spacetime(9, 0.125);
    MatrixField metric = flat_metric(g);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        metric.at(p, 0, 0) = 1.0 + 0.02 * x[1];
    }
    const MetricStrainField m = strain_from_metric(metric);
    const ThreeIndexField gamma = connection_from_strain(m);

    const std::size_t c = probe_index(*g, {0.0, 0.0, 0.0, 0.0});
    REQUIRE(gamma.mask[c] == 1);
    CHECK(std::fabs(gamma.at(c, 1, 0, 0) - 0.01) <= 1e-12);
    CHECK(std::fabs(gamma.at(c, 0, 0, 1) - 0.01) <= 1e-12);
    CHECK(gamma.at(c, 0, 1, 0) == gamma.at(c, 0, 0, 1));

    const std::size_t r = probe_index(*g, {0.0, 0.125, 0.0, 0.0});
    CHECK(std::fabs(gamma.at(r, 0, 0, 1) - 0.01 / (1.0 + 0.02 * 0.125)) <= 1e-12);

    double sym_gap = 0.0, spurious = 0.0, g100_gap = 0.0;
    for (std::size_t p = 0; p < gamma.mask.size(); ++p) {
        if (!gamma.mask[p]) continue;
        g100_gap = std::max(g100_gap, std::fabs(gamma.at(p, 1, 0, 0) - 0.01));
        for (int l = 0; l < 4; ++l)
            for (int mu = 0; mu < 4; ++mu)
                for (int nu = 0; nu < 4; ++nu) {
                    sym_gap = std::max(sym_gap,
                                       std::fabs(gamma.at(p, l, mu, nu) - gamma.at(p, l, nu, mu)));
                    const bool expected = (l == 1 && mu == 0 && nu == 0) ||
                                          (l == 0 && ((mu == 0 && nu == 1) || (mu == 1 && nu == 0)));
                    if (!expected)
                        spurious = std::max(spurious, std::fabs(gamma.at(p, l, mu, nu)));
                }
    }
    CHECK(sym_gap == 0.0);       // mirrored construction: exact
    CHECK(g100_gap <= 1e-12);    // linear data differentiates exactly
    CHECK(spurious <= 1e-15);
}

TEST_CASE("curvature stack: flat scenarios are exactly zero") {
    auto g = spacetime(7, 0.2);

    for (double scale : {1.0, 1.5}) {
        const CurvatureStack st = curvature_stack(strain_from_metric(
            conformal_metric(g, [&](const std::array<double, kMaxDim>&) { return scale; })));
        std::size_t valid = 0;
        for (std::size_t p = 0; p < st.mask.size(); ++p) {
            if (!st.mask[p]) continue;
            ++valid;
            for (int r = 0; r < 4; ++r)
                for (int s = 0; s < 4; ++s) {
                    CHECK(st.ricci.at(p, r, s) == 0.0);
                    CHECK(st.einstein.at(p, r, s) == 0.0);
                    for (int mu = 0; mu < 4; ++mu)
                        for (int nu = 0; nu < 4; ++nu)
                            CHECK(st.riemann.at(p, r, s, mu, nu) == 0.0);
                }
            CHECK(st.scalar.values[p] == 0.0);
        }
        CHECK(valid == 3u * 3u * 3u * 3u);
        CHECK(st.bianchi_gap == 0.0);
        CHECK(st.antisymmetry_gap == 0.0);
    }
}

TEST_CASE("curvature stack: conformally curved metric matches the symbolic probes") {
    const int n = 13;
    const double h = 0.1;
    auto g = conformal_probe_grid(n, h);
    const MetricStrainField m = strain_from_metric(conformal_probe_metric(g));
    const CurvatureStack st = curvature_stack(m);

    CHECK(st.antisymmetry_gap == 0.0);  // evaluation order makes the index swap an exact negation
    CHECK(st.bianchi_gap <= 1e-14);

    // Relative tolerance against the largest frozen component of each tensor
    // family over the probe set (signed components cross zero, so a
    // componentwise relative error would be ill-defined).
    const ProbeScales scales = conformal_probe_scales();
    const double tol = 5.0 * h * h;

    for (const auto& probe : conformal_probes()) {
        const std::size_t p = probe_index(*g, probe.x);
        REQUIRE(st.mask[p] == 1);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const auto k = static_cast<std::size_t>(4 * i + j);
                CHECK(std::fabs(st.ricci.at(p, i, j) - probe.ricci[k]) <= tol * scales.ricci);
                CHECK(std::fabs(st.einstein.at(p, i, j) - probe.einstein[k]) <=
                      tol * scales.einstein);
            }
        CHECK(std::fabs(st.scalar.values[p] - probe.scalar) <= tol * scales.scalar);
    }
    CHECK(conformal_probe_deviation(st, *g) <= tol);

    // The numbers are measurements, not copies: the curvature must be
    // genuinely nonzero at the stencil scale.
    double ricci_sup = 0.0;
    for (std::size_t p = 0; p < st.mask.size(); ++p) {
        if (!st.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                ricci_sup = std::max(ricci_sup, std::fabs(st.ricci.at(p, i, j)));
    }
    CHECK(ricci_sup > 0.01);

    // Einstein tensor symmetric at stencil order.
    double asym = 0.0, esup = 0.0;
    for (std::size_t p = 0; p < st.mask.size(); ++p) {
        if (!st.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                asym = std::max(asym, std::fabs(st.einstein.at(p, i, j) - st.einstein.at(p, j, i)));
                esup = std::max(esup, std::fabs(st.einstein.at(p, i, j)));
            }
    }
    CHECK(asym <= 10.0 * h * h * esup);

    // Contracted Bianchi identity: the covariant divergence of the Einstein
    // tensor is stencil-small relative to the size of its ingredients.
    const CovectorField div = einstein_divergence(m, st);
    MatrixField mixed = make_matrix(g);
    mixed.mask = st.mask;
    for (std::size_t p = 0; p < mixed.mask.size(); ++p) {
        if (!mixed.mask[p]) continue;
        for (int mu = 0; mu < 4; ++mu)
            for (int nu = 0; nu < 4; ++nu) {
                double s = 0.0;
                for (int a = 0; a < 4; ++a)
                    s += m.g_upper.at(p, mu, a) * st.einstein.at(p, a, nu);
                mixed.at(p, mu, nu) = s;
            }
    }
    const ThreeIndexField dmix = grad_matrix(mixed);
    double dscale = 0.0;
    for (std::size_t p = 0; p < dmix.mask.size(); ++p) {
        if (!dmix.mask[p]) continue;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k)
                    dscale = std::max(dscale, std::fabs(dmix.at(p, i, j, k)));
    }
    double div_sup = 0.0;
    for (std::size_t p = 0; p < div.mask.size(); ++p) {
        if (!div.mask[p]) continue;
        for (int nu = 0; nu < 4; ++nu) div_sup = std::max(div_sup, std::fabs(div.at(p, nu)));
    }
    CHECK(div_sup > 1e-9);
    CHECK(div_sup <= 10.0 * h * h * dscale);

    // The exact raised/lowered compatibility holds on the curved metric too.
    CHECK(inverse_strain_pair(m).compatibility_residual <= 1e-10);
}

TEST_CASE("vierbein: identity, scaling, boost, and the conformal tie") {
    auto g = spacetime(5, 0.25);

    MatrixField identity = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i) identity.at(p, i, i) = 1.0;
    const MatrixField eta = vierbein_metric(make_vierbein(identity));
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(eta.at(p, i, j) ==
                      (i == j ? static_cast<double>(g->signature(i)) : 0.0));

    MatrixField doubled = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i) doubled.at(p, i, i) = 2.0;
    const MatrixField four_eta = vierbein_metric(make_vierbein(doubled));
    const std::size_t c = g->point_count() / 2;
    CHECK(four_eta.at(c, 0, 0) == 4.0);
    CHECK(four_eta.at(c, 1, 1) == -4.0);
    CHECK(four_eta.at(c, 2, 3) == 0.0);

    // A constant boost preserves eta.
    const double chi = 0.6;
    const double ch = std::cosh(chi), sh = std::sinh(chi);
    MatrixField boost = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        boost.at(p, 0, 0) = ch;
        boost.at(p, 0, 1) = sh;
        boost.at(p, 1, 0) = sh;
        boost.at(p, 1, 1) = ch;
        boost.at(p, 2, 2) = 1.0;
        boost.at(p, 3, 3) = 1.0;
    }
    const MatrixField boosted = vierbein_metric(make_vierbein(boost));
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const double want = (i == j) ? static_cast<double>(g->signature(i)) : 0.0;
                CHECK(std::fabs(boosted.at(p, i, j) - want) <= 1e-14);
            }

    // Conformal coframe h = R * I reproduces the deformed metric rho * eta
    // of the conformal-deformation pipeline entrywise.
    auto R = make_scalar(g);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        R.values[p] = std::exp(0.1 * x[0] - 0.05 * x[1] + 0.07 * x[2] + 0.02 * x[3]);
    }
    MatrixField conformal_frame = make_matrix(g);
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i) conformal_frame.at(p, i, i) = R.values[p];
    const MatrixField from_vierbein = vierbein_metric(make_vierbein(conformal_frame));
    const MatrixField from_conformal = deformed_metric(make_conformal(R));
    for (std::size_t p = 0; p < g->point_count(); ++p)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                CHECK(from_vierbein.at(p, i, j) == from_conformal.at(p, i, j));

    // Singular coframe is refused.
    MatrixField singular = identity;
    singular.at(7, 2, 2) = 0.0;
    CHECK(kind_of([&] { make_vierbein(singular); }) == ErrorKind::degeneracy);
}
