#include "madelung/conformal_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "madelung/metricstrain.hpp"

namespace madelung {

const std::array<CurvatureProbe, 5>& conformal_probes() {
    static const std::array<CurvatureProbe, 5> kProbes = {{
        {{0.0, 0.0, 0.0, 0.0},
         {0.0175, -0.04, -0.015, 0.005, -0.04, 0.0075, -0.0075, 0.0025, -0.015, -0.0075,
          0.01375, 0.04625, 0.005, 0.0025, 0.04625, 0.00375},
         -0.0075,
         {0.02125, -0.04, -0.015, 0.005, -0.04, 0.00375, -0.0075, 0.0025, -0.015, -0.0075,
          0.01, 0.04625, 0.005, 0.0025, 0.04625, 0.0}},
        {{0.2, 0.1, -0.1, 0.2},
         {0.0203625, -0.038725, -0.0164, 0.0056375, -0.038725, 0.0067,
          -0.008800000000000001, 0.003025, -0.0164, -0.008800000000000001, 0.01345, 0.0456,
          0.0056375, 0.003025, 0.0456, 0.0021625},
         -0.001805485214532666,
         {0.0213375, -0.038725, -0.0164, 0.0056375, -0.038725, 0.005725,
          -0.008800000000000001, 0.003025, -0.0164, -0.008800000000000001, 0.012475, 0.0456,
          0.0056375, 0.003025, 0.0456, 0.0011875}},
        {{-0.2, 0.2, 0.1, -0.1},
         {0.015575, -0.04055, -0.015225, 0.004725, -0.04055, 0.010525, -0.006525, 0.002025,
          -0.015225, -0.006525, 0.0169875, 0.0467375, 0.004725, 0.002025, 0.0467375,
          0.0074875},
         -0.02024809866896487,
         {0.0252875, -0.04055, -0.015225, 0.004725, -0.04055, 0.0008125, -0.006525, 0.002025,
          -0.015225, -0.006525, 0.007275, 0.0467375, 0.004725, 0.002025, 0.0467375,
          -0.002225}},
        {{0.1, -0.2, 0.2, 0.1},
         {0.018325, -0.040025, -0.014725, 0.0038, -0.040025, 0.0052375,
          -0.008137500000000001, 0.0021, -0.014725, -0.008137500000000001, 0.0117375, 0.0469,
          0.0038, 0.0021, 0.0469, 0.000525},
         0.0008475784372798787,
         {0.0179125, -0.040025, -0.014725, 0.0038, -0.040025, 0.00565,
          -0.008137500000000001, 0.0021, -0.014725, -0.008137500000000001, 0.01215, 0.0469,
          0.0038, 0.0021, 0.0469, 0.0009375}},
        {{-0.1, -0.1, -0.2, -0.2},
         {0.0161125, -0.0407375, -0.01365, 0.00585, -0.0407375, 0.0074125, -0.00665, 0.00285,
          -0.01365, -0.00665, 0.0127, 0.0458, 0.00585, 0.00285, 0.0458, 0.0047},
         -0.008800627499123508,
         {0.0204625, -0.0407375, -0.01365, 0.00585, -0.0407375, 0.0030625, -0.00665, 0.00285,
          -0.01365, -0.00665, 0.00835, 0.0458, 0.00585, 0.00285, 0.0458, 0.00035}},
    }};
    return kProbes;
}

double conformal_probe_psi(const std::array<double, kMaxDim>& x) {
    return 0.2 * x[0] + 0.1 * x[1] - 0.15 * x[2] + 0.05 * x[3] +
           0.05 * (x[0] * x[1] - x[2] * x[3]);
}

GridPtr conformal_probe_grid(int n, double h) {
    const double x0 = -0.5 * h * (n - 1);
    return Grid::lorentzian(4, {n, n, n, n}, {h, h, h, h}, {x0, x0, x0, x0});
}

MatrixField conformal_probe_metric(GridPtr g) {
    MatrixField m = make_matrix(g, Symmetry::symmetric);
    std::array<double, kMaxDim> x{};
    for (std::size_t p = 0; p < g->point_count(); ++p) {
        g->point_coords(p, x);
        const double r = std::exp(conformal_probe_psi(x));
        for (int i = 0; i < 4; ++i)
            m.at(p, i, i) = static_cast<double>(g->signature(i)) * r;
    }
    return m;
}

std::size_t conformal_probe_point(const Grid& g, const std::array<double, 4>& coords) {
    std::array<int, kMaxDim> idx{};
    for (int a = 0; a < 4; ++a) {
        const double t = (coords[static_cast<std::size_t>(a)] - g.origin(a)) / g.spacing(a);
        idx[static_cast<std::size_t>(a)] = static_cast<int>(std::lround(t));
    }
    return g.ravel(idx);
}

ProbeScales conformal_probe_scales() {
    ProbeScales s;
    for (const CurvatureProbe& probe : conformal_probes()) {
        for (double v : probe.ricci) s.ricci = std::max(s.ricci, std::fabs(v));
        s.scalar = std::max(s.scalar, std::fabs(probe.scalar));
        for (double v : probe.einstein) s.einstein = std::max(s.einstein, std::fabs(v));
    }
    return s;
}

double conformal_probe_deviation(const CurvatureStack& st, const Grid& g) {
    const ProbeScales scales = conformal_probe_scales();
    double worst = 0.0;
    for (const CurvatureProbe& probe : conformal_probes()) {
        const std::size_t p = conformal_probe_point(g, probe.x);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                const std::size_t k = static_cast<std::size_t>(i * 4 + j);
                worst = std::max(worst,
                                 std::fabs(st.ricci.at(p, i, j) - probe.ricci[k]) / scales.ricci);
                worst = std::max(
                    worst, std::fabs(st.einstein.at(p, i, j) - probe.einstein[k]) /
                               scales.einstein);
            }
        worst = std::max(worst, std::fabs(st.scalar.values[p] - probe.scalar) / scales.scalar);
    }
    return worst;
}

}  // namespace madelung
