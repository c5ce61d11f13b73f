#include "madelung/calculus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "madelung/parallel.hpp"

namespace madelung {

namespace {

// Central first difference of f along axis a at point p (caller guarantees
// the footprint is valid).
inline double d1(const std::vector<double>& v, std::size_t p, std::size_t stride, double inv2h) {
    return (v[p + stride] - v[p - stride]) * inv2h;
}

}  // namespace

CovectorField gradient(const ScalarField& f) {
    auto out = make_covector(f.grid);
    out.mask = erode(*f.grid, f.mask, 1);
    require_valid_points(out.mask, "gradient");
    const int d = f.grid->dim();
    std::array<double, kMaxDim> inv2h{};
    std::array<std::size_t, kMaxDim> stride{};
    for (int a = 0; a < d; ++a) {
        inv2h[static_cast<std::size_t>(a)] = 0.5 / f.grid->spacing(a);
        stride[static_cast<std::size_t>(a)] = f.grid->stride(a);
    }
    parallel_for(f.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int a = 0; a < d; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                out.at(p, a) = d1(f.values, p, stride[ua], inv2h[ua]);
            }
        }
    });
    return out;
}

MatrixField hessian(const ScalarField& f, double* asymmetry) {
    auto out = make_matrix(f.grid, Symmetry::symmetric);
    out.mask = erode(*f.grid, f.mask, 2);
    require_valid_points(out.mask, "hessian");
    const int d = f.grid->dim();
    const auto& v = f.values;

    std::atomic<double> worst{0.0};
    parallel_for(f.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        double local_worst = 0.0;
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int a = 0; a < d; ++a) {
                const std::size_t sa = f.grid->stride(a);
                const double ha = f.grid->spacing(a);
                out.at(p, a, a) = (v[p + sa] - 2.0 * v[p] + v[p - sa]) / (ha * ha);
                for (int b = a + 1; b < d; ++b) {
                    const std::size_t sb = f.grid->stride(b);
                    const double inv4 = 1.0 / (4.0 * ha * f.grid->spacing(b));
                    const double A = v[p + sa + sb];
                    const double B = v[p + sa - sb];
                    const double C = v[p - sa + sb];
                    const double D = v[p - sa - sb];
                    // Nested central differences in both orders; they commute
                    // algebraically, so the spread is pure rounding.
                    const double n_ab = ((A - B) - (C - D)) * inv4;
                    const double n_ba = ((A - C) - (B - D)) * inv4;
                    const double avg = 0.5 * (n_ab + n_ba);
                    local_worst = std::max(local_worst, std::fabs(n_ab - n_ba));
                    out.at(p, a, b) = avg;
                    out.at(p, b, a) = avg;
                }
            }
        }
        double prev = worst.load();
        while (local_worst > prev && !worst.compare_exchange_weak(prev, local_worst)) {
        }
    });
    if (asymmetry) *asymmetry = worst.load();
    return out;
}

ScalarField laplacian(const ScalarField& f) {
    auto out = make_scalar(f.grid);
    out.mask = erode(*f.grid, f.mask, 2);
    require_valid_points(out.mask, "laplacian");
    const auto& axes = f.grid->derivative_axes();
    const auto& v = f.values;
    parallel_for(f.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            double acc = 0.0;
            for (int a : axes) {
                const std::size_t sa = f.grid->stride(a);
                const double ha = f.grid->spacing(a);
                acc += f.grid->derivative_weight(a) * (v[p + sa] - 2.0 * v[p] + v[p - sa]) / (ha * ha);
            }
            out[p] = acc;
        }
    });
    return out;
}

MatrixField jacobian(const CovectorField& a) {
    auto out = make_matrix(a.grid, Symmetry::none);
    out.mask = erode(*a.grid, a.mask, 1);
    require_valid_points(out.mask, "jacobian");
    const int d = a.grid->dim();
    parallel_for(a.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int k = 0; k < d; ++k) {
                const std::size_t sk = a.grid->stride(k);
                const double inv2h = 0.5 / a.grid->spacing(k);
                for (int j = 0; j < d; ++j)
                    out.at(p, j, k) = (a.at(p + sk, j) - a.at(p - sk, j)) * inv2h;
            }
        }
    });
    return out;
}

MatrixField exterior_derivative(const CovectorField& a) {
    auto out = make_matrix(a.grid, Symmetry::antisymmetric);
    out.mask = erode(*a.grid, a.mask, 1);
    require_valid_points(out.mask, "exterior_derivative");
    const int d = a.grid->dim();
    parallel_for(a.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int i = 0; i < d; ++i) {
                const std::size_t si = a.grid->stride(i);
                const double inv2hi = 0.5 / a.grid->spacing(i);
                for (int j = i + 1; j < d; ++j) {
                    const std::size_t sj = a.grid->stride(j);
                    const double inv2hj = 0.5 / a.grid->spacing(j);
                    const double dij = (a.at(p + si, j) - a.at(p - si, j)) * inv2hi;
                    const double dji = (a.at(p + sj, i) - a.at(p - sj, i)) * inv2hj;
                    out.at(p, i, j) = dij - dji;
                    out.at(p, j, i) = dji - dij;
                }
            }
        }
    });
    return out;
}

ThreeIndexField grad_matrix(const MatrixField& m) {
    auto out = make_three_index(m.grid);
    out.mask = erode(*m.grid, m.mask, 1);
    require_valid_points(out.mask, "grad_matrix");
    const int d = m.grid->dim();
    parallel_for(m.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int k = 0; k < d; ++k) {
                const std::size_t sk = m.grid->stride(k);
                const double inv2h = 0.5 / m.grid->spacing(k);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        out.at(p, i, j, k) = (m.at(p + sk, i, j) - m.at(p - sk, i, j)) * inv2h;
            }
        }
    });
    return out;
}

FourIndexField grad_three(const ThreeIndexField& t) {
    auto out = make_four_index(t.grid);
    out.mask = erode(*t.grid, t.mask, 1);
    require_valid_points(out.mask, "grad_three");
    const int d = t.grid->dim();
    parallel_for(t.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int l = 0; l < d; ++l) {
                const std::size_t sl = t.grid->stride(l);
                const double inv2h = 0.5 / t.grid->spacing(l);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        for (int k = 0; k < d; ++k)
                            out.at(p, i, j, k, l) = (t.at(p + sl, i, j, k) - t.at(p - sl, i, j, k)) * inv2h;
            }
        }
    });
    return out;
}

CovectorField tensor_divergence(const MatrixField& m, ContractIndex index) {
    auto out = make_covector(m.grid);
    out.mask = erode(*m.grid, m.mask, 1);
    require_valid_points(out.mask, "tensor_divergence");
    const int d = m.grid->dim();
    const auto& axes = m.grid->derivative_axes();
    parallel_for(m.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            for (int i = 0; i < d; ++i) {
                double acc = 0.0;
                for (int j : axes) {
                    const std::size_t sj = m.grid->stride(j);
                    const double inv2h = 0.5 / m.grid->spacing(j);
                    const double hi = index == ContractIndex::second ? m.at(p + sj, i, j) : m.at(p + sj, j, i);
                    const double lo = index == ContractIndex::second ? m.at(p - sj, i, j) : m.at(p - sj, j, i);
                    acc += m.grid->derivative_weight(j) * (hi - lo) * inv2h;
                }
                out.at(p, i) = acc;
            }
        }
    });
    return out;
}

ScalarField covector_divergence(const CovectorField& a) {
    auto out = make_scalar(a.grid);
    out.mask = erode(*a.grid, a.mask, 1);
    require_valid_points(out.mask, "covector_divergence");
    const auto& axes = a.grid->derivative_axes();
    parallel_for(a.grid->point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            if (!out.mask[p]) continue;
            double acc = 0.0;
            for (int k : axes) {
                const std::size_t sk = a.grid->stride(k);
                const double inv2h = 0.5 / a.grid->spacing(k);
                acc += a.grid->derivative_weight(k) * (a.at(p + sk, k) - a.at(p - sk, k)) * inv2h;
            }
            out[p] = acc;
        }
    });
    return out;
}

void require_route_agreement(double gap_sup, double constituent_scale, double h,
                             const char* what) {
    const double scale = std::max(constituent_scale, 1e-300);
    if (gap_sup / scale > 10.0 * h * h) {
        fail(ErrorKind::internal_consistency,
             std::string(what) + ": discretization routes disagree (gap " +
                 std::to_string(gap_sup) + ", scale " + std::to_string(scale) + ")");
    }
}

}  // namespace madelung
