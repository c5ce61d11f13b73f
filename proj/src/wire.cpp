#include "madelung/wire.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "madelung/calculus.hpp"
#include "madelung/error.hpp"

namespace madelung {
namespace {

constexpr std::size_t kMinSamples = 7;

double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

Vec3 cross3(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 scaled(const Vec3& a, double s) { return {a[0] * s, a[1] * s, a[2] * s}; }

Vec3 diff3(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

/// Natural cubic spline through the curve samples, one polynomial strand per
/// coordinate, plus arc-length bookkeeping (5-point Gauss-Legendre).
class CurveSpline {
  public:
    explicit CurveSpline(const SampledCurve& c) : t_(c.params), y_(c.points) {
        const std::size_t n = t_.size();
        m_.assign(n, Vec3{0.0, 0.0, 0.0});
        // Thomas solve of the natural-spline tridiagonal system with a
        // vector-valued right-hand side.
        std::vector<double> diag(n, 2.0), upper(n, 0.0);
        std::vector<Vec3> rhs(n, Vec3{0.0, 0.0, 0.0});
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1];
            const double h1 = t_[i + 1] - t_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            for (int k = 0; k < 3; ++k)
                rhs[i][static_cast<std::size_t>(k)] =
                    6.0 * ((y_[i + 1][static_cast<std::size_t>(k)] - y_[i][static_cast<std::size_t>(k)]) / h1 -
                           (y_[i][static_cast<std::size_t>(k)] - y_[i - 1][static_cast<std::size_t>(k)]) / h0);
        }
        // Forward elimination (lower entry of row i is h0 = t_i - t_{i-1}).
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double h0 = t_[i] - t_[i - 1];
            const double f = h0 / diag[i - 1];
            diag[i] -= f * upper[i - 1];
            for (int k = 0; k < 3; ++k)
                rhs[i][static_cast<std::size_t>(k)] -= f * rhs[i - 1][static_cast<std::size_t>(k)];
        }
        for (std::size_t ii = n - 2; ii >= 1; --ii) {
            Vec3 v = rhs[ii];
            if (ii + 2 < n)
                for (int k = 0; k < 3; ++k)
                    v[static_cast<std::size_t>(k)] -= upper[ii] * m_[ii + 1][static_cast<std::size_t>(k)];
            m_[ii] = scaled(v, 1.0 / diag[ii]);
            if (ii == 1) break;
        }

        // Cumulative arc length at the knots.
        cumulative_.assign(n, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i)
            cumulative_[i + 1] = cumulative_[i] + segment_length(i, t_[i], t_[i + 1]);
    }

    double total_length() const { return cumulative_.back(); }

    Vec3 position(std::size_t seg, double t) const {
        const double h = t_[seg + 1] - t_[seg];
        const double a = (t_[seg + 1] - t) / h;
        const double b = (t - t_[seg]) / h;
        Vec3 out{};
        for (int k = 0; k < 3; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            out[uk] = a * y_[seg][uk] + b * y_[seg + 1][uk] +
                      ((a * a * a - a) * m_[seg][uk] + (b * b * b - b) * m_[seg + 1][uk]) * h * h / 6.0;
        }
        return out;
    }

    Vec3 velocity(std::size_t seg, double t) const {
        const double h = t_[seg + 1] - t_[seg];
        const double a = (t_[seg + 1] - t) / h;
        const double b = (t - t_[seg]) / h;
        Vec3 out{};
        for (int k = 0; k < 3; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            out[uk] = (y_[seg + 1][uk] - y_[seg][uk]) / h +
                      (-(3.0 * a * a - 1.0) * m_[seg][uk] + (3.0 * b * b - 1.0) * m_[seg + 1][uk]) * h / 6.0;
        }
        return out;
    }

    double speed(std::size_t seg, double t) const { return norm3(velocity(seg, t)); }

    /// Arc length of [lo, hi] inside segment `seg`.
    double segment_length(std::size_t seg, double lo, double hi) const {
        static constexpr double kNode[5] = {-0.906179845938664, -0.5384693101056831, 0.0,
                                            0.5384693101056831, 0.906179845938664};
        static constexpr double kWeight[5] = {0.23692688505618908, 0.47862867049936647,
                                              0.5688888888888889, 0.47862867049936647,
                                              0.23692688505618908};
        const double mid = 0.5 * (lo + hi);
        const double half = 0.5 * (hi - lo);
        double sum = 0.0;
        for (int q = 0; q < 5; ++q) sum += kWeight[q] * speed(seg, mid + half * kNode[q]);
        return sum * half;
    }

    /// Parameter value at arc length `target` from the curve start
    /// (safeguarded Newton inside the bracketing knot interval).
    std::pair<std::size_t, double> at_arclength(double target) const {
        const std::size_t n = t_.size();
        if (target <= 0.0) return {0, t_.front()};
        if (target >= cumulative_.back()) return {n - 2, t_.back()};
        const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
        const std::size_t seg = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
        double lo = t_[seg], hi = t_[seg + 1];
        const double want = target - cumulative_[seg];
        double u = lo + (hi - lo) * (want / (cumulative_[seg + 1] - cumulative_[seg]));
        const double tol = 1e-13 * std::max(1.0, cumulative_.back());
        for (int iter = 0; iter < 80; ++iter) {
            const double g = segment_length(seg, t_[seg], u) - want;
            if (std::fabs(g) <= tol) break;
            if (g > 0.0) hi = u; else lo = u;
            const double v = speed(seg, u);
            double next = (v > 1e-14) ? u - g / v : 0.5 * (lo + hi);
            if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
            u = next;
        }
        return {seg, u};
    }

  private:
    std::vector<double> t_;
    std::vector<Vec3> y_;
    std::vector<Vec3> m_;
    std::vector<double> cumulative_;
};

void require_uniform(const std::vector<double>& params, const char* op) {
    const double ds = params[1] - params[0];
    for (std::size_t i = 1; i + 1 < params.size(); ++i)
        if (std::fabs((params[i + 1] - params[i]) - ds) > 1e-9 * std::max(1.0, std::fabs(ds)))
            fail(ErrorKind::config, std::string(op) + ": needs uniform arc-length sampling");
}

Vec3 frame_row(const Mat3& f, int r) {
    return {f[static_cast<std::size_t>(3 * r)], f[static_cast<std::size_t>(3 * r + 1)],
            f[static_cast<std::size_t>(3 * r + 2)]};
}

void set_row(Mat3& f, int r, const Vec3& v) {
    f[static_cast<std::size_t>(3 * r)] = v[0];
    f[static_cast<std::size_t>(3 * r + 1)] = v[1];
    f[static_cast<std::size_t>(3 * r + 2)] = v[2];
}

/// Central-difference unit tangent at interior sample i.
Vec3 discrete_tangent(const SampledCurve& c, std::size_t i) {
    const double ds = c.params[i + 1] - c.params[i - 1];
    Vec3 v = scaled(diff3(c.points[i + 1], c.points[i - 1]), 1.0 / ds);
    const double len = norm3(v);
    if (len < 0.5)
        fail(ErrorKind::degeneracy, "adapted frame: tangent collapsed at sample " + std::to_string(i));
    return scaled(v, 1.0 / len);
}

}  // namespace

SampledCurve make_sampled_curve(std::vector<Vec3> points, std::vector<double> params) {
    if (points.size() < kMinSamples)
        fail(ErrorKind::constraint, "sampled curve: needs at least 7 samples");
    if (params.empty()) {
        params.resize(points.size());
        for (std::size_t i = 0; i < params.size(); ++i) params[i] = static_cast<double>(i);
    }
    if (params.size() != points.size())
        fail(ErrorKind::config, "sampled curve: parameter count does not match point count");
    for (std::size_t i = 0; i + 1 < params.size(); ++i) {
        if (!(params[i + 1] > params[i]))
            fail(ErrorKind::constraint, "sampled curve: parameters must increase strictly");
        if (norm3(diff3(points[i + 1], points[i])) == 0.0)
            fail(ErrorKind::constraint, "sampled curve: consecutive points coincide");
    }
    SampledCurve c;
    c.points = std::move(points);
    c.params = std::move(params);
    return c;
}

double curve_length(const SampledCurve& c) { return CurveSpline(c).total_length(); }

SampledCurve arclength_resample(const SampledCurve& c, int n_out) {
    if (n_out < static_cast<int>(kMinSamples))
        fail(ErrorKind::config, "resample: needs at least 7 output samples");
    const CurveSpline spline(c);
    const double length = spline.total_length();
    const double ds = length / (n_out - 1);

    std::vector<Vec3> points;
    std::vector<double> params;
    points.reserve(static_cast<std::size_t>(n_out));
    params.reserve(static_cast<std::size_t>(n_out));
    for (int k = 0; k < n_out; ++k) {
        const double s = (k == n_out - 1) ? length : ds * k;
        const auto [seg, u] = spline.at_arclength(s);
        points.push_back(spline.position(seg, u));
        params.push_back(s);
    }
    return make_sampled_curve(std::move(points), std::move(params));
}

AdaptedFrame frenet_frame(const SampledCurve& c) {
    require_uniform(c.params, "frame construction");
    const std::size_t n = c.points.size();
    const double ds = c.params[1] - c.params[0];

    AdaptedFrame f;
    f.frames.assign(n, Mat3{});
    f.mask.assign(n, 0);
    f.source = FrameSource::frenet;

    std::size_t degenerate_first = 0, degenerate_last = 0;
    std::size_t degenerate_count = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Vec3 e1 = discrete_tangent(c, i);
        Vec3 acc{};
        for (int k = 0; k < 3; ++k) {
            const auto uk = static_cast<std::size_t>(k);
            acc[uk] = (c.points[i + 1][uk] - 2.0 * c.points[i][uk] + c.points[i - 1][uk]) / (ds * ds);
        }
        Vec3 perp = diff3(acc, scaled(e1, dot3(acc, e1)));
        const double bend = norm3(perp);
        if (bend < 1e-8) {
            if (degenerate_count == 0) degenerate_first = i;
            degenerate_last = i;
            ++degenerate_count;
            continue;
        }
        const Vec3 e2 = scaled(perp, 1.0 / bend);
        const Vec3 e3 = cross3(e1, e2);
        set_row(f.frames[i], 0, e1);
        set_row(f.frames[i], 1, e2);
        set_row(f.frames[i], 2, e3);
        f.mask[i] = 1;
    }
    if (degenerate_count > 0)
        fail(ErrorKind::degeneracy,
             "frame construction: bending below 1e-8 (undefined normal) at samples " +
                 std::to_string(degenerate_first) + ".." + std::to_string(degenerate_last));
    return f;
}

AdaptedFrame make_adapted_frame(const SampledCurve& c, std::vector<Mat3> frames) {
    if (frames.size() != c.points.size())
        fail(ErrorKind::config, "adapted frame: frame count does not match sample count");
    const std::size_t n = frames.size();

    for (std::size_t i = 0; i < n; ++i) {
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
                const double want = (r == s) ? 1.0 : 0.0;
                if (std::fabs(dot3(frame_row(frames[i], r), frame_row(frames[i], s)) - want) > 1e-10)
                    fail(ErrorKind::constraint,
                         "adapted frame: frame is not orthonormal at sample " + std::to_string(i));
            }
    }

    AdaptedFrame f;
    f.frames = std::move(frames);
    f.mask.assign(n, 0);
    f.source = FrameSource::supplied;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const Vec3 tangent = discrete_tangent(c, i);
        if (norm3(diff3(frame_row(f.frames[i], 0), tangent)) > 1e-8)
            fail(ErrorKind::constraint,
                 "adapted frame: first leg is not the unit tangent at sample " + std::to_string(i));
        f.mask[i] = 1;
    }
    return f;
}

StrainRates strain_rates(const AdaptedFrame& f, double ds) {
    if (!(ds > 0.0)) fail(ErrorKind::constraint, "strain rates: spacing must be positive");
    const std::size_t n = f.frames.size();

    StrainRates sr;
    sr.kappa.assign(n, 0.0);
    sr.lambda.assign(n, 0.0);
    sr.tau.assign(n, 0.0);
    sr.mask.assign(n, 0);

    double gap = 0.0;
    double constituent = 0.0;
    std::size_t valid = 0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!f.mask[i - 1] || !f.mask[i] || !f.mask[i + 1]) continue;
        double w[3][3];
        for (int r = 0; r < 3; ++r) {
            const Vec3 rate = scaled(diff3(frame_row(f.frames[i + 1], r), frame_row(f.frames[i - 1], r)),
                                     1.0 / (2.0 * ds));
            for (int s = 0; s < 3; ++s) w[r][s] = dot3(rate, frame_row(f.frames[i], s));
        }
        sr.kappa[i] = -w[0][1];
        sr.lambda[i] = w[0][2];
        sr.tau[i] = -w[2][1];
        sr.mask[i] = 1;
        ++valid;
        for (int r = 0; r < 3; ++r) {
            gap = std::max(gap, std::fabs(w[r][r]));
            constituent = std::max(constituent, 1.0);  // unit frame legs set the scale
            for (int s = r + 1; s < 3; ++s) {
                gap = std::max(gap, std::fabs(w[r][s] + w[s][r]));
                constituent = std::max({constituent, std::fabs(w[r][s]), std::fabs(w[s][r])});
            }
        }
    }
    if (valid == 0) fail(ErrorKind::stencil_domain, "strain rates: no sample has both neighbors");
    require_route_agreement(gap, constituent, ds, "frame rate antisymmetry");
    return sr;
}

Mat3 rate_matrix(double kappa, double lambda, double tau) {
    return {0.0, -kappa, lambda, kappa, 0.0, tau, -lambda, -tau, 0.0};
}

StiffnessMatrix make_stiffness(const Mat3& entries) {
    double scale = 0.0;
    for (double v : entries) scale = std::max(scale, std::fabs(v));
    const double tol = 1e-12 * (1.0 + scale);
    auto at = [&](int i, int j) { return entries[static_cast<std::size_t>(3 * i + j)]; };
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (std::fabs(at(i, j) - at(j, i)) > tol)
                fail(ErrorKind::constraint, "stiffness matrix: not symmetric");

    // Positive-semidefinite iff every principal minor is nonnegative
    // (symmetric 3x3): the three diagonal entries, the three 2x2 principal
    // minors, and the determinant.
    for (int i = 0; i < 3; ++i)
        if (at(i, i) < -tol) fail(ErrorKind::constraint, "stiffness matrix: negative diagonal");
    const double tol2 = 1e-12 * (1.0 + scale) * (1.0 + scale);
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            if (at(i, i) * at(j, j) - at(i, j) * at(j, i) < -tol2)
                fail(ErrorKind::constraint, "stiffness matrix: indefinite 2x2 minor");
    const double det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                       at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                       at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
    if (det < -tol2 * (1.0 + scale))
        fail(ErrorKind::constraint, "stiffness matrix: negative determinant");

    StiffnessMatrix m;
    m.a = entries;
    return m;
}

std::vector<Vec3> wire_couple_stress(const StrainRates& sr, const StiffnessMatrix& a) {
    const std::size_t n = sr.kappa.size();
    std::vector<Vec3> out(n, Vec3{});
    for (std::size_t i = 0; i < n; ++i) {
        if (!sr.mask[i]) continue;
        const double r[3] = {sr.kappa[i], sr.lambda[i], sr.tau[i]};
        for (int row = 0; row < 3; ++row) {
            double sum = 0.0;
            for (int col = 0; col < 3; ++col)
                sum += a.a[static_cast<std::size_t>(3 * row + col)] * r[col];
            out[i][static_cast<std::size_t>(row)] = sum;
        }
    }
    return out;
}

double virtual_work(const std::vector<Vec3>& m, const StrainRates& delta_rates, double ds) {
    if (m.size() != delta_rates.kappa.size())
        fail(ErrorKind::config, "virtual work: couple stress and rate samples are not aligned");
    if (!(ds > 0.0)) fail(ErrorKind::constraint, "virtual work: spacing must be positive");

    auto integrand = [&](std::size_t i) {
        return m[i][0] * delta_rates.kappa[i] + m[i][1] * delta_rates.lambda[i] +
               m[i][2] * delta_rates.tau[i];
    };
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        if (!delta_rates.mask[i] || !delta_rates.mask[i + 1]) continue;
        sum += 0.5 * (integrand(i) + integrand(i + 1)) * ds;
    }
    return sum;
}

PlateCoupleStress plate_couple_stress(const ScalarField& z, const PlateCoefficients& coeffs) {
    if (!z.grid) fail(ErrorKind::config, "plate couple stress: missing grid");
    if (z.grid->dim() != 2 || z.grid->lorentzian() || z.grid->has_time_axis())
        fail(ErrorKind::config, "plate couple stress: needs a 2-D spatial grid");

    const MatrixField h = hessian(z);
    require_valid_points(h.mask, "plate couple stress");

    PlateCoupleStress out;
    out.K = make_scalar(z.grid);
    out.Lambda = make_scalar(z.grid);
    out.Pi = make_scalar(z.grid);
    out.K.mask = h.mask;
    out.Lambda.mask = h.mask;
    out.Pi.mask = h.mask;
    for (std::size_t p = 0; p < h.mask.size(); ++p) {
        if (!h.mask[p]) continue;
        const double zxx = h.at(p, 0, 0);
        const double zyy = h.at(p, 1, 1);
        const double zxy = h.at(p, 0, 1);
        out.K.values[p] = coeffs.A * zxx + coeffs.c * zyy + coeffs.b * zxy;
        out.Lambda.values[p] = coeffs.c * zxx + coeffs.B * zyy + coeffs.a * zxy;
        out.Pi.values[p] = 0.5 * (coeffs.b * zxx + coeffs.a * zyy + coeffs.C * zxy);
    }
    return out;
}

}  // namespace madelung
