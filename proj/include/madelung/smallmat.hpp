#pragma once

// Stack-allocated dense matrix helpers for the pointwise 1x1..4x4 work
// (metric inverses, polar decomposition). Runtime dimension, no allocation.

#include <array>
#include <cmath>
#include <cstddef>

#include "madelung/error.hpp"

namespace madelung::smallmat {

constexpr int kMaxDim = 4;
using Mat = std::array<double, kMaxDim * kMaxDim>;  // row-major, top-left dim x dim block used

inline double& at(Mat& m, int dim, int i, int j) { return m[static_cast<std::size_t>(i * dim + j)]; }
inline double at(const Mat& m, int dim, int i, int j) { return m[static_cast<std::size_t>(i * dim + j)]; }

inline Mat identity(int dim) {
    Mat m{};
    for (int i = 0; i < dim; ++i) at(m, dim, i, i) = 1.0;
    return m;
}

inline Mat mul(const Mat& a, const Mat& b, int dim) {
    Mat out{};
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const double aik = at(a, dim, i, k);
            for (int j = 0; j < dim; ++j) at(out, dim, i, j) += aik * at(b, dim, k, j);
        }
    return out;
}

inline Mat transpose(const Mat& a, int dim) {
    Mat out{};
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) at(out, dim, i, j) = at(a, dim, j, i);
    return out;
}

inline double frobenius(const Mat& a, int dim) {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) s += at(a, dim, i, j) * at(a, dim, i, j);
    return std::sqrt(s);
}

inline double determinant(Mat a, int dim) {
    // Gaussian elimination with partial pivoting; dim <= 4 so this is cheap.
    double det = 1.0;
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::fabs(at(a, dim, r, col)) > std::fabs(at(a, dim, pivot, col))) pivot = r;
        if (pivot != col) {
            for (int j = 0; j < dim; ++j) std::swap(at(a, dim, col, j), at(a, dim, pivot, j));
            det = -det;
        }
        const double p = at(a, dim, col, col);
        if (p == 0.0) return 0.0;
        det *= p;
        for (int r = col + 1; r < dim; ++r) {
            const double f = at(a, dim, r, col) / p;
            for (int j = col; j < dim; ++j) at(a, dim, r, j) -= f * at(a, dim, col, j);
        }
    }
    return det;
}

/// Gauss-Jordan inverse with partial pivoting. Throws on a pivot below
/// `singular_tol` (callers pass their documented determinant floor).
inline Mat inverse(Mat a, int dim, double singular_tol = 1e-300) {
    Mat inv = identity(dim);
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int r = col + 1; r < dim; ++r)
            if (std::fabs(at(a, dim, r, col)) > std::fabs(at(a, dim, pivot, col))) pivot = r;
        if (std::fabs(at(a, dim, pivot, col)) <= singular_tol)
            fail(ErrorKind::degeneracy, "singular matrix in pointwise inverse");
        if (pivot != col)
            for (int j = 0; j < dim; ++j) {
                std::swap(at(a, dim, col, j), at(a, dim, pivot, j));
                std::swap(at(inv, dim, col, j), at(inv, dim, pivot, j));
            }
        const double p = at(a, dim, col, col);
        for (int j = 0; j < dim; ++j) {
            at(a, dim, col, j) /= p;
            at(inv, dim, col, j) /= p;
        }
        for (int r = 0; r < dim; ++r) {
            if (r == col) continue;
            const double f = at(a, dim, r, col);
            if (f == 0.0) continue;
            for (int j = 0; j < dim; ++j) {
                at(a, dim, r, j) -= f * at(a, dim, col, j);
                at(inv, dim, r, j) -= f * at(inv, dim, col, j);
            }
        }
    }
    return inv;
}

/// Symmetric square root of an SPD matrix by the Denman-Beavers iteration:
/// Y -> (Y + Z^-1)/2, Z -> (Z + Y^-1)/2 drives Y to sqrt(C) and Z to
/// sqrt(C)^-1. Iterated until the step shrinks below `tol` (relative).
struct SqrtPair {
    Mat root;      // sqrt(C)
    Mat root_inv;  // sqrt(C)^-1
    int iterations = 0;
};

inline SqrtPair spd_sqrt(const Mat& c, int dim, double tol = 1e-12, int max_iter = 60) {
    SqrtPair out{c, identity(dim), 0};
    const double scale = frobenius(c, dim);
    for (int it = 0; it < max_iter; ++it) {
        const Mat yinv = inverse(out.root, dim);
        const Mat zinv = inverse(out.root_inv, dim);
        Mat ynew{}, znew{};
        double step = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const double yv = 0.5 * (at(out.root, dim, i, j) + at(zinv, dim, i, j));
                const double zv = 0.5 * (at(out.root_inv, dim, i, j) + at(yinv, dim, i, j));
                step = std::max(step, std::fabs(yv - at(out.root, dim, i, j)));
                at(ynew, dim, i, j) = yv;
                at(znew, dim, i, j) = zv;
            }
        out.root = ynew;
        out.root_inv = znew;
        out.iterations = it + 1;
        if (step <= tol * (scale > 0.0 ? scale : 1.0)) return out;
    }
    fail(ErrorKind::internal_consistency, "matrix square root iteration did not converge");
}

}  // namespace madelung::smallmat
