#pragma once

// Strain of adapted frames along space curves and across bent plates, with
// the linear couple-stress laws that pair with them. Curves are resampled to
// uniform arc length through a natural cubic spline; frames come either from
// the curve itself (tangent / principal normal / binormal) or are supplied
// and validated. The three strain rates are extracted with the sign
// convention
//     kappa  = -<e1', e2>,   lambda = +<e1', e3>,   tau = -<e3', e2>,
// and the assembled rate matrix <ei', ej> is verified antisymmetric with a
// zero diagonal at stencil order (primes are arc-length derivatives).

#include <array>
#include <cstdint>
#include <vector>

#include "madelung/grid.hpp"

namespace madelung {

using Vec3 = std::array<double, 3>;
/// Row-major 3x3: rows are the frame legs e1, e2, e3.
using Mat3 = std::array<double, 9>;

struct SampledCurve {
    std::vector<Vec3> points;
    std::vector<double> params;  ///< strictly increasing; arc length after resampling
};

/// Validating factory: at least 7 samples, strictly increasing parameters,
/// consecutive points distinct. An empty `params` means index parameterization.
SampledCurve make_sampled_curve(std::vector<Vec3> points, std::vector<double> params = {});

/// Total arc length of the spline through the samples (5-point Gauss-Legendre
/// per interval).
double curve_length(const SampledCurve& c);

/// Resamples to n_out points uniformly spaced in arc length along the cubic
/// spline; the output parameters are 0, ds, ..., length.
SampledCurve arclength_resample(const SampledCurve& c, int n_out);

enum class FrameSource : std::uint8_t { frenet, supplied };

/// Orthonormal frame per sample. Endpoint samples (and any samples a
/// validation had to drop) are masked out; values there are zero.
struct AdaptedFrame {
    std::vector<Mat3> frames;
    std::vector<std::uint8_t> mask;
    FrameSource source = FrameSource::frenet;
};

/// Tangent / principal-normal / binormal frame from second differences of an
/// arc-length-parameterized curve, re-orthonormalized per sample. A run of
/// samples with bending below 1e-8 (straight segment) is a degeneracy: the
/// principal normal is undefined there and no choice is invented.
AdaptedFrame frenet_frame(const SampledCurve& c);

/// Wraps caller-supplied frames after validating orthonormality (1e-10) and
/// first-leg alignment with the curve tangent (1e-8) on interior samples.
AdaptedFrame make_adapted_frame(const SampledCurve& c, std::vector<Mat3> frames);

struct StrainRates {
    std::vector<double> kappa;
    std::vector<double> lambda;
    std::vector<double> tau;
    std::vector<std::uint8_t> mask;
};

/// Extracts (kappa, lambda, tau) by central differences of the frame legs at
/// uniform spacing ds, then verifies that the full rate matrix <ei', ej> is
/// antisymmetric with zero diagonal at stencil order.
StrainRates strain_rates(const AdaptedFrame& f, double ds);

/// The so(3) matrix m with ei' = sum_j m_ij ej implied by the three rates;
/// antisymmetric exactly by construction.
Mat3 rate_matrix(double kappa, double lambda, double tau);

/// Symmetric positive-semidefinite 3x3 stiffness; both properties enforced
/// by the factory.
struct StiffnessMatrix {
    Mat3 a{};
};

StiffnessMatrix make_stiffness(const Mat3& entries);

/// Couple stress M = A * (kappa, lambda, tau) per sample; masked samples
/// produce zero.
std::vector<Vec3> wire_couple_stress(const StrainRates& sr, const StiffnessMatrix& a);

/// Trapezoid pairing sum_i M_i * delta_i ds over consecutive valid samples.
double virtual_work(const std::vector<Vec3>& m, const StrainRates& delta_rates, double ds);

/// Plate bending couple stress from the deflection z on a 2-D grid:
///   K      = A z_xx + c z_yy + b z_xy
///   Lambda = c z_xx + B z_yy + a z_xy
///   Pi     = (b z_xx + a z_yy + C z_xy) / 2
struct PlateCoefficients {
    double A = 0.0, B = 0.0, C = 0.0;
    double a = 0.0, b = 0.0, c = 0.0;
};

struct PlateCoupleStress {
    ScalarField K;
    ScalarField Lambda;
    ScalarField Pi;
};

PlateCoupleStress plate_couple_stress(const ScalarField& z, const PlateCoefficients& coeffs);

}  // namespace madelung
