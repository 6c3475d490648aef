#pragma once

// Box-counting and oscillation estimates of graph dimensions.
//
// Curves and surfaces are rescaled so every axis spans [0, 1] before any
// counting; eps and tau are therefore fractions of the full range.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qcarpet/wavefield.hpp"

namespace qcarpet::fracdim {

/// A graph y(x) sampled on a uniform ascending grid.
struct SampledCurve {
  std::vector<double> xs;
  std::vector<double> ys;

  /// Throws DomainError unless xs is uniform (relative 1e-12), ascending,
  /// the same length as ys (>= 2), and every value is finite.
  void validate() const;
  std::size_t size() const { return xs.size(); }
  /// Sample spacing after rescaling x to [0, 1].
  double unit_spacing() const { return 1.0 / static_cast<double>(xs.size() - 1); }
};

struct ScalePoint {
  double scale;  // eps or tau
  double value;  // box count or mean oscillation
};

struct ScalingBand {
  double lo;
  double hi;
};

struct DimensionEstimate {
  double dimension = 0.0;
  double holder_kappa = 0.0;
  double std_error = 0.0;
  double eps_min = 0.0;  // fitted band, in eps or tau
  double eps_max = 0.0;
  double r_squared = 0.0;
  int n_scales = 0;
  double raw_slope = 0.0;  // regression slope before clamping to the admissible range
};

enum class GraphKind { Curve, Surface };

// Weierstrass calibration -----------------------------------------------------

struct WeierstrassSpec {
  double a = 4.0;
  double b = 0.5;
  int n_terms = 16;

  /// a > 1 > b > 0 and a b >= 1.
  void validate() const;
};

/// sum_{n < n_terms} b^n sin(a^n x).
double weierstrass(const WeierstrassSpec& spec, double x);
/// 2 - |ln b / ln a|.
double weierstrass_dimension(const WeierstrassSpec& spec);

// Schedules -------------------------------------------------------------------

/// 2^-3, 2^-4, ... down to the last power of two >= 4 * unit_spacing.
std::vector<double> default_eps_schedule(double unit_spacing);

/// Fitting band for a sampled curve: [eps_min, 2^-3] with eps_min the
/// smallest power of two not below
///   clamp(max(64 dx, 4 lambda / span), 4 dx, 2^-7),
/// where dx is the unit spacing and lambda the shortest wavelength present
/// in the generator along this axis. Scales below the inner cutoff of a
/// truncated series carry no fractal information.
ScalingBand resolved_band(std::size_t samples, double span, double shortest_wavelength);

// Estimators ------------------------------------------------------------------

/// Number of eps-cells met by the polyline through the samples, for each eps.
/// Throws NumericalError(Resolution) if any eps < 2 * unit_spacing. Counts
/// that increase with eps are a logic error.
std::vector<ScalePoint> box_count_curve(const SampledCurve& curve, std::span<const double> eps,
                                        unsigned threads = 1);

/// Least-squares fit of log count against log(1/eps) over `band`, or over
/// the widest contiguous window with r^2 >= 0.995 (ties to higher r^2)
/// when no band is given. Throws NumericalError(NoScalingBand) when fewer
/// than 5 scales are usable.
DimensionEstimate fit_dimension(std::span<const ScalePoint> counts,
                                std::optional<ScalingBand> band = std::nullopt,
                                GraphKind kind = GraphKind::Curve);

/// Mean over non-overlapping windows of length tau of (max - min) of y.
std::vector<ScalePoint> oscillation_profile(const SampledCurve& curve,
                                            std::span<const double> tau);

/// Fits log oscillation against log tau; the slope is the Hoelder exponent
/// and the dimension is 2 - slope.
DimensionEstimate oscillation_dimension(const SampledCurve& curve, std::span<const double> tau,
                                        std::optional<ScalingBand> band = std::nullopt);

/// eps-cubes met by the bilinear interpolant of the field, for each eps.
std::vector<ScalePoint> box_count_surface_counts(const wavefield::CarpetField& field,
                                                 std::span<const double> eps,
                                                 unsigned threads = 1);

DimensionEstimate box_count_surface(const wavefield::CarpetField& field,
                                    std::span<const double> eps,
                                    std::optional<ScalingBand> band = std::nullopt,
                                    unsigned threads = 1);

}  // namespace qcarpet::fracdim
