#pragma once

// Expectation values, beat spectra, and dimension relations of the well carpet.

#include <cstdint>
#include <span>
#include <vector>

#include "qcarpet/fracdim.hpp"
#include "qcarpet/wavefield.hpp"

namespace qcarpet::observables {

enum class SeriesKind { MeanPosition, MeanVelocity, FixedXDensity, FixedTDensity };

const char* to_string(SeriesKind k);

struct ObservableSeries {
  std::vector<double> ts;
  std::vector<double> values;
  SeriesKind kind = SeriesKind::MeanPosition;
};

struct SpectrumPeaks {
  std::vector<double> frequencies;  // ascending
  std::vector<double> magnitudes;
};

// Mean position -----------------------------------------------------------------

/// Smallest K with q^{K(s-1)} / (q^{2K} - 1)^2 below `tolerance`.
int required_cutoff(int q, double s, double tolerance = 1e-14);

/// <x>(t) = pi/2 - (16 (1 - q^{2(s-2)}) / pi) sum_{k=1}^{K} q^{k(s-1)} cos((q^{2k}-1) t) / (q^{2k}-1)^2
/// for even q, and the constant pi/2 for odd q. Throws NumericalError(Cutoff)
/// when the K-th tail term is not below 1e-14.
ObservableSeries mean_position_series(const wavefield::SuperpositionSpec& spec, int K,
                                      std::span<const double> ts);

/// Term-wise time derivative of mean_position_series; identically 0 for odd q.
ObservableSeries mean_velocity_series(const wavefield::SuperpositionSpec& spec, int K,
                                      std::span<const double> ts);

/// int_0^pi x P(x, t) dx for the truncated well by composite Simpson over
/// `intervals` (rounded up to even; 0 picks 16 q^M).
double mean_position_quadrature(const wavefield::SuperpositionSpec& spec, double t,
                                std::size_t intervals = 0, unsigned threads = 1);

/// 2 Im int_0^pi conj(Psi) dPsi/dx dx: the mean velocity <p>/m with 2m = 1.
double mean_velocity_quadrature(const wavefield::SuperpositionSpec& spec, double t,
                                std::size_t intervals = 0, unsigned threads = 1);

struct EhrenfestResult {
  double lhs;  // d<x>/dt by a centred five-point difference of the quadrature
  double rhs;  // <p>/m
  double dt;
};

EhrenfestResult ehrenfest_check(const wavefield::SuperpositionSpec& spec, double t,
                                double dt = 1e-4);

// Spectra -------------------------------------------------------------------------

struct FrequencyCluster {
  int m;
  int k;
  std::int64_t omega;    // q^{2m} - q^{2(m-k)}
  double log_deviation;  // ln omega - (m ln q^2 - q^{-2k})
};

/// All beat frequencies q^{2m} - q^{2(m-k)} with 1 <= k <= min(m, k_max) and
/// m <= m_max, ordered by (m, k).
std::vector<FrequencyCluster> frequency_clusters(int q, int m_max, int k_max);

/// The distinct cluster frequencies in ascending order, unit magnitudes.
SpectrumPeaks cluster_peaks(std::span<const FrequencyCluster> clusters);

/// DFT magnitude of a fixed-x density series covering a whole number of
/// periods. A trailing sample at exactly t_0 + cycles * period is dropped.
/// Bins within `rel_threshold` of the largest magnitude are returned;
/// magnitudes are |X_j| / n. Throws NumericalError(Nyquist) when
/// max_frequency is not below pi / dt and ValidationError when the span is
/// not a whole number of periods.
SpectrumPeaks spectrum_of_cut(const ObservableSeries& series, double period, double max_frequency,
                              double rel_threshold = 1e-6);

// Dimension relations -------------------------------------------------------------

struct PredictedDimensions {
  double space;     // max(s, 1)
  double time;      // 1 + s/2
  double velocity;  // max((1 + s)/2, 1)
  double surface;   // 2 + s/2
};

PredictedDimensions predicted_dimensions(double s);

struct RelationReport {
  double sum_residual;    // |D_t + D_v - D_x - 3/2|
  double sum_sigma;
  double ratio_residual;  // |D_t - 1 - D_x / 2|
  double ratio_sigma;
  bool within(double tolerance) const {
    return sum_residual <= tolerance && ratio_residual <= tolerance;
  }
};

RelationReport dimension_relation_report(const fracdim::DimensionEstimate& dx,
                                         const fracdim::DimensionEstimate& dt,
                                         const fracdim::DimensionEstimate& dv);

}  // namespace qcarpet::observables
