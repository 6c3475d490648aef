#include "qcarpet/observables.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <string>

#include "qcarpet/errors.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet::observables {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailTolerance = 1e-14;
constexpr std::size_t kBlock = 4096;

using wavefield::Complex;
using wavefield::SuperpositionSpec;
using wavefield::System;

void require_well(const SuperpositionSpec& spec, const char* what) {
  if (spec.system != System::Well) {
    throw DomainError(std::string(what) + ": only defined for the well");
  }
  wavefield::validate(spec);
}

double log_tail(int q, double s, int K) {
  const double lq = std::log(static_cast<double>(q));
  // ln(q^{2K} - 1) = 2K ln q + ln(1 - q^{-2K})
  const double ld = 2.0 * K * lq + std::log1p(-std::pow(static_cast<double>(q), -2.0 * K));
  return K * (s - 1.0) * lq - 2.0 * ld;
}

void check_cutoff(int q, double s, int K) {
  if (K < 1) throw NumericalError(NumericalError::Kind::Cutoff, "series cutoff K must be >= 1");
  if (log_tail(q, s, K) >= std::log(kTailTolerance)) {
    throw NumericalError(NumericalError::Kind::Cutoff,
                         "series cutoff K = " + std::to_string(K) +
                             " leaves a tail term above 1e-14; need K >= " +
                             std::to_string(required_cutoff(q, s)));
  }
}

double velocity_prefactor(const SuperpositionSpec& spec) {
  return 16.0 * (1.0 - std::pow(static_cast<double>(spec.q), 2.0 * (spec.s - 2.0))) / kPi;
}

std::size_t simpson_intervals(const wavefield::Superposition& sup, std::size_t requested) {
  std::size_t n = requested;
  if (n == 0) {
    const auto kmax = static_cast<std::size_t>(sup.indices().back());
    n = std::max<std::size_t>(std::size_t{1} << 14, 16 * kmax);
  }
  return n + (n % 2);
}

// Composite Simpson over [0, pi] of f(x_i) with a fixed block reduction
// order, so the result is independent of the thread count.
template <typename Fn>
double simpson_well(std::size_t intervals, unsigned threads, Fn&& f) {
  const wavefield::UniformGrid g{0.0, kPi, intervals + 1};
  const std::size_t blocks = (intervals + 1 + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t blk = b; blk < e; ++blk) {
      double acc = 0.0;
      const std::size_t lo = blk * kBlock, hi = std::min(intervals + 1, lo + kBlock);
      for (std::size_t i = lo; i < hi; ++i) {
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * f(g.at(i));
      }
      partial[blk] = acc;
    }
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total * g.spacing() / 3.0;
}

}  // namespace

const char* to_string(SeriesKind k) {
  switch (k) {
    case SeriesKind::MeanPosition: return "mean-position";
    case SeriesKind::MeanVelocity: return "mean-velocity";
    case SeriesKind::FixedXDensity: return "fixed-x-density";
    case SeriesKind::FixedTDensity: return "fixed-t-density";
  }
  return "unknown";
}

int required_cutoff(int q, double s, double tolerance) {
  if (q < 2) throw ValidationError("q must be >= 2");
  for (int K = 1; K < 1000; ++K) {
    if (log_tail(q, s, K) < std::log(tolerance)) return K;
  }
  throw NumericalError(NumericalError::Kind::Cutoff, "no cutoff below 1000 meets the tail bound");
}

ObservableSeries mean_position_series(const SuperpositionSpec& spec, int K,
                                      std::span<const double> ts) {
  require_well(spec, "mean_position_series");
  ObservableSeries out;
  out.kind = SeriesKind::MeanPosition;
  out.ts.assign(ts.begin(), ts.end());
  out.values.assign(ts.size(), kPi / 2.0);
  if (spec.q % 2 == 1) return out;
  check_cutoff(spec.q, spec.s, K);
  const double pre = velocity_prefactor(spec);
  const double q = spec.q;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
      const double w = std::pow(q, 2.0 * k) - 1.0;
      sum += std::pow(q, k * (spec.s - 1.0)) * std::cos(w * ts[i]) / (w * w);
    }
    out.values[i] = kPi / 2.0 - pre * sum;
  }
  return out;
}

ObservableSeries mean_velocity_series(const SuperpositionSpec& spec, int K,
                                      std::span<const double> ts) {
  require_well(spec, "mean_velocity_series");
  ObservableSeries out;
  out.kind = SeriesKind::MeanVelocity;
  out.ts.assign(ts.begin(), ts.end());
  out.values.assign(ts.size(), 0.0);
  if (spec.q % 2 == 1) return out;
  check_cutoff(spec.q, spec.s, K);
  const double pre = velocity_prefactor(spec);
  const double q = spec.q;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double sum = 0.0;
    for (int k = 1; k <= K; ++k) {
      const double w = std::pow(q, 2.0 * k) - 1.0;
      sum += std::pow(q, k * (spec.s - 1.0)) * std::sin(w * ts[i]) / w;
    }
    out.values[i] = pre * sum;
  }
  return out;
}

double mean_position_quadrature(const SuperpositionSpec& spec, double t, std::size_t intervals,
                                unsigned threads) {
  require_well(spec, "mean_position_quadrature");
  const wavefield::Superposition sup(spec);
  const std::size_t K = sup.terms();
  std::vector<Complex> temporal(K);
  sup.temporal_factors(t, temporal);
  return simpson_well(simpson_intervals(sup, intervals), threads, [&](double x) {
    thread_local std::vector<double> spatial;
    spatial.resize(K);
    sup.spatial_factors(wavefield::Position(x), spatial);
    return x * std::norm(sup.combine(spatial, temporal));
  });
}

double mean_velocity_quadrature(const SuperpositionSpec& spec, double t, std::size_t intervals,
                                unsigned threads) {
  require_well(spec, "mean_velocity_quadrature");
  const wavefield::Superposition sup(spec);
  const std::size_t K = sup.terms();
  std::vector<Complex> temporal(K);
  sup.temporal_factors(t, temporal);
  const auto idx = sup.indices();
  const auto c = sup.coefficients();
  const double norm = sup.normalization();
  return simpson_well(simpson_intervals(sup, intervals), threads, [&](double x) {
    const wavefield::Position pos(x);
    Complex psi{}, dpsi{};
    for (std::size_t k = 0; k < K; ++k) {
      const double a = norm * c[k];
      psi += a * pos.sin_multiple(idx[k]) * temporal[k];
      dpsi += a * static_cast<double>(idx[k]) * pos.cos_multiple(idx[k]) * temporal[k];
    }
    return 2.0 * (std::conj(psi) * dpsi).imag();
  });
}

EhrenfestResult ehrenfest_check(const SuperpositionSpec& spec, double t, double dt) {
  require_well(spec, "ehrenfest_check");
  if (!(dt > 0.0)) throw DomainError("ehrenfest_check: dt must be positive");
  auto x = [&](double tt) { return mean_position_quadrature(spec, tt); };
  const double lhs = (-x(t + 2 * dt) + 8.0 * x(t + dt) - 8.0 * x(t - dt) + x(t - 2 * dt)) / (12.0 * dt);
  const double rhs = mean_velocity_quadrature(spec, t);
  return {lhs, rhs, dt};
}

std::vector<FrequencyCluster> frequency_clusters(int q, int m_max, int k_max) {
  if (q < 2) throw ValidationError("q must be >= 2");
  if (m_max < 1 || k_max < 1) throw ValidationError("m_max and k_max must be >= 1");
  const double q2 = static_cast<double>(q) * q;
  if (2.0 * m_max * std::log2(static_cast<double>(q)) > 62.0) {
    throw ValidationError("q^(2 m_max) must not exceed 2^62");
  }
  std::vector<std::int64_t> pow2(m_max + 1, 1);
  for (int m = 1; m <= m_max; ++m) pow2[m] = pow2[m - 1] * q * q;
  std::vector<FrequencyCluster> out;
  for (int m = 1; m <= m_max; ++m) {
    for (int k = 1; k <= std::min(m, k_max); ++k) {
      const std::int64_t w = pow2[m] - pow2[m - k];
      const double dev = std::log(static_cast<double>(w)) - (m * std::log(q2) - std::pow(q2, -k));
      out.push_back({m, k, w, dev});
    }
  }
  return out;
}

SpectrumPeaks cluster_peaks(std::span<const FrequencyCluster> clusters) {
  std::vector<std::int64_t> w;
  for (const auto& c : clusters) w.push_back(c.omega);
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  SpectrumPeaks out;
  for (auto v : w) {
    out.frequencies.push_back(static_cast<double>(v));
    out.magnitudes.push_back(1.0);
  }
  return out;
}

SpectrumPeaks spectrum_of_cut(const ObservableSeries& series, double period, double max_frequency,
                              double rel_threshold) {
  const std::size_t n_in = series.ts.size();
  if (n_in < 4 || series.values.size() != n_in) {
    throw ValidationError("spectrum_of_cut: need at least 4 samples with matching values");
  }
  if (!(period > 0.0)) throw ValidationError("spectrum_of_cut: period must be positive");
  const double dt = (series.ts.back() - series.ts.front()) / static_cast<double>(n_in - 1);
  std::size_t n = n_in;
  const double closed = (series.ts.back() - series.ts.front()) / period;
  const double open = dt * static_cast<double>(n_in) / period;
  auto whole = [](double c) { return c >= 0.5 && std::abs(c - std::round(c)) < 1e-9 * std::max(1.0, c); };
  if (whole(closed)) {
    n = n_in - 1;
  } else if (!whole(open)) {
    throw ValidationError("spectrum_of_cut: series must cover a whole number of periods");
  }
  if (!(max_frequency < kPi / dt)) {
    throw NumericalError(NumericalError::Kind::Nyquist,
                         "spectrum_of_cut: frequency " + std::to_string(max_frequency) +
                             " is not below the Nyquist limit " + std::to_string(kPi / dt));
  }
  const double span = dt * static_cast<double>(n);

  const std::size_t bins = n / 2 + 1;
  std::vector<double> in(series.values.begin(), series.values.begin() + static_cast<std::ptrdiff_t>(n));
  std::vector<std::complex<double>> out(bins);
  {
    static std::mutex planner;
    std::unique_lock lock(planner);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    lock.unlock();
    fftw_execute(plan);
    lock.lock();
    fftw_destroy_plan(plan);
  }
  std::vector<double> mag(bins);
  double peak = 0.0;
  for (std::size_t j = 0; j < bins; ++j) {
    mag[j] = std::abs(out[j]) / static_cast<double>(n);
    peak = std::max(peak, mag[j]);
  }
  SpectrumPeaks res;
  for (std::size_t j = 0; j < bins; ++j) {
    if (mag[j] >= rel_threshold * peak && mag[j] > 0.0) {
      res.frequencies.push_back(2.0 * kPi * static_cast<double>(j) / span);
      res.magnitudes.push_back(mag[j]);
    }
  }
  return res;
}

PredictedDimensions predicted_dimensions(double s) {
  return {std::max(s, 1.0), 1.0 + s / 2.0, std::max((1.0 + s) / 2.0, 1.0), 2.0 + s / 2.0};
}

RelationReport dimension_relation_report(const fracdim::DimensionEstimate& dx,
                                         const fracdim::DimensionEstimate& dt,
                                         const fracdim::DimensionEstimate& dv) {
  RelationReport r;
  r.sum_residual = std::abs(dt.dimension + dv.dimension - dx.dimension - 1.5);
  r.sum_sigma = std::sqrt(dt.std_error * dt.std_error + dv.std_error * dv.std_error +
                          dx.std_error * dx.std_error);
  r.ratio_residual = std::abs(dt.dimension - 1.0 - dx.dimension / 2.0);
  r.ratio_sigma = std::sqrt(dt.std_error * dt.std_error + 0.25 * dx.std_error * dx.std_error);
  return r;
}

}  // namespace qcarpet::observables
