#include "qcarpet/cli/analysis.hpp"

#include <cmath>
#include <numbers>

#include "qcarpet/observables.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet::cli {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CurveAnalysis analyze_curve(const fracdim::SampledCurve& curve, double shortest_wavelength,
                            std::optional<fracdim::ScalingBand> band, unsigned threads) {
  curve.validate();
  const double span = curve.xs.back() - curve.xs.front();
  CurveAnalysis a;
  a.band = band.value_or(fracdim::resolved_band(curve.size(), span, shortest_wavelength));
  const auto schedule = fracdim::default_eps_schedule(curve.unit_spacing());
  a.box = fracdim::fit_dimension(fracdim::box_count_curve(curve, schedule, threads), a.band);
  a.oscillation = fracdim::oscillation_dimension(curve, schedule, a.band);
  return a;
}

fracdim::SampledCurve x_cut_curve(const wavefield::Superposition& sup,
                                  const wavefield::UniformGrid& grid, double t, unsigned threads) {
  return {grid.nodes(), wavefield::density_x_cut(sup, grid, t, threads)};
}

fracdim::SampledCurve t_cut_curve(const wavefield::Superposition& sup, const wavefield::Position& x,
                                  const wavefield::UniformGrid& grid, unsigned threads) {
  return {grid.nodes(), wavefield::density_t_cut(sup, x, grid, threads)};
}

fracdim::SampledCurve velocity_curve(const wavefield::SuperpositionSpec& spec, int cutoff,
                                     const wavefield::UniformGrid& grid) {
  const auto ts = grid.nodes();
  auto series = observables::mean_velocity_series(spec, cutoff, ts);
  return {ts, std::move(series.values)};
}

fracdim::SampledCurve weierstrass_curve(const fracdim::WeierstrassSpec& spec,
                                        const wavefield::UniformGrid& grid) {
  spec.validate();
  fracdim::SampledCurve c{grid.nodes(), {}};
  c.ys.resize(c.xs.size());
  for (std::size_t i = 0; i < c.xs.size(); ++i) c.ys[i] = fracdim::weierstrass(spec, c.xs[i]);
  return c;
}

double x_cut_wavelength(const wavefield::Superposition& sup) {
  return kTwoPi / sup.max_wavenumber();
}

double t_cut_wavelength(const wavefield::Superposition& sup) {
  const double w = sup.max_density_frequency();
  return w > 0.0 ? kTwoPi / w : 0.0;
}

double velocity_wavelength(int q, int cutoff) {
  return kTwoPi / (std::pow(static_cast<double>(q), 2.0 * cutoff) - 1.0);
}

double weierstrass_wavelength(const fracdim::WeierstrassSpec& spec) {
  return kTwoPi / std::pow(spec.a, spec.n_terms - 1);
}

SurfaceAnalysis analyze_surface(const wavefield::CarpetField& field,
                                std::optional<fracdim::ScalingBand> band, unsigned threads) {
  const double spacing = 1.0 / static_cast<double>(std::min(field.nx(), field.nt()) - 1);
  const auto schedule = fracdim::default_eps_schedule(spacing);
  SurfaceAnalysis a;
  a.counts = fracdim::box_count_surface_counts(field, schedule, threads);
  const fracdim::ScalingBand full{schedule.back(), schedule.front()};
  a.box = fracdim::fit_dimension(a.counts, band.value_or(full), fracdim::GraphKind::Surface);
  return a;
}

}  // namespace qcarpet::cli
