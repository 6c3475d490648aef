#pragma once

// Generator + estimator pipelines used by the dim command and the
// acceptance suite.

#include <optional>
#include <vector>

#include "qcarpet/fracdim.hpp"
#include "qcarpet/wavefield.hpp"

namespace qcarpet::cli {

struct CurveAnalysis {
  fracdim::ScalingBand band;
  fracdim::DimensionEstimate box;
  fracdim::DimensionEstimate oscillation;
};

/// Both estimators over the dyadic schedule, fitted on `band` or on the
/// resolved band for the given shortest wavelength.
CurveAnalysis analyze_curve(const fracdim::SampledCurve& curve, double shortest_wavelength,
                            std::optional<fracdim::ScalingBand> band = std::nullopt,
                            unsigned threads = 1);

fracdim::SampledCurve x_cut_curve(const wavefield::Superposition& sup,
                                  const wavefield::UniformGrid& grid, double t,
                                  unsigned threads = 1);
fracdim::SampledCurve t_cut_curve(const wavefield::Superposition& sup,
                                  const wavefield::Position& x,
                                  const wavefield::UniformGrid& grid, unsigned threads = 1);
fracdim::SampledCurve velocity_curve(const wavefield::SuperpositionSpec& spec, int cutoff,
                                     const wavefield::UniformGrid& grid);
fracdim::SampledCurve weierstrass_curve(const fracdim::WeierstrassSpec& spec,
                                        const wavefield::UniformGrid& grid);

/// Shortest wavelength along each kind of cut.
double x_cut_wavelength(const wavefield::Superposition& sup);
double t_cut_wavelength(const wavefield::Superposition& sup);
double velocity_wavelength(int q, int cutoff);
double weierstrass_wavelength(const fracdim::WeierstrassSpec& spec);

struct SurfaceAnalysis {
  std::vector<fracdim::ScalePoint> counts;
  fracdim::DimensionEstimate box;
};

/// Box counting over the default schedule, fitted over all of it unless a
/// band is given.
SurfaceAnalysis analyze_surface(const wavefield::CarpetField& field,
                                std::optional<fracdim::ScalingBand> band = std::nullopt,
                                unsigned threads = 1);

}  // namespace qcarpet::cli
