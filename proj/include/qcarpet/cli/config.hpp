#pragma once

// Run configuration shared by every subcommand.

#include <optional>
#include <string>

#include "qcarpet/fracdim.hpp"
#include "qcarpet/wavefield.hpp"

namespace qcarpet::cli {

struct RunConfig {
  std::string command;

  // superposition
  std::string system = "well";
  int q = 2;
  double s = 1.5;
  int m_terms = 16;
  double alpha = 2.0;
  bool compensated = false;
  bool numerov_low_states = false;

  // grids
  std::size_t nx = 1025;
  std::size_t nt = 1025;
  std::optional<double> x_min, x_max, t_min, t_max;

  // cuts and estimation
  std::string x = "1";  // fixed position, accepts k*pi/d
  double t = 0.0;
  std::string axis = "x";
  std::string target = "xslice";
  std::string estimator = "oscillation";
  std::optional<double> eps_min, eps_max;
  int cutoff = 0;  // mean-position series terms; 0 picks the tail bound

  // weierstrass
  double a = 4.0;
  double b = 0.5;
  int terms = 16;

  std::string out;
  std::string input;
  unsigned threads = 1;
  bool seed_none = false;
};

wavefield::SuperpositionSpec to_spec(const RunConfig& cfg);

/// Rejects the configuration before any computation, naming the violated
/// constraint.
void validate(const RunConfig& cfg);

/// Default x range: [0, pi] (well), [-8, 8] (oscillator), [-4, 4] (free),
/// and the WKB window for power laws; overridden by x_min / x_max.
wavefield::UniformGrid x_grid(const RunConfig& cfg, const wavefield::Superposition& sup);
/// Default t range: one density period when P is periodic, else [0, 1].
wavefield::UniformGrid t_grid(const RunConfig& cfg, const wavefield::Superposition& sup);

std::optional<fracdim::ScalingBand> band_override(const RunConfig& cfg);

}  // namespace qcarpet::cli
