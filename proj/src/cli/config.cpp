#include "qcarpet/cli/config.hpp"

#include <cmath>
#include <numbers>

#include "qcarpet/errors.hpp"

namespace qcarpet::cli {

namespace {
constexpr double kPi = std::numbers::pi;

void check_range(const char* axis, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ValidationError(std::string(axis) + " range requires finite min < max");
  }
}
}  // namespace

wavefield::SuperpositionSpec to_spec(const RunConfig& cfg) {
  wavefield::SuperpositionSpec spec;
  spec.system = wavefield::system_from_string(cfg.system);
  spec.q = cfg.q;
  spec.s = cfg.s;
  spec.M = cfg.m_terms;
  spec.alpha = cfg.alpha;
  spec.compensated = cfg.compensated;
  spec.numerov_low_states = cfg.numerov_low_states;
  return spec;
}

void validate(const RunConfig& cfg) {
  static const char* kCommands[] = {"carpet", "slice", "dim", "observables", "spectrum", "verify",
                                    "weierstrass"};
  bool known = false;
  for (const char* c : kCommands) known = known || cfg.command == c;
  if (!known) throw ValidationError("unknown command '" + cfg.command + "'");

  if (cfg.command != "weierstrass" && !(cfg.command == "dim" && cfg.target == "weierstrass") &&
      !(cfg.command == "dim" && !cfg.input.empty())) {
    const auto spec = to_spec(cfg);
    wavefield::validate(spec);
    if (spec.system == wavefield::System::Well) {
      if ((cfg.x_min && *cfg.x_min < 0.0) || (cfg.x_max && *cfg.x_max > kPi)) {
        throw ValidationError("well requires the x range to lie inside [0, pi]");
      }
    }
  }
  if (cfg.nx < 2 || cfg.nt < 2) throw ValidationError("nx and nt must be >= 2");
  if (cfg.x_min && cfg.x_max) check_range("x", *cfg.x_min, *cfg.x_max);
  if (cfg.t_min && cfg.t_max) check_range("t", *cfg.t_min, *cfg.t_max);
  if (cfg.axis != "x" && cfg.axis != "t") throw ValidationError("axis must be x or t");
  if (cfg.estimator != "box" && cfg.estimator != "oscillation") {
    throw ValidationError("estimator must be box or oscillation");
  }
  if (cfg.command == "dim") {
    static const char* kTargets[] = {"xslice", "tslice", "velocity", "surface", "weierstrass"};
    bool ok = false;
    for (const char* t : kTargets) ok = ok || cfg.target == t;
    if (!ok) {
      throw ValidationError("target must be xslice|tslice|velocity|surface|weierstrass, got '" +
                            cfg.target + "'");
    }
    if (cfg.target == "velocity" && cfg.system != "well") {
      throw ValidationError("velocity target requires the well");
    }
  }
  if ((cfg.command == "observables" || cfg.command == "spectrum") && cfg.system != "well") {
    throw ValidationError(cfg.command + " requires the well");
  }
  if (cfg.command == "weierstrass" || cfg.target == "weierstrass") {
    fracdim::WeierstrassSpec{cfg.a, cfg.b, cfg.terms}.validate();
  }
  if (cfg.eps_min && cfg.eps_max && !(*cfg.eps_min < *cfg.eps_max)) {
    throw ValidationError("eps-min must be below eps-max");
  }
  if ((cfg.eps_min && !(*cfg.eps_min > 0.0)) || (cfg.eps_max && !(*cfg.eps_max <= 1.0))) {
    throw ValidationError("eps band must lie in (0, 1]");
  }
  if (cfg.cutoff < 0) throw ValidationError("cutoff must be >= 0");
  if (cfg.threads < 1) throw ValidationError("threads must be >= 1");
  wavefield::parse_position(cfg.x);
}

wavefield::UniformGrid x_grid(const RunConfig& cfg, const wavefield::Superposition& sup) {
  double lo = 0.0, hi = kPi;
  switch (sup.spec().system) {
    case wavefield::System::Well: break;
    case wavefield::System::Oscillator: lo = -8.0; hi = 8.0; break;
    case wavefield::System::FreeGaussian: lo = -4.0; hi = 4.0; break;
    case wavefield::System::PowerLaw:
      hi = sup.wkb_window_limit();
      lo = -hi;
      break;
  }
  lo = cfg.x_min.value_or(lo);
  hi = cfg.x_max.value_or(hi);
  check_range("x", lo, hi);
  return {lo, hi, cfg.nx};
}

wavefield::UniformGrid t_grid(const RunConfig& cfg, const wavefield::Superposition& sup) {
  const double lo = cfg.t_min.value_or(0.0);
  const double hi = cfg.t_max.value_or(lo + sup.density_period().value_or(1.0));
  check_range("t", lo, hi);
  return {lo, hi, cfg.nt};
}

std::optional<fracdim::ScalingBand> band_override(const RunConfig& cfg) {
  if (!cfg.eps_min && !cfg.eps_max) return std::nullopt;
  return fracdim::ScalingBand{cfg.eps_min.value_or(0x1p-30), cfg.eps_max.value_or(0x1p-3)};
}

}  // namespace qcarpet::cli
