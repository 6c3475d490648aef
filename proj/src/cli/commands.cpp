#include "qcarpet/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <numeric>

#include "qcarpet/cli/acceptance.hpp"
#include "qcarpet/cli/analysis.hpp"
#include "qcarpet/cli/io.hpp"
#include "qcarpet/errors.hpp"
#include "qcarpet/observables.hpp"

namespace qcarpet::cli {

namespace {

using nlohmann::json;
using wavefield::System;

constexpr double kPi = std::numbers::pi;

std::string strip_extension(const std::string& path, std::initializer_list<const char*> exts) {
  for (const char* e : exts) {
    const std::string ext(e);
    if (path.size() > ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) {
      return path.substr(0, path.size() - ext.size());
    }
  }
  return path;
}

void emit(const RunConfig& cfg, std::ostream& out, const std::string& data) {
  if (cfg.out.empty()) {
    out << data;
  } else {
    write_atomic(cfg.out, data);
  }
}

json to_json(const fracdim::DimensionEstimate& e) {
  return {{"dimension", e.dimension}, {"holder_kappa", e.holder_kappa}, {"stderr", e.std_error},
          {"eps_min", e.eps_min},     {"eps_max", e.eps_max},           {"r_squared", e.r_squared},
          {"n_scales", e.n_scales},   {"raw_slope", e.raw_slope}};
}

json spec_json(const wavefield::SuperpositionSpec& spec) {
  json j = {{"system", wavefield::to_string(spec.system)}, {"q", spec.q}, {"s", spec.s}, {"M", spec.M}};
  if (spec.system == System::PowerLaw) j["alpha"] = spec.alpha;
  return j;
}

// Whether the series terminates at x: x = k pi / d with d dividing q^M k.
bool is_terminating_point(const wavefield::Position& x, int q, int M) {
  if (!x.exact()) return false;
  std::int64_t k = x.exact()->numerator, d = x.exact()->denominator;
  const std::int64_t g = std::gcd(k < 0 ? -k : k, d);
  if (g > 0) d /= g;
  for (int n = 0; n < M && d > 1; ++n) {
    const std::int64_t h = std::gcd(d, static_cast<std::int64_t>(q));
    if (h == 1) return false;
    d /= h;
  }
  return d == 1;
}

int cmd_carpet(const RunConfig& cfg, std::ostream& out) {
  const auto spec = to_spec(cfg);
  const wavefield::Superposition sup(spec);
  const auto carpet = wavefield::sample_carpet(spec, x_grid(cfg, sup), t_grid(cfg, sup), cfg.threads);
  const std::string prefix = strip_extension(cfg.out.empty() ? "carpet" : cfg.out, {".pgm", ".csv"});
  write_atomic(prefix + ".pgm", pgm_image(carpet.density));
  write_atomic(prefix + ".csv", csv_matrix(carpet.density));
  out << "wrote " << prefix << ".pgm and " << prefix << ".csv (" << carpet.density.nx() << " x "
      << carpet.density.nt() << ")\n";
  return kOk;
}

int cmd_slice(const RunConfig& cfg, std::ostream& out) {
  const auto spec = to_spec(cfg);
  const wavefield::Superposition sup(spec);
  std::vector<double> coord, p;
  std::string name;
  if (cfg.axis == "x") {
    const auto g = x_grid(cfg, sup);
    coord = g.nodes();
    p = wavefield::density_x_cut(sup, g, cfg.t, cfg.threads);
    name = "x";
  } else {
    const auto g = t_grid(cfg, sup);
    coord = g.nodes();
    p = wavefield::density_t_cut(sup, wavefield::parse_position(cfg.x), g, cfg.threads);
    name = "t";
  }
  const CsvColumn cols[] = {{name, coord}, {"P", p}};
  emit(cfg, out, csv_columns(cols));
  return kOk;
}

json curve_report(const CurveAnalysis& a, const std::string& estimator, std::size_t samples) {
  const auto& primary = estimator == "box" ? a.box : a.oscillation;
  return {{"samples", samples},
          {"estimator", estimator},
          {"band", {a.band.lo, a.band.hi}},
          {"estimate", to_json(primary)},
          {"box", to_json(a.box)},
          {"oscillation", to_json(a.oscillation)}};
}

int cmd_dim(const RunConfig& cfg, std::ostream& out) {
  json report = {{"schema", 1}, {"command", "dim"}, {"target", cfg.target}};
  std::optional<double> predicted;
  const auto band = band_override(cfg);

  if (!cfg.input.empty()) {
    const CsvTable table = read_csv(cfg.input);
    if (table.columns.size() < 2) throw IoError(cfg.input + ": need two columns");
    const fracdim::SampledCurve curve{table.columns[0], table.columns[1]};
    const auto a = analyze_curve(curve, 0.0, band, cfg.threads);
    report["input"] = cfg.input;
    report.update(curve_report(a, cfg.estimator, curve.size()));
  } else if (cfg.target == "weierstrass") {
    const fracdim::WeierstrassSpec w{cfg.a, cfg.b, cfg.terms};
    const wavefield::UniformGrid g{cfg.x_min.value_or(0.0), cfg.x_max.value_or(2.0 * kPi), cfg.nx};
    const auto a = analyze_curve(weierstrass_curve(w, g), weierstrass_wavelength(w), band, cfg.threads);
    report["spec"] = {{"a", w.a}, {"b", w.b}, {"terms", w.n_terms}};
    report.update(curve_report(a, cfg.estimator, g.n));
    predicted = fracdim::weierstrass_dimension(w);
  } else {
    const auto spec = to_spec(cfg);
    const wavefield::Superposition sup(spec);
    const auto pred = observables::predicted_dimensions(spec.s);
    report["spec"] = spec_json(spec);
    if (cfg.target == "xslice") {
      const auto g = x_grid(cfg, sup);
      const auto a = analyze_curve(x_cut_curve(sup, g, cfg.t, cfg.threads), x_cut_wavelength(sup), band,
                                   cfg.threads);
      report["t"] = cfg.t;
      report.update(curve_report(a, cfg.estimator, g.n));
      predicted = spec.system == System::FreeGaussian && cfg.t != 0.0 ? 1.0 : pred.space;
    } else if (cfg.target == "tslice") {
      const auto x = wavefield::parse_position(cfg.x);
      const auto g = t_grid(cfg, sup);
      const auto a = analyze_curve(t_cut_curve(sup, x, g, cfg.threads), t_cut_wavelength(sup), band,
                                   cfg.threads);
      report["x"] = x.value();
      report.update(curve_report(a, cfg.estimator, g.n));
      if (spec.system == System::Well) {
        predicted = is_terminating_point(x, spec.q, spec.M) ? 1.0 : pred.time;
      } else if (spec.system == System::Oscillator) {
        predicted = pred.time;
      }
    } else if (cfg.target == "velocity") {
      const int K = cfg.cutoff > 0 ? cfg.cutoff : observables::required_cutoff(spec.q, spec.s);
      const double period = 2.0 * kPi / (static_cast<double>(spec.q) * spec.q - 1.0);
      const wavefield::UniformGrid g{cfg.t_min.value_or(0.0), cfg.t_max.value_or(period), cfg.nt};
      const auto a = analyze_curve(velocity_curve(spec, K, g), velocity_wavelength(spec.q, K), band,
                                   cfg.threads);
      report["cutoff"] = K;
      report.update(curve_report(a, cfg.estimator, g.n));
      predicted = spec.q % 2 == 1 ? 1.0 : pred.velocity;
    } else {
      const auto carpet = wavefield::sample_carpet(spec, x_grid(cfg, sup), t_grid(cfg, sup), cfg.threads);
      const auto a = analyze_surface(carpet.density, band, cfg.threads);
      report["samples"] = {cfg.nx, cfg.nt};
      report["estimator"] = "box";
      report["band"] = {a.box.eps_min, a.box.eps_max};
      report["estimate"] = to_json(a.box);
      if (spec.system != System::FreeGaussian) predicted = pred.surface;
    }
  }
  if (predicted) {
    report["predicted"] = *predicted;
    report["residual"] = report["estimate"]["dimension"].get<double>() - *predicted;
  } else {
    report["predicted"] = nullptr;
    report["residual"] = nullptr;
  }
  emit(cfg, out, report.dump(2) + "\n");
  return kOk;
}

int cmd_observables(const RunConfig& cfg, std::ostream& out) {
  const auto spec = to_spec(cfg);
  const wavefield::Superposition sup(spec);
  const int K = cfg.cutoff > 0 ? cfg.cutoff : observables::required_cutoff(spec.q, spec.s);
  const auto ts = t_grid(cfg, sup).nodes();
  const auto x = observables::mean_position_series(spec, K, ts);
  const auto v = observables::mean_velocity_series(spec, K, ts);
  const CsvColumn cols[] = {{"t", ts}, {"mean_position", x.values}, {"mean_velocity", v.values}};
  emit(cfg, out, csv_columns(cols));
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg, std::ostream& out) {
  const auto spec = to_spec(cfg);
  const wavefield::Superposition sup(spec);
  const auto g = t_grid(cfg, sup);
  observables::ObservableSeries series;
  series.kind = observables::SeriesKind::FixedXDensity;
  series.ts = g.nodes();
  series.values = wavefield::density_t_cut(sup, wavefield::parse_position(cfg.x), g, cfg.threads);
  const auto peaks = observables::spectrum_of_cut(series, *sup.density_period(), sup.max_density_frequency());
  const CsvColumn cols[] = {{"omega", peaks.frequencies}, {"magnitude", peaks.magnitudes}};
  emit(cfg, out, csv_columns(cols));
  return kOk;
}

int cmd_weierstrass(const RunConfig& cfg, std::ostream& out) {
  const fracdim::WeierstrassSpec w{cfg.a, cfg.b, cfg.terms};
  const wavefield::UniformGrid g{cfg.x_min.value_or(0.0), cfg.x_max.value_or(2.0 * kPi), cfg.nx};
  const auto c = weierstrass_curve(w, g);
  const CsvColumn cols[] = {{"x", c.xs}, {"W", c.ys}};
  emit(cfg, out, csv_columns(cols));
  return kOk;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  AcceptanceOptions opts;
  opts.threads = cfg.threads > 1 ? cfg.threads : 4;
  opts.velocity_q = cfg.q;
  const auto results = run_acceptance(opts, out);
  int failed = 0;
  for (const auto& r : results) failed += r.pass ? 0 : 1;
  out << (failed == 0 ? "all criteria pass\n" : std::to_string(failed) + " criteria fail\n");
  return failed == 0 ? kOk : kNumerical;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  if (cfg.command == "carpet") return cmd_carpet(cfg, out);
  if (cfg.command == "slice") return cmd_slice(cfg, out);
  if (cfg.command == "dim") return cmd_dim(cfg, out);
  if (cfg.command == "observables") return cmd_observables(cfg, out);
  if (cfg.command == "spectrum") return cmd_spectrum(cfg, out);
  if (cfg.command == "weierstrass") return cmd_weierstrass(cfg, out);
  return cmd_verify(cfg, out);
}

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

int main_entry(int argc, char** argv) {
  CLI::App app{"qcarpet: fractal wave functions, quantum carpets and their dimensions"};
  app.set_config("--config", "", "flat key=value file; command-line flags take precedence");
  RunConfig cfg;

  app.add_option("--system", cfg.system, "well|oscillator|powerlaw|free")->capture_default_str();
  app.add_option("--q", cfg.q, "integer base q >= 2")->capture_default_str();
  app.add_option("--s", cfg.s, "dimension parameter s")->capture_default_str();
  app.add_option("--m-terms", cfg.m_terms, "truncation order M")->capture_default_str();
  app.add_option("--alpha", cfg.alpha, "power-law exponent")->capture_default_str();
  app.add_flag("--compensated", cfg.compensated, "compensated summation of the series");
  app.add_flag("--numerov-low-states", cfg.numerov_low_states, "power law: Numerov states for b_n <= 500");
  app.add_option("--nx", cfg.nx, "x samples")->capture_default_str();
  app.add_option("--nt", cfg.nt, "t samples")->capture_default_str();
  app.add_option("--x-min", cfg.x_min);
  app.add_option("--x-max", cfg.x_max);
  app.add_option("--t-min", cfg.t_min);
  app.add_option("--t-max", cfg.t_max);
  app.add_option("--x", cfg.x, "fixed position (number or k*pi/d)")->capture_default_str();
  app.add_option("--t", cfg.t, "fixed time")->capture_default_str();
  app.add_option("--axis", cfg.axis, "slice axis x|t")->capture_default_str();
  app.add_option("--target", cfg.target, "xslice|tslice|velocity|surface|weierstrass")->capture_default_str();
  app.add_option("--estimator", cfg.estimator, "box|oscillation")->capture_default_str();
  app.add_option("--eps-min", cfg.eps_min, "lower end of the fitted band");
  app.add_option("--eps-max", cfg.eps_max, "upper end of the fitted band");
  app.add_option("--cutoff", cfg.cutoff, "mean-position series terms (0 = automatic)")->capture_default_str();
  app.add_option("--a", cfg.a, "weierstrass frequency ratio")->capture_default_str();
  app.add_option("--b", cfg.b, "weierstrass amplitude ratio")->capture_default_str();
  app.add_option("--terms", cfg.terms, "weierstrass terms")->capture_default_str();
  app.add_option("--input", cfg.input, "dim: estimate from a two-column CSV");
  app.add_option("--out", cfg.out, "output path");
  app.add_option("--threads", cfg.threads, "worker threads")->capture_default_str();
  app.add_flag("--seed-none", cfg.seed_none, "accepted for compatibility; nothing is random");

  const std::pair<const char*, const char*> commands[] = {
      {"carpet", "sample P(x, t); write PGM image and CSV matrix"},
      {"slice", "write a space or time cross-section as CSV"},
      {"dim", "estimate a graph dimension; JSON report"},
      {"observables", "mean position and velocity series as CSV"},
      {"spectrum", "beat spectrum of a fixed-x density cut"},
      {"verify", "run the acceptance suite"},
      {"weierstrass", "sample the Weierstrass function as CSV"},
  };
  for (const auto& [name, desc] : commands) app.add_subcommand(name, desc)->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    app.exit(e);
    return kIo;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }
  cfg.command = app.get_subcommands().front()->get_name();
  try {
    return run_command(cfg, std::cout);
  } catch (...) {
    return report_exception(std::cerr);
  }
}

}  // namespace qcarpet::cli
