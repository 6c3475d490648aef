#include "qcarpet/cli/acceptance.hpp"

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iterator>
#include <map>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "qcarpet/cli/analysis.hpp"
#include "qcarpet/cli/commands.hpp"
#include "qcarpet/eigenbasis.hpp"
#include "qcarpet/observables.hpp"

namespace qcarpet::cli {

namespace {

using wavefield::Position;
using wavefield::Superposition;
using wavefield::SuperpositionSpec;
using wavefield::System;
using wavefield::UniformGrid;

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kCurveSamples = (std::size_t{1} << 21) + 1;
constexpr std::size_t kVelocitySamples = (std::size_t{1} << 20) + 1;
constexpr std::size_t kSurfaceSamples = (std::size_t{1} << 11) + 1;

std::string fixed(double v, int digits = 3) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(2) << v;
  return os.str();
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

SuperpositionSpec well_spec(int M = 16) {
  SuperpositionSpec s;
  s.system = System::Well;
  s.q = 2;
  s.s = 1.5;
  s.M = M;
  return s;
}

struct Outcome {
  bool pass;
  std::string detail;
};

// Estimates shared between criteria.
struct Shared {
  std::optional<fracdim::DimensionEstimate> dx, dt, dv;
};

std::string estimates(const CurveAnalysis& a) {
  return "osc " + fixed(a.oscillation.dimension) + ", box " + fixed(a.box.dimension) + " on [2^" +
         fixed(std::log2(a.band.lo), 0) + ", 2^" + fixed(std::log2(a.band.hi), 0) + "]";
}

CurveAnalysis well_x_cut(double t, unsigned threads) {
  const Superposition sup(well_spec());
  const UniformGrid g{0.0, kPi, kCurveSamples};
  return analyze_curve(x_cut_curve(sup, g, t, threads), x_cut_wavelength(sup), std::nullopt, threads);
}

CurveAnalysis well_t_cut(const Position& x, unsigned threads) {
  const Superposition sup(well_spec());
  const UniformGrid g{0.0, *sup.density_period(), kCurveSamples};
  return analyze_curve(t_cut_curve(sup, x, g, threads), t_cut_wavelength(sup), std::nullopt, threads);
}

Outcome c1_calibration(unsigned threads) {
  const fracdim::WeierstrassSpec w{4.0, 0.5, 16};
  const UniformGrid g{0.0, 2.0 * kPi, kCurveSamples};
  const auto a = analyze_curve(weierstrass_curve(w, g), weierstrass_wavelength(w), std::nullopt, threads);
  const double d = fracdim::weierstrass_dimension(w);
  return {within(a.box.dimension, d, 0.05) && within(a.oscillation.dimension, d, 0.05),
          estimates(a) + " (target 1.50 +- 0.05 for both)"};
}

Outcome c2_space(unsigned threads, Shared& shared) {
  const auto a0 = well_x_cut(0.0, threads);
  const auto a1 = well_x_cut(1.0, threads);
  shared.dx = a0.oscillation;
  return {within(a0.oscillation.dimension, 1.5, 0.1) && within(a1.oscillation.dimension, 1.5, 0.1),
          "t=0: " + estimates(a0) + "; t=1: " + estimates(a1) + " (target 1.50 +- 0.10)"};
}

Outcome c3_time_generic(unsigned threads, Shared& shared) {
  const auto a = well_t_cut(Position(1.0), threads);
  shared.dt = a.oscillation;
  return {within(a.oscillation.dimension, 1.75, 0.1), "x=1: " + estimates(a) + " (target 1.75 +- 0.10)"};
}

Outcome c4_time_smooth(unsigned threads) {
  const auto a = well_t_cut(Position::pi_fraction(1, 8), threads);
  return {within(a.oscillation.dimension, 1.0, 0.05), "x=pi/8: " + estimates(a) + " (target 1.00 +- 0.05)"};
}

Outcome c5_velocity(int velocity_q, Shared& shared) {
  auto spec = well_spec();
  std::string detail;
  bool pass = true;
  if (velocity_q % 2 == 0) {
    spec.q = velocity_q;
    const int K = observables::required_cutoff(spec.q, spec.s);
    const double period = 2.0 * kPi / (static_cast<double>(spec.q) * spec.q - 1.0);
    const UniformGrid g{0.0, period, kVelocitySamples};
    const auto a = analyze_curve(velocity_curve(spec, K, g), velocity_wavelength(spec.q, K));
    shared.dv = a.oscillation;
    const double target = observables::predicted_dimensions(spec.s).velocity;
    pass = within(a.oscillation.dimension, target, 0.1);
    detail = "q=" + std::to_string(spec.q) + " K=" + std::to_string(K) + ": " + estimates(a) +
             " (target " + fixed(target, 2) + " +- 0.10)";
  }
  // Odd base: the velocity vanishes identically.
  auto odd = spec;
  odd.q = velocity_q % 2 == 1 ? velocity_q : 3;
  const double period = 2.0 * kPi / (static_cast<double>(odd.q) * odd.q - 1.0);
  const UniformGrid g{0.0, period, kVelocitySamples};
  const auto curve = velocity_curve(odd, 1, g);
  bool zero = true;
  for (double v : curve.ys) zero = zero && v == 0.0;
  const auto a = analyze_curve(curve, velocity_wavelength(odd.q, 1));
  const bool odd_pass = zero && a.oscillation.dimension == 1.0 && a.box.dimension == 1.0;
  pass = pass && odd_pass;
  if (!detail.empty()) detail += "; ";
  detail += "q=" + std::to_string(odd.q) + ": v " + (zero ? "== 0" : "!= 0") + ", D_v = " +
            fixed(a.oscillation.dimension) + " (odd-q branch, exactly 1)";
  return {pass, detail};
}

Outcome c6_relation(const Shared& shared) {
  if (!shared.dx || !shared.dt || !shared.dv) return {false, "needs the estimates of criteria 2, 3 and 5"};
  const auto r = observables::dimension_relation_report(*shared.dx, *shared.dt, *shared.dv);
  return {r.sum_residual <= 0.2,
          "|D_t + D_v - D_x - 3/2| = " + fixed(r.sum_residual) + " (+- " + fixed(r.sum_sigma) +
              ", limit 0.2); |D_t - 1 - D_x/2| = " + fixed(r.ratio_residual)};
}

Outcome c7_surface(unsigned threads) {
  const auto spec = well_spec();
  const Superposition sup(spec);
  const UniformGrid gx{0.0, kPi, kSurfaceSamples};
  const UniformGrid gt{0.0, *sup.density_period(), kSurfaceSamples};
  const auto carpet = wavefield::sample_carpet(spec, gx, gt, threads);
  const auto a = analyze_surface(carpet.density, std::nullopt, threads);
  return {within(a.box.dimension, 2.75, 0.15),
          "box " + fixed(a.box.dimension) + " on [2^" + fixed(std::log2(a.box.eps_min), 0) + ", 2^" +
              fixed(std::log2(a.box.eps_max), 0) + "], r^2 " + fixed(a.box.r_squared, 4) +
              " (target 2.75 +- 0.15)"};
}

Outcome c8_oscillator(unsigned threads) {
  SuperpositionSpec spec;
  spec.system = System::Oscillator;
  spec.q = 2;
  spec.s = 1.25;
  spec.M = 12;
  const Superposition sup(spec);
  const UniformGrid gx{-8.0, 8.0, kCurveSamples};
  const auto ax = analyze_curve(x_cut_curve(sup, gx, 0.0, threads), x_cut_wavelength(sup), std::nullopt,
                                threads);
  const UniformGrid gt{0.0, *sup.density_period(), kCurveSamples};
  const auto at = analyze_curve(t_cut_curve(sup, Position(1.0), gt, threads), t_cut_wavelength(sup),
                                std::nullopt, threads);
  const auto pred = observables::predicted_dimensions(spec.s);
  return {within(ax.oscillation.dimension, 1.25, 0.1) && within(at.oscillation.dimension, 1.625, 0.1),
          "D_x: " + estimates(ax) + " (target 1.25 +- 0.10); D_t(x=1): " + estimates(at) +
              " (target 1.625 +- 0.10); predicted surface " + fixed(pred.surface, 3) + " = 21/8"};
}

Outcome c9_free(unsigned threads) {
  SuperpositionSpec spec;
  spec.system = System::FreeGaussian;
  spec.q = 2;
  spec.s = 1.5;
  spec.M = 20;
  const Superposition sup(spec);
  const UniformGrid g{-4.0, 4.0, kCurveSamples};
  const auto a0 = analyze_curve(x_cut_curve(sup, g, 0.0, threads), x_cut_wavelength(sup), std::nullopt,
                                threads);
  const auto a1 = analyze_curve(x_cut_curve(sup, g, 0.5, threads), x_cut_wavelength(sup), std::nullopt,
                                threads);
  return {within(a0.oscillation.dimension, 1.5, 0.1) && within(a1.oscillation.dimension, 1.0, 0.05),
          "t=0: " + estimates(a0) + " (target 1.50 +- 0.10); t=0.5: " + estimates(a1) +
              " (target 1.00 +- 0.05)"};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

Outcome c10_wkb() {
  bool pass = true;
  std::string detail;
  for (double alpha : {1.0, 2.0, 4.0}) {
    const auto ex = eigenbasis::wkb_exponents(alpha);
    std::vector<double> ln_n, ln_e, ln_amp;
    for (std::int64_t n = 50; n <= 200; n += 25) {
      const auto rec = eigenbasis::numerov_solve(alpha, n);
      const double inner = 0.5 * *rec.turning_point;
      double peak = 0.0;
      for (std::size_t i = 0; i < rec.psi.size(); ++i) {
        const double x = rec.grid_start + static_cast<double>(i) * rec.grid_step;
        if (std::abs(x) <= inner) peak = std::max(peak, std::abs(rec.psi[i]));
      }
      ln_n.push_back(std::log(static_cast<double>(n)));
      ln_e.push_back(std::log(rec.energy));
      ln_amp.push_back(std::log(peak));
    }
    const double beta = slope(ln_n, ln_e);
    const double gamma = -slope(ln_n, ln_amp);
    const bool ok = std::abs(beta - ex.beta) <= 0.02 * ex.beta && std::abs(gamma - ex.gamma) <= 0.05 * ex.gamma;
    pass = pass && ok;
    detail += "alpha=" + fixed(alpha, 0) + ": beta " + fixed(beta, 4) + "/" + fixed(ex.beta, 4) + ", gamma " +
              fixed(gamma, 4) + "/" + fixed(ex.gamma, 4) + "; ";
  }
  const double e0 = eigenbasis::numerov_solve(1.0, 0).energy;
  const double e1 = eigenbasis::numerov_solve(1.0, 1).energy;
  const bool airy = within(e0, 1.01879, 1e-4) && within(e1, 2.33811, 1e-4);
  detail += "Airy " + fixed(e0, 6) + ", " + fixed(e1, 6) + " (1.01879, 2.33811 to 1e-4)";
  return {pass && airy, detail};
}

Outcome c11_observables(unsigned threads) {
  std::string detail;
  // Mean position: series against quadrature at M = 20.
  const auto spec = well_spec(20);
  const int K = observables::required_cutoff(spec.q, spec.s);
  const double t0[] = {0.0};
  const double series = observables::mean_position_series(spec, K, t0).values[0];
  const double quad = observables::mean_position_quadrature(spec, 0.0, 0, threads);
  const bool mean_ok = within(series, 1.14604, 1e-5) && within(series, quad, 1e-4);
  detail += "<x>(0) series " + fixed(series, 6) + ", quadrature " + fixed(quad, 6) + "; ";

  const auto e = observables::ehrenfest_check(well_spec(6), 0.3);
  const bool ehren_ok = std::abs(e.lhs - e.rhs) <= 1e-5;
  detail += "Ehrenfest M=6 |lhs - rhs| = " + sci(std::abs(e.lhs - e.rhs)) + "; ";

  // Spectrum of an M = 4 cut at x = 1 against the pairwise expansion of |Psi|^2.
  const auto s4 = well_spec(4);
  const Superposition sup(s4);
  const UniformGrid g{0.0, *sup.density_period(), 1025};
  observables::ObservableSeries cut;
  cut.kind = observables::SeriesKind::FixedXDensity;
  cut.ts = g.nodes();
  cut.values = wavefield::density_t_cut(sup, Position(1.0), g);
  const auto peaks = observables::spectrum_of_cut(cut, *sup.density_period(), sup.max_density_frequency());

  std::map<std::int64_t, double> oracle;  // omega -> |X_j| / n
  std::vector<double> amp;
  for (std::size_t k = 0; k < sup.terms(); ++k) {
    amp.push_back(sup.normalization() * sup.coefficients()[k] * std::sin(static_cast<double>(sup.indices()[k])));
  }
  for (std::size_t m = 0; m < amp.size(); ++m) {
    oracle[0] += amp[m] * amp[m];
    for (std::size_t n = 0; n < m; ++n) {
      const auto w = static_cast<std::int64_t>(sup.energies()[m] - sup.energies()[n]);
      oracle[w] += amp[m] * amp[n];  // 2 a_m a_n cos(w t) splits over +-w
    }
  }
  double oracle_peak = 0.0;
  for (const auto& [w, a] : oracle) oracle_peak = std::max(oracle_peak, std::abs(a));
  std::set<std::int64_t> expected;
  for (const auto& [w, a] : oracle) {
    if (std::abs(a) >= 1e-6 * oracle_peak) expected.insert(w);
  }
  std::set<std::int64_t> found;
  bool exact = true;
  for (std::size_t i = 0; i < peaks.frequencies.size(); ++i) {
    const double w = peaks.frequencies[i];
    const auto r = static_cast<std::int64_t>(std::llround(w));
    exact = exact && std::abs(w - static_cast<double>(r)) < 1e-9 * std::max(1.0, w) && r % 3 == 0 &&
            oracle.count(r) == 1;
    found.insert(r);
  }
  const bool spectrum_ok = exact && found == expected;
  detail += "spectrum " + std::to_string(found.size()) + " peaks, " +
            (spectrum_ok ? "all of the form 4^m - 4^n and multiples of 3" : "mismatch against the pair expansion");
  return {mean_ok && ehren_ok && spectrum_ok, detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome c12_determinism(unsigned threads, const std::filesystem::path& scratch) {
  std::filesystem::create_directories(scratch);
  auto run = [&](RunConfig cfg, unsigned n) {
    cfg.threads = n;
    std::ostringstream sink;
    run_command(cfg, sink);
  };
  RunConfig slice;
  slice.command = "slice";
  slice.axis = "x";
  slice.t = 0.0;
  slice.nx = kCurveSamples;
  RunConfig carpet;
  carpet.command = "carpet";
  carpet.nx = kSurfaceSamples;
  carpet.nt = kSurfaceSamples;

  const auto n = std::max(2u, threads);
  std::vector<std::filesystem::path> files[2];
  for (int pass = 0; pass < 2; ++pass) {
    const auto tag = std::string(pass == 0 ? "serial" : "parallel");
    slice.out = (scratch / ("slice-" + tag + ".csv")).string();
    carpet.out = (scratch / ("carpet-" + tag)).string();
    run(slice, pass == 0 ? 1 : n);
    run(carpet, pass == 0 ? 1 : n);
    files[pass] = {slice.out, carpet.out + ".pgm", carpet.out + ".csv"};
  }
  bool same = true;
  for (std::size_t i = 0; i < files[0].size(); ++i) {
    const auto a = slurp(files[0][i]);
    same = same && !a.empty() && a == slurp(files[1][i]);
  }
  std::error_code ec;
  for (const auto& set : files) {
    for (const auto& f : set) std::filesystem::remove(f, ec);
  }
  return {same, "x-cut CSV, carpet PGM and carpet CSV at 1 and " + std::to_string(n) + " threads: " +
                    (same ? "bitwise identical" : "differ")};
}

}  // namespace

std::string format_result(const CriterionResult& r) {
  return std::string(r.pass ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + ". " + r.name + ": " +
         r.detail + " [" + fixed(r.seconds, 1) + " s]";
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts, std::ostream& log) {
  const unsigned threads = std::max(1u, opts.threads);
  auto scratch = opts.scratch;
  if (scratch.empty()) {
    scratch = std::filesystem::temp_directory_path() / ("qcarpet-accept-" + std::to_string(::getpid()));
  }
  Shared shared;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"Estimator calibration", [&] { return c1_calibration(threads); }},
      {"Space dimension", [&] { return c2_space(threads, shared); }},
      {"Time dimension, generic point", [&] { return c3_time_generic(threads, shared); }},
      {"Time dimension, smooth point", [&] { return c4_time_smooth(threads); }},
      {"Velocity dimension", [&] { return c5_velocity(opts.velocity_q, shared); }},
      {"Dimension relation", [&] { return c6_relation(shared); }},
      {"Surface dimension", [&] { return c7_surface(threads); }},
      {"Oscillator", [&] { return c8_oscillator(threads); }},
      {"Free particle", [&] { return c9_free(threads); }},
      {"WKB scaling oracle", [&] { return c10_wkb(); }},
      {"Observables", [&] { return c11_observables(threads); }},
      {"Determinism", [&] { return c12_determinism(threads, scratch); }},
  };
  std::vector<CriterionResult> results;
  int id = 0;
  for (const auto& [name, fn] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const double budget = id == 0 ? 30.0 : id == 1 ? 240.0 : id == 6 ? 600.0 : 0.0;
    if (budget > 0.0 && secs > budget) {
      o.pass = false;
      o.detail += "; runtime over the " + fixed(budget, 0) + " s budget";
    }
    results.push_back({++id, name, o.pass, o.detail, secs});
    log << format_result(results.back()) << std::endl;
  }
  std::error_code ec;
  if (opts.scratch.empty()) std::filesystem::remove_all(scratch, ec);
  return results;
}

}  // namespace qcarpet::cli
