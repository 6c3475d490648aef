#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <vector>

#include "qcarpet/errors.hpp"
#include "qcarpet/fracdim.hpp"
#include "qcarpet/wavefield.hpp"

using namespace qcarpet;
using namespace qcarpet::fracdim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kLarge = (std::size_t{1} << 21) + 1;

template <typename F>
SampledCurve sample(F&& f, double lo, double hi, std::size_t n) {
  SampledCurve c;
  c.xs.resize(n);
  c.ys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.xs[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    c.ys[i] = f(c.xs[i]);
  }
  return c;
}

SampledCurve weierstrass_curve(const WeierstrassSpec& w, std::size_t n = kLarge) {
  return sample([&](double x) { return weierstrass(w, x); }, 0.0, 2.0 * kPi, n);
}

ScalingBand weierstrass_band(const WeierstrassSpec& w, std::size_t n = kLarge) {
  return resolved_band(n, 2.0 * kPi, 2.0 * kPi / std::pow(w.a, w.n_terms - 1));
}

// Cells met by a densely resampled polyline; ~independent of the column sweep.
std::size_t dense_cell_count(const SampledCurve& c, double eps) {
  const double ylo = *std::min_element(c.ys.begin(), c.ys.end());
  const double yhi = *std::max_element(c.ys.begin(), c.ys.end());
  const auto cells = static_cast<long>(std::ceil(1.0 / eps - 1e-9));
  std::set<std::pair<long, long>> met;
  const std::size_t n = c.size() - 1;
  const int sub = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    for (int j = 0; j <= sub; ++j) {
      const double f = static_cast<double>(j) / sub;
      const double u = (static_cast<double>(i) + f) / static_cast<double>(n);
      const double v = ((1 - f) * c.ys[i] + f * c.ys[i + 1] - ylo) / (yhi - ylo);
      met.insert({std::min(static_cast<long>(u / eps), cells - 1), std::min(static_cast<long>(v / eps), cells - 1)});
    }
  }
  return met.size();
}

}  // namespace

TEST_CASE("weierstrass function and its dimension") {
  CHECK(weierstrass(WeierstrassSpec{}, 0.0) == 0.0);
  CHECK(weierstrass(WeierstrassSpec{3.0, 0.7, 9}, 0.0) == 0.0);
  CHECK(weierstrass_dimension({4.0, 0.5, 16}) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(weierstrass_dimension({2.0, 0.5, 16}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(weierstrass_dimension({8.0, 0.25, 16}) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
  double direct = 0.0;
  for (int n = 0; n < 5; ++n) direct += std::pow(0.5, n) * std::sin(std::pow(4.0, n) * 0.3);
  CHECK(weierstrass({4.0, 0.5, 5}, 0.3) == doctest::Approx(direct).epsilon(1e-15));
  CHECK_THROWS_AS((WeierstrassSpec{1.5, 0.5, 4}.validate()), ValidationError);
  CHECK_THROWS_AS((WeierstrassSpec{4.0, 1.5, 4}.validate()), ValidationError);
}

TEST_CASE("schedules and resolved bands") {
  const auto s = default_eps_schedule(1.0 / 1024);
  REQUIRE(s.size() == 6);
  CHECK(s.front() == 0.125);
  CHECK(s.back() == 1.0 / 256);
  const auto b = resolved_band(kLarge, 2.0 * kPi, 2.0 * kPi / std::pow(4.0, 15));
  CHECK(b.lo == std::exp2(-15));
  CHECK(b.hi == 0.125);
  // a coarse generator pushes the inner cutoff up
  const auto coarse = resolved_band(kLarge, kPi, 2.0 * kPi / 4096);
  CHECK(coarse.lo == std::exp2(-9));
  CHECK(resolved_band(kLarge, 1.0, 1.0).lo == std::exp2(-7));
  CHECK_THROWS_AS(resolved_band(300, 1.0, 0.0), NumericalError);
}

TEST_CASE("constant curve covers one row of cells") {
  const auto c = sample([](double) { return 3.0; }, -2.0, 5.0, 1025);
  const std::vector<double> eps = {0.3, 0.125, 0.1, 1.0 / 16, 1.0 / 100};
  const auto counts = box_count_curve(c, eps);
  for (std::size_t i = 0; i < eps.size(); ++i)
    CHECK(counts[i].value == std::ceil(1.0 / eps[i] - 1e-9));
  const auto sched = default_eps_schedule(c.unit_spacing());
  CHECK(fit_dimension(box_count_curve(c, sched)).dimension == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("diagonal line") {
  const auto c = sample([](double x) { return x; }, 0.0, 1.0, 1025);
  const double eight[] = {0.125};
  const double n = box_count_curve(c, eight)[0].value;
  CHECK(n >= 8);
  CHECK(n <= 16);
  const auto sched = default_eps_schedule(c.unit_spacing());
  CHECK(std::abs(fit_dimension(box_count_curve(c, sched)).dimension - 1.0) <= 0.05);
}

TEST_CASE("column sweep agrees with dense polyline rasterization") {
  const auto c = sample([](double x) { return std::sin(37.1 * x) + 0.6 * std::cos(211.7 * x * x); }, 0.0, 1.0, 301);
  for (double eps : {0.125, 0.1, 1.0 / 16, 0.03}) {
    const double e[] = {eps};
    CAPTURE(eps);
    CHECK(box_count_curve(c, e)[0].value == static_cast<double>(dense_cell_count(c, eps)));
  }
}

TEST_CASE("box counts are nonincreasing and respect resolution") {
  const WeierstrassSpec w{4.0, 0.5, 12};
  const auto c = weierstrass_curve(w, 65537);
  const auto sched = default_eps_schedule(c.unit_spacing());
  const auto counts = box_count_curve(c, sched, 3);
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i].value >= counts[i - 1].value);
  const auto serial = box_count_curve(c, sched, 1);
  for (std::size_t i = 0; i < counts.size(); ++i) CHECK(counts[i].value == serial[i].value);
  const double fine[] = {1.5 * c.unit_spacing()};
  try {
    box_count_curve(c, fine);
    FAIL("expected a resolution error");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalError::Kind::Resolution);
  }
  const double too_large[] = {1.5};
  CHECK_THROWS_AS(box_count_curve(c, too_large), DomainError);
}

TEST_CASE("fit: band selection and failures") {
  std::vector<ScalePoint> pts;
  for (int k = 3; k <= 14; ++k) {
    const double eps = std::exp2(-k);
    pts.push_back({eps, std::pow(1.0 / eps, 1.3) * 7.0});
  }
  const auto full = fit_dimension(pts);
  CHECK(full.dimension == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(full.n_scales == 12);
  CHECK(full.r_squared == doctest::Approx(1.0));
  const auto banded = fit_dimension(pts, ScalingBand{std::exp2(-10), std::exp2(-4)});
  CHECK(banded.n_scales == 7);
  CHECK(banded.eps_min == std::exp2(-10));
  CHECK(banded.eps_max == std::exp2(-4));
  CHECK(banded.holder_kappa == doctest::Approx(2.0 - banded.dimension));
  CHECK_THROWS_AS(fit_dimension(pts, ScalingBand{std::exp2(-6), std::exp2(-3)}), NumericalError);

  // slope above 2 is clamped, the raw slope is kept
  std::vector<ScalePoint> steep;
  for (int k = 3; k <= 10; ++k) steep.push_back({std::exp2(-k), std::exp2(2.4 * k)});
  const auto clamped = fit_dimension(steep);
  CHECK(clamped.dimension == 2.0);
  CHECK(clamped.raw_slope == doctest::Approx(2.4));

  // scatter without a scaling window
  std::vector<ScalePoint> noisy;
  const double vals[] = {5, 90, 7, 300, 12, 40, 3, 800, 20};
  for (int k = 0; k < 9; ++k) noisy.push_back({std::exp2(-3 - k), vals[k]});
  try {
    fit_dimension(noisy);
    FAIL("expected NoScalingBand");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalError::Kind::NoScalingBand);
  }
}

TEST_CASE("weierstrass calibration of both estimators") {
  const WeierstrassSpec w{4.0, 0.5, 16};
  const auto c = weierstrass_curve(w);
  const auto band = weierstrass_band(w);
  const auto sched = default_eps_schedule(c.unit_spacing());
  const auto box = fit_dimension(box_count_curve(c, sched), band);
  const auto osc = oscillation_dimension(c, sched, band);
  CHECK(std::abs(box.dimension - 1.5) <= 0.05);
  CHECK(std::abs(osc.dimension - 1.5) <= 0.05);
  CHECK(osc.holder_kappa == doctest::Approx(2.0 - osc.dimension));
}

TEST_CASE("weierstrass a = 8, b = 1/4") {
  const WeierstrassSpec w{8.0, 0.25, 12};
  const auto c = weierstrass_curve(w);
  const auto sched = default_eps_schedule(c.unit_spacing());
  const auto box = fit_dimension(box_count_curve(c, sched), weierstrass_band(w));
  CHECK(std::abs(box.dimension - 4.0 / 3.0) <= 0.05);
}

TEST_CASE("estimator agreement across dimensions") {
  for (double D : {1.2, 1.5, 1.8}) {
    const WeierstrassSpec w{4.0, std::pow(4.0, D - 2.0), 16};
    const auto c = weierstrass_curve(w);
    const auto band = weierstrass_band(w);
    const auto sched = default_eps_schedule(c.unit_spacing());
    const double box = fit_dimension(box_count_curve(c, sched), band).dimension;
    const double osc = oscillation_dimension(c, sched, band).dimension;
    CAPTURE(D);
    CAPTURE(box);
    CAPTURE(osc);
    CHECK(std::abs(box - osc) <= 0.07);
    CHECK(std::abs(box - D) <= 0.05);
    CHECK(std::abs(osc - D) <= 0.05);
  }
}

TEST_CASE("smooth curves sit on the floor") {
  const auto poly = sample([](double x) { return x * x * x - x; }, -2.0, 2.0, 65537);
  const auto wave = sample([](double x) { return std::sin(x); }, 0.0, 6.0 * kPi, 65537);
  for (const auto* c : {&poly, &wave}) {
    const auto band = resolved_band(c->size(), c->xs.back() - c->xs.front(), 0.0);
    const auto sched = default_eps_schedule(c->unit_spacing());
    CHECK(std::abs(fit_dimension(box_count_curve(*c, sched), band).dimension - 1.0) <= 0.05);
    CHECK(std::abs(oscillation_dimension(*c, sched, band).dimension - 1.0) <= 0.05);
  }
}

TEST_CASE("flat curve has oscillation dimension exactly one") {
  const auto c = sample([](double) { return 0.0; }, 0.0, 1.0, 4097);
  CHECK(oscillation_dimension(c, default_eps_schedule(c.unit_spacing())).dimension == 1.0);
}

TEST_CASE("affine invariance") {
  const WeierstrassSpec w{4.0, 0.6, 10};
  // a window without symmetric samples, so no value sits exactly on a dyadic cell edge
  const auto c = sample([&](double x) { return weierstrass(w, x); }, 0.1, 5.3, 262145);
  const auto band = resolved_band(262145, 5.2, 2.0 * kPi / std::pow(w.a, w.n_terms - 1));
  const auto sched = default_eps_schedule(c.unit_spacing());
  const auto box = fit_dimension(box_count_curve(c, sched), band).dimension;
  const auto osc = oscillation_dimension(c, sched, band).dimension;
  for (double alpha : {10.0, -3.5, 1e-3}) {
    SampledCurve t = c;
    for (double& y : t.ys) y = alpha * y + 7.25;
    for (double& x : t.xs) x = 3.0 * x - 1.0;
    CAPTURE(alpha);
    CHECK(fit_dimension(box_count_curve(t, sched), band).dimension == doctest::Approx(box).epsilon(1e-6));
    CHECK(oscillation_dimension(t, sched, band).dimension == doctest::Approx(osc).epsilon(1e-9));
  }
}

TEST_CASE("oscillation profile of a line") {
  const auto c = sample([](double x) { return 2.0 * x; }, 0.0, 1.0, 1025);
  const double tau[] = {0.25, 0.125};
  const auto prof = oscillation_profile(c, tau);
  CHECK(prof[0].value == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(prof[1].value == doctest::Approx(0.125).epsilon(1e-12));
}

TEST_CASE("surface: planes are two-dimensional") {
  wavefield::CarpetField flat, tilted;
  const auto xs = wavefield::UniformGrid{0.0, 1.0, 1025}.nodes();
  flat.x_grid = tilted.x_grid = xs;
  flat.t_grid = tilted.t_grid = xs;
  flat.values.assign(xs.size() * xs.size(), 0.4);
  tilted.values.resize(xs.size() * xs.size());
  for (std::size_t it = 0; it < xs.size(); ++it)
    for (std::size_t ix = 0; ix < xs.size(); ++ix) tilted(it, ix) = xs[ix] + 0.5 * xs[it];
  const auto sched = default_eps_schedule(1.0 / 1024);
  const ScalingBand all{sched.back(), sched.front()};
  CHECK(std::abs(box_count_surface(flat, sched, all).dimension - 2.0) <= 0.05);
  CHECK(std::abs(box_count_surface(tilted, sched, all).dimension - 2.0) <= 0.05);
  const auto counts = box_count_surface_counts(flat, sched);
  for (const auto& p : counts) CHECK(p.value == std::pow(std::ceil(1.0 / p.scale - 1e-9), 2));
}

TEST_CASE("surface counts match a cell-by-cell oracle on aligned grids") {
  wavefield::CarpetField f;
  const std::size_t n = 1025;
  f.x_grid = f.t_grid = wavefield::UniformGrid{0.0, 1.0, n}.nodes();
  f.values.resize(n * n);
  for (std::size_t it = 0; it < n; ++it)
    for (std::size_t ix = 0; ix < n; ++ix)
      f(it, ix) = std::sin(0.013 * ix * ix + 0.7 * it) + std::cos(0.031 * it * ix) * 0.3;
  double lo = 1e300, hi = -1e300;
  for (double v : f.values) lo = std::min(lo, v), hi = std::max(hi, v);
  for (int k : {3, 5, 7}) {
    const double eps = std::exp2(-k);
    const std::size_t cells = std::size_t{1} << k, step = (n - 1) / cells;
    double oracle = 0.0;
    for (std::size_t ct = 0; ct < cells; ++ct) {
      for (std::size_t cx = 0; cx < cells; ++cx) {
        double a = 1e300, b = -1e300;
        for (std::size_t it = ct * step; it <= (ct + 1) * step; ++it)
          for (std::size_t ix = cx * step; ix <= (cx + 1) * step; ++ix) {
            const double v = (f(it, ix) - lo) / (hi - lo);
            a = std::min(a, v);
            b = std::max(b, v);
          }
        const auto top = static_cast<double>(cells - 1);
        oracle += std::min(std::floor(b / eps), top) - std::min(std::floor(a / eps), top) + 1;
      }
    }
    const double e[] = {eps};
    CAPTURE(k);
    CHECK(box_count_surface_counts(f, e, 2)[0].value == oracle);
  }
}

TEST_CASE("surface: small grids are rejected") {
  wavefield::CarpetField f;
  f.x_grid = f.t_grid = wavefield::UniformGrid{0.0, 1.0, 513}.nodes();
  f.values.assign(513 * 513, 1.0);
  const double e[] = {0.125};
  CHECK_THROWS_AS(box_count_surface_counts(f, e), DomainError);
}

TEST_CASE("surface: low-s well carpet") {
  wavefield::SuperpositionSpec spec;
  spec.s = 0.5;
  spec.M = 16;
  const auto c = wavefield::sample_carpet(spec, {0.0, kPi, 2049}, {0.0, 2.0 * kPi / 3.0, 2049}, 2);
  const auto sched = default_eps_schedule(1.0 / 2048);
  const double d = box_count_surface(c.density, sched, ScalingBand{sched.back(), sched.front()}, 2).dimension;
  CHECK(d >= 2.0);
  CHECK(d <= 2.35);
}
