#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "qcarpet/errors.hpp"
#include "qcarpet/wavefield.hpp"

using namespace qcarpet;
using namespace qcarpet::wavefield;

namespace {

constexpr double kPi = std::numbers::pi;

SuperpositionSpec make(System sys, double s, int M, int q = 2) {
  SuperpositionSpec spec;
  spec.system = sys;
  spec.s = s;
  spec.M = M;
  spec.q = q;
  return spec;
}

std::string validation_message(const SuperpositionSpec& spec) {
  try {
    validate(spec);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return {};
}

// Gaussian wave packet e^{-x^2/4 + i k x} evolved freely under i d/dt = -d^2/dx^2.
Complex free_packet(double k, double x, double t) {
  const Complex one_it(1.0, t);
  const Complex expo = (-x * x / 4.0 + Complex(0, 1) * k * x - Complex(0, 1) * k * k * t) / one_it;
  return std::exp(expo) / std::sqrt(one_it);
}

}  // namespace

TEST_CASE("validation names the violated constraint") {
  CHECK(validation_message(make(System::Oscillator, 1.9, 4)).find("1 < s < 3/2") != std::string::npos);
  CHECK(validation_message(make(System::Oscillator, 1.0, 4)).find("1 < s < 3/2") != std::string::npos);
  CHECK(validation_message(make(System::Well, 2.0, 4)).find("0 < s < 2") != std::string::npos);
  CHECK(validation_message(make(System::Well, 0.0, 4)).find("0 < s < 2") != std::string::npos);
  CHECK(validation_message(make(System::Well, 1.5, 4, 1)).find("q must be") != std::string::npos);
  auto pl = make(System::PowerLaw, 1.6, 3);
  pl.alpha = 2.0;
  CHECK(validation_message(pl).find("2 - 1/alpha") != std::string::npos);
  pl.s = 1.4;
  CHECK(validation_message(pl).empty());
  CHECK(validation_message(make(System::Well, 1.5, 70)).find("q^M") != std::string::npos);
  CHECK_THROWS_AS(system_from_string("box"), ValidationError);
  CHECK(system_from_string("oscillator") == System::Oscillator);
}

TEST_CASE("well normalization") {
  CHECK(well_normalization(2, 1.5) == doctest::Approx(0.5641896).epsilon(1e-7));
  CHECK(well_normalization(2, 1.5) == doctest::Approx(1.0 / std::sqrt(kPi)).epsilon(1e-15));
}

TEST_CASE("well boundaries vanish identically") {
  const Superposition sup(make(System::Well, 1.5, 16));
  for (double t : {0.0, 0.3, 1.7, 100.0}) {
    CHECK(sup.psi(Position(0.0), t) == Complex(0.0, 0.0));
    CHECK(sup.psi(Position(kPi), t) == Complex(0.0, 0.0));
    CHECK(sup.psi(parse_position("pi"), t) == Complex(0.0, 0.0));
  }
}

TEST_CASE("single well term is stationary") {
  const auto spec = make(System::Well, 1.5, 0);
  const Superposition sup(spec);
  const double N = 1.0 / std::sqrt(kPi);
  for (double x : {0.1, 1.0, 2.5}) {
    for (double t : {0.0, 0.4, 3.0}) {
      const Complex expected = N * std::sin(x) * std::exp(Complex(0, -t));
      const Complex got = sup.psi(Position(x), t);
      CHECK(std::abs(got - expected) < 1e-15);
      CHECK(std::norm(got) == doctest::Approx(N * N * std::sin(x) * std::sin(x)).epsilon(1e-14));
    }
  }
}

TEST_CASE("well series matches a direct sum") {
  const auto spec = make(System::Well, 1.2, 6, 3);
  const Superposition sup(spec);
  for (double x : {0.2, 1.1, 2.9}) {
    for (double t : {0.0, 0.05, 0.8}) {
      Complex direct = 0.0;
      for (int n = 0; n <= 6; ++n) {
        const double k = std::pow(3.0, n);
        direct += std::pow(3.0, n * (1.2 - 2.0)) * std::sin(k * x) * std::exp(Complex(0, -k * k * t));
      }
      direct *= well_normalization(3, 1.2);
      CHECK(std::abs(sup.psi(Position(x), t) - direct) < 1e-12);
    }
  }
}

TEST_CASE("norm is conserved") {
  const auto well = make(System::Well, 1.5, 10);
  // sines are orthogonal on [0, pi]: N^2 (pi/2) sum_{n<=M} q^{2n(s-2)} = 1 - q^{2(s-2)(M+1)}
  const double truncated = 1.0 - std::pow(2.0, 2.0 * (1.5 - 2.0) * 11);
  for (double t : {0.0, 0.7, 1.7}) CHECK(std::abs(norm_check(well, t) - truncated) < 1e-10);
  CHECK(norm_check(well, 0.7) == doctest::Approx(norm_check(well, 0.0)).epsilon(1e-12));

  const auto osc = make(System::Oscillator, 1.25, 3);
  for (double t : {0.0, 0.3, 2.0}) CHECK(std::abs(norm_check(osc, t) - 1.0) < 1e-8);

  const auto free = make(System::FreeGaussian, 1.5, 5);
  for (double t : {0.0, 0.2}) CHECK(std::abs(norm_check(free, t) - 1.0) < 1e-8);
}

TEST_CASE("a narrow window is reported") {
  const auto free = make(System::FreeGaussian, 1.5, 5);
  NormWindow narrow{-2.0, 2.0, 4097};
  try {
    norm_check(free, 0.0, narrow);
    FAIL("expected WindowTooSmall");
  } catch (const NumericalError& e) {
    CHECK(e.kind() == NumericalError::Kind::WindowTooSmall);
  }
}

TEST_CASE("free packet matches Gaussian propagation") {
  const auto spec = make(System::FreeGaussian, 1.5, 3);
  const Superposition sup(spec);
  for (double x : {-2.0, 0.0, 0.6, 3.3}) {
    for (double t : {0.0, 0.15, 0.6}) {
      Complex direct = 0.0;
      for (int n = 0; n <= 3; ++n) {
        const double k = std::pow(2.0, n);
        direct += std::pow(2.0, n * (1.5 - 2.0)) *
                  (free_packet(k, x, t) - free_packet(-k, x, t)) / Complex(0, 2);
      }
      direct *= sup.normalization();
      CHECK(std::abs(sup.psi(Position(x), t) - direct) < 1e-12);
    }
  }
  // initial state: Gaussian envelope times the well-type series
  for (double x : {-1.0, 0.4}) {
    double direct = 0.0;
    for (int n = 0; n <= 3; ++n) direct += std::pow(2.0, -0.5 * n) * std::sin(std::pow(2.0, n) * x);
    direct *= sup.normalization() * std::exp(-x * x / 4.0);
    CHECK(sup.psi(Position(x), 0.0).real() == doctest::Approx(direct).epsilon(1e-13));
  }
}

TEST_CASE("free packet obeys the free Schroedinger equation") {
  const Superposition sup(make(System::FreeGaussian, 1.3, 2));
  const double h = 1e-3;
  for (double x : {-0.8, 0.5, 1.9}) {
    for (double t : {0.1, 0.35}) {
      auto f = [&](double xx, double tt) { return sup.psi(Position(xx), tt); };
      const Complex dt = (-f(x, t + 2 * h) + 8.0 * f(x, t + h) - 8.0 * f(x, t - h) + f(x, t - 2 * h)) / (12 * h);
      const Complex dxx = (-f(x + 2 * h, t) + 16.0 * f(x + h, t) - 30.0 * f(x, t) + 16.0 * f(x - h, t) -
                           f(x - 2 * h, t)) / (12 * h * h);
      CHECK(std::abs(Complex(0, 1) * dt + dxx) < 1e-6);
    }
  }
}

TEST_CASE("free term magnitudes stay bounded for large wavenumbers") {
  const Superposition sup(make(System::FreeGaussian, 1.5, 40));
  for (double t : {0.0, 0.01, 0.5, 10.0}) {
    for (double x : {-3.0, 0.0, 2.0}) {
      const Complex v = sup.psi(Position(x), t);
      CHECK(std::isfinite(v.real()));
      CHECK(std::isfinite(v.imag()));
    }
  }
  // |exp(-i k^2 t / (1 + i t))| = exp(-k^2 t^2 / (1 + t^2))
  const double k = 32.0, t = 0.3;
  const Complex z = std::exp(Complex(0, -1) * k * k * t / Complex(1.0, t));
  CHECK(std::abs(z) == doctest::Approx(std::exp(-k * k * t * t / (1 + t * t))).epsilon(1e-12));
  const Superposition narrow(make(System::FreeGaussian, 1.5, 4));
  CHECK(std::abs(narrow.psi(Position(60.0), 0.5)) < 1e-50);
  CHECK_THROWS_AS(
      [] {
        auto bad = make(System::FreeGaussian, 1.5, 4);
        bad.sigma_units = false;
        validate(bad);
      }(),
      ValidationError);
}

TEST_CASE("oscillator density is even in x") {
  const Superposition sup(make(System::Oscillator, 1.25, 8));
  CHECK(sup.indices().back() == 65536);
  for (double x : {0.05, 0.7, 3.3, 6.1}) {
    for (double t : {0.0, 0.013, 0.4}) {
      const double p = std::norm(sup.psi(Position(x), t));
      const double m = std::norm(sup.psi(Position(-x), t));
      CHECK(p == doctest::Approx(m).epsilon(1e-12).scale(1e-12));
    }
  }
}

TEST_CASE("oscillator coefficients and asymptotic branch") {
  const auto spec = make(System::Oscillator, 1.25, 15);
  const Superposition sup(spec);
  CHECK(sup.indices().back() == (std::int64_t{1} << 30));
  CHECK(sup.energies().back() == doctest::Approx(std::pow(2.0, 30) + 0.5));
  // n^{-1/4} amplitude of the asymptotic eigenfunction restores q^{n(s-2)}
  for (std::size_t k = 0; k < sup.terms(); ++k) {
    const double n = static_cast<double>(sup.indices()[k]);
    CHECK(sup.coefficients()[k] * std::pow(n, -0.25) ==
          doctest::Approx(std::pow(2.0, (k + 1) * (1.25 - 2.0))).epsilon(1e-12));
  }
  CHECK(sup.density_period().value() == doctest::Approx(2 * kPi / 12.0));
}

TEST_CASE("power-law indices and window") {
  auto spec = make(System::PowerLaw, 1.2, 3);
  spec.alpha = 2.0;
  const Superposition sup(spec);
  CHECK(sup.indices()[2] == 64);
  CHECK(sup.coefficients()[0] == doctest::Approx(std::pow(2.0, 1.2 - 1.5)));
  CHECK(!sup.density_period().has_value());
  const double lim = sup.wkb_window_limit();
  CHECK(lim == doctest::Approx(0.5 * std::sqrt(4.0)));
  CHECK_NOTHROW(sup.psi(Position(0.99 * lim), 0.1));
  CHECK_THROWS_AS(sup.psi(Position(1.01 * lim), 0.1), ValidationError);

  auto num = spec;
  num.numerov_low_states = true;
  const Superposition with_numerov(num);
  CHECK(std::isinf(with_numerov.wkb_window_limit()));
  CHECK(std::isfinite(std::norm(with_numerov.psi(Position(0.3), 0.2))));
}

TEST_CASE("exact positions") {
  const auto p = Position::pi_fraction(1, 8);
  CHECK(p.sin_multiple(8) == 0.0);
  CHECK(p.sin_multiple(48) == 0.0);
  CHECK(p.sin_multiple(4) == 1.0);
  CHECK(p.sin_multiple(12) == -1.0);
  CHECK(p.cos_multiple(16) == 1.0);
  CHECK(p.sin_multiple(std::int64_t{1} << 40) == 0.0);
  CHECK(p.sin_multiple(3) == doctest::Approx(std::sin(3 * kPi / 8)).epsilon(1e-15));
  CHECK(p.value() == doctest::Approx(kPi / 8));

  CHECK(Position(kPi).exact().has_value());
  CHECK(Position(0.0).exact().has_value());
  CHECK(!Position(1.0).exact().has_value());

  const auto a = parse_position("3*pi/16");
  const auto b = parse_position("3pi/16");
  REQUIRE(a.exact());
  REQUIRE(b.exact());
  CHECK(a.exact()->numerator == 3);
  CHECK(b.exact()->denominator == 16);
  CHECK(parse_position("pi/8").value() == doctest::Approx(kPi / 8));
  CHECK(parse_position("-pi/4").value() == doctest::Approx(-kPi / 4));
  CHECK(parse_position("1.25").value() == 1.25);
  CHECK_THROWS_AS(parse_position("abc"), ValidationError);
  CHECK_THROWS_AS(parse_position("pi/0"), std::exception);
}

TEST_CASE("dyadic positions truncate the well series exactly") {
  const Superposition sup(make(System::Well, 1.5, 16));
  std::vector<double> f(sup.terms());
  sup.spatial_factors(Position::pi_fraction(1, 8), f);
  for (std::size_t n = 3; n < f.size(); ++n) CHECK(f[n] == 0.0);
  CHECK(f[2] != 0.0);
}

TEST_CASE("grids refine without moving nodes") {
  const UniformGrid coarse{-1.3, 2.9, 65}, fine{-1.3, 2.9, 129};
  CHECK(coarse.at(64) == 2.9);
  for (std::size_t i = 0; i < coarse.n; ++i) CHECK(fine.at(2 * i) == coarse.at(i));

  const auto spec = make(System::Well, 1.5, 10);
  const auto a = sample_carpet(spec, {0.0, kPi, 65}, {0.0, 1.0, 17});
  const auto b = sample_carpet(spec, {0.0, kPi, 129}, {0.0, 1.0, 33});
  for (std::size_t it = 0; it < 17; ++it)
    for (std::size_t ix = 0; ix < 65; ++ix) CHECK(a.density(it, ix) == b.density(2 * it, 2 * ix));
}

TEST_CASE("carpet sampling is independent of the thread count") {
  for (auto spec : {make(System::Well, 1.5, 12), make(System::Oscillator, 1.25, 6),
                    make(System::FreeGaussian, 1.5, 6)}) {
    const UniformGrid xg = spec.system == System::Well ? UniformGrid{0.0, kPi, 257} : UniformGrid{-4.0, 4.0, 257};
    const UniformGrid tg{0.0, 0.5, 33};
    const auto one = sample_carpet(spec, xg, tg, 1);
    const auto three = sample_carpet(spec, xg, tg, 3);
    CHECK(one.density.values == three.density.values);
    CHECK(one.psi.values == three.psi.values);
    const Superposition sup(spec);
    CHECK(density_x_cut(sup, xg, 0.25, 1) == density_x_cut(sup, xg, 0.25, 4));
    CHECK(density_t_cut(sup, Position(1.0), tg, 1) == density_t_cut(sup, Position(1.0), tg, 2));
  }
}

TEST_CASE("carpet density is |psi|^2 and the well carpet is periodic") {
  const auto spec = make(System::Well, 1.5, 8);
  const auto c = sample_carpet(spec, {0.0, kPi, 33}, {0.0, 1.0, 9});
  for (std::size_t i = 0; i < c.density.values.size(); ++i)
    CHECK(c.density.values[i] == std::norm(c.psi.values[i]));
  for (std::size_t it = 0; it < 9; ++it) {
    CHECK(c.density(it, 0) == 0.0);
    CHECK(c.density(it, 32) == 0.0);
  }
  const Superposition sup(spec);
  const double period = sup.density_period().value();
  CHECK(period == doctest::Approx(2 * kPi / 3));
  for (double x : {0.4, 1.3, 2.2}) {
    for (double t : {0.0, 0.77}) {
      const double p0 = std::norm(sup.psi(Position(x), t));
      const double p1 = std::norm(sup.psi(Position(x), t + period));
      CHECK(p1 == doctest::Approx(p0).epsilon(1e-9).scale(1e-9));
    }
  }
}

TEST_CASE("compensated summation agrees with plain summation") {
  auto spec = make(System::Well, 1.5, 16);
  const Superposition plain(spec);
  spec.compensated = true;
  const Superposition comp(spec);
  for (double x : {0.3, 1.0, 2.0})
    for (double t : {0.0, 0.1}) CHECK(std::abs(plain.psi(Position(x), t) - comp.psi(Position(x), t)) < 1e-13);
}

TEST_CASE("out-of-domain positions are rejected with coordinates") {
  const auto spec = make(System::Well, 1.5, 4);
  const Superposition sup(spec);
  CHECK_THROWS_AS(sup.psi(Position(-0.1), 0.0), DomainError);
  try {
    sample_carpet(spec, {-1.0, 1.0, 5}, {0.0, 1.0, 3});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("x = ") != std::string::npos);
  }
}
