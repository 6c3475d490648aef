#include "qcarpet/wavefield.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qcarpet/errors.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet::wavefield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kMaxIndex = std::int64_t{1} << 62;
constexpr std::int64_t kNumerovLimit = 500;

// q^e as an exact integer, or -1 if it exceeds kMaxIndex.
std::int64_t int_pow(std::int64_t q, int e) {
  std::int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (r > kMaxIndex / q) return -1;
    r *= q;
  }
  return r;
}

// Integer part of q^x, robust to pow() landing just below an integer.
std::int64_t integer_part_pow(double q, double x) {
  const double y = std::pow(q, x);
  const double r = std::round(y);
  if (std::abs(y - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::int64_t>(r);
  return static_cast<std::int64_t>(std::floor(y));
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

struct Neumaier {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace

const char* to_string(System s) {
  switch (s) {
    case System::Well: return "well";
    case System::Oscillator: return "oscillator";
    case System::PowerLaw: return "powerlaw";
    case System::FreeGaussian: return "free";
  }
  return "unknown";
}

System system_from_string(const std::string& name) {
  if (name == "well") return System::Well;
  if (name == "oscillator") return System::Oscillator;
  if (name == "powerlaw") return System::PowerLaw;
  if (name == "free") return System::FreeGaussian;
  throw ValidationError("unknown system '" + name + "' (expected well|oscillator|powerlaw|free)");
}

void validate(const SuperpositionSpec& spec) {
  if (spec.q < 2) throw ValidationError("q must be an integer >= 2, got " + std::to_string(spec.q));
  if (spec.M < 0) throw ValidationError("M (number of terms minus one) must be >= 0");
  if (!std::isfinite(spec.s)) throw ValidationError("s must be finite");
  switch (spec.system) {
    case System::Well:
      if (!(spec.s > 0.0 && spec.s < 2.0)) {
        throw ValidationError("well requires 0 < s < 2, got s = " + fmt(spec.s));
      }
      if (int_pow(spec.q, spec.M) < 0) throw ValidationError("well requires q^M <= 2^62");
      break;
    case System::Oscillator:
      if (!(spec.s > 1.0 && spec.s < 1.5)) {
        throw ValidationError("oscillator requires 1 < s < 3/2, got s = " + fmt(spec.s));
      }
      if (spec.M < 1) throw ValidationError("oscillator requires M >= 1 (sum starts at n = 1)");
      if (int_pow(spec.q, 2 * spec.M) < 0) {
        throw ValidationError("oscillator requires q^(2M) <= 2^62");
      }
      break;
    case System::PowerLaw: {
      if (!(spec.alpha > 0.0) || !std::isfinite(spec.alpha)) {
        throw ValidationError("power-law requires a finite alpha > 0, got alpha = " + fmt(spec.alpha));
      }
      const double upper = 2.0 - 1.0 / spec.alpha;
      if (!(spec.s > 0.0 && spec.s < upper)) {
        throw ValidationError("power-law requires 0 < s < 2 - 1/alpha = " + fmt(upper) +
                              ", got s = " + fmt(spec.s));
      }
      if (spec.M < 1) throw ValidationError("power-law requires M >= 1 (sum starts at n = 1)");
      if (std::pow(static_cast<double>(spec.q), (1.0 + 2.0 / spec.alpha) * spec.M) > 0x1p62) {
        throw ValidationError("power-law requires b_M = q^((1 + 2/alpha) M) <= 2^62");
      }
      break;
    }
    case System::FreeGaussian:
      if (!(spec.s > 0.0 && spec.s < 2.0)) {
        throw ValidationError("free particle requires 0 < s < 2, got s = " + fmt(spec.s));
      }
      if (!spec.sigma_units) {
        throw ValidationError("free particle is defined in sigma units only (sigma_units = true)");
      }
      if (int_pow(spec.q, spec.M) < 0) throw ValidationError("free particle requires q^M <= 2^62");
      break;
  }
}

// Position --------------------------------------------------------------------

Position::Position(double x) : value_(x) {
  if (x == 0.0) {
    exact_ = PiFraction{0, 1};
  } else if (x == kPi) {
    exact_ = PiFraction{1, 1};
  }
}

Position Position::pi_fraction(std::int64_t numerator, std::int64_t denominator) {
  if (denominator <= 0) throw DomainError("pi_fraction: denominator must be positive");
  if (denominator > (std::int64_t{1} << 61)) throw DomainError("pi_fraction: denominator too large");
  Position p(kPi * static_cast<double>(numerator) / static_cast<double>(denominator));
  p.exact_ = PiFraction{numerator, denominator};
  return p;
}

namespace {
// (a * b) mod m for 0 <= a, b < m <= 2^62, without overflow.
std::int64_t mul_mod(std::int64_t a, std::int64_t b, std::int64_t m) {
  std::int64_t r = 0;
  while (b > 0) {
    if (b & 1) r = (r + a) % m;
    a = (a + a) % m;
    b >>= 1;
  }
  return r;
}

// (multiplier * numerator) mod (2 * denominator), in [0, 2 den).
std::int64_t reduce_phase(std::int64_t multiplier, const PiFraction& f) {
  const std::int64_t period = 2 * f.denominator;
  auto wrap = [&](std::int64_t v) { return ((v % period) + period) % period; };
  return mul_mod(wrap(multiplier), wrap(f.numerator), period);
}
}  // namespace

double Position::sin_multiple(std::int64_t multiplier) const {
  if (!exact_) return std::sin(static_cast<double>(multiplier) * value_);
  const std::int64_t r = reduce_phase(multiplier, *exact_);
  const std::int64_t den = exact_->denominator;
  if (r == 0 || r == den) return 0.0;
  if (2 * r == den) return 1.0;
  if (2 * r == 3 * den) return -1.0;
  return std::sin(kPi * static_cast<double>(r) / static_cast<double>(den));
}

double Position::cos_multiple(std::int64_t multiplier) const {
  if (!exact_) return std::cos(static_cast<double>(multiplier) * value_);
  const std::int64_t r = reduce_phase(multiplier, *exact_);
  const std::int64_t den = exact_->denominator;
  if (r == 0) return 1.0;
  if (r == den) return -1.0;
  if (2 * r == den || 2 * r == 3 * den) return 0.0;
  return std::cos(kPi * static_cast<double>(r) / static_cast<double>(den));
}

Position parse_position(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
  }
  auto fail = [&]() -> Position {
    throw ValidationError("cannot parse position '" + text + "' (use a number or k*pi/d)");
  };
  if (s.empty()) return fail();
  const auto at = s.find("pi");
  if (at == std::string::npos) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != s.size()) return fail();
    return Position(v);
  }
  std::string coef = s.substr(0, at);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  std::int64_t num = 1;
  if (coef == "-") {
    num = -1;
  } else if (!coef.empty()) {
    std::size_t used = 0;
    try {
      num = std::stoll(coef, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != coef.size()) return fail();
  }
  std::int64_t den = 1;
  std::string rest = s.substr(at + 2);
  if (!rest.empty()) {
    if (rest.front() != '/') return fail();
    rest.erase(0, 1);
    std::size_t used = 0;
    try {
      den = std::stoll(rest, &used);
    } catch (const std::exception&) {
      return fail();
    }
    if (used != rest.size() || den <= 0) return fail();
  }
  return Position::pi_fraction(num, den);
}

// UniformGrid -----------------------------------------------------------------

double UniformGrid::at(std::size_t i) const {
  if (i + 1 >= n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

std::vector<double> UniformGrid::nodes() const {
  if (n < 2) throw DomainError("UniformGrid: at least two nodes required");
  if (!(hi > lo)) throw DomainError("UniformGrid: hi must exceed lo");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i);
  return out;
}

// Superposition ---------------------------------------------------------------

double well_normalization(int q, double s) {
  return std::sqrt((2.0 / kPi) * (1.0 - std::pow(static_cast<double>(q), 2.0 * (s - 2.0))));
}

Superposition::Superposition(const SuperpositionSpec& spec) : spec_(spec) {
  validate(spec_);
  const double q = spec_.q;
  switch (spec_.system) {
    case System::Well:
    case System::FreeGaussian:
      for (int n = 0; n <= spec_.M; ++n) {
        const std::int64_t k = int_pow(spec_.q, n);
        indices_.push_back(k);
        coeffs_.push_back(std::pow(q, n * (spec_.s - 2.0)));
        const double kd = static_cast<double>(k);
        energies_.push_back(kd * kd);
      }
      break;
    case System::Oscillator:
      for (int n = 1; n <= spec_.M; ++n) {
        const std::int64_t idx = int_pow(spec_.q, 2 * n);
        indices_.push_back(idx);
        coeffs_.push_back(std::pow(q, n * (spec_.s - 1.5)));
        energies_.push_back(static_cast<double>(idx) + 0.5);
        if (idx <= eigenbasis::kHermiteSwitch) {
          hermite_terms_.push_back(indices_.size() - 1);
          hermite_indices_.push_back(idx);
        }
      }
      break;
    case System::PowerLaw: {
      const auto ex = eigenbasis::wkb_exponents(spec_.alpha);
      wkb_limit_ = std::numeric_limits<double>::infinity();
      for (int n = 1; n <= spec_.M; ++n) {
        const std::int64_t b = integer_part_pow(q, (1.0 + 2.0 / spec_.alpha) * n);
        indices_.push_back(b);
        coeffs_.push_back(std::pow(q, n * (spec_.s - 2.0 + 1.0 / spec_.alpha)));
        energies_.push_back(std::pow(static_cast<double>(b), ex.beta));
        if (spec_.numerov_low_states && b <= kNumerovLimit) {
          numerov_states_.push_back(eigenbasis::numerov_solve(spec_.alpha, b));
        } else {
          wkb_limit_ = std::min(wkb_limit_, 0.5 * eigenbasis::powerlaw_turning_point(spec_.alpha, b));
        }
      }
      break;
    }
  }

  if (spec_.system == System::Well) {
    norm_ = well_normalization(spec_.q, spec_.s);
  } else if (spec_.system == System::FreeGaussian) {
    // int exp(-x^2/2) sin(a x) sin(b x) dx = sqrt(2 pi)/2 (e^{-(a-b)^2/2} - e^{-(a+b)^2/2})
    const double half_root = 0.5 * std::sqrt(2.0 * kPi);
    double total = 0.0;
    for (std::size_t m = 0; m < coeffs_.size(); ++m) {
      const double km = static_cast<double>(indices_[m]);
      for (std::size_t n = 0; n < coeffs_.size(); ++n) {
        const double kn = static_cast<double>(indices_[n]);
        total += coeffs_[m] * coeffs_[n] * half_root *
                 (std::exp(-0.5 * (km - kn) * (km - kn)) - std::exp(-0.5 * (km + kn) * (km + kn)));
      }
    }
    norm_ = 1.0 / std::sqrt(total);
  } else {
    // Orthonormal eigenstates: |Psi|^2 integrates to N^2 sum c_n^2.
    double total = 0.0;
    for (double c : coeffs_) total += c * c;
    norm_ = 1.0 / std::sqrt(total);
  }
}

double Superposition::wkb_window_limit() const {
  return spec_.system == System::PowerLaw ? wkb_limit_ : std::numeric_limits<double>::infinity();
}

void Superposition::check_position(const Position& x) const {
  const double v = x.value();
  if (!std::isfinite(v)) throw DomainError("position must be finite");
  if (spec_.system == System::Well && !(v >= 0.0 && v <= kPi)) {
    throw DomainError("well_psi: x must lie in [0, pi], got " + fmt(v));
  }
  if (spec_.system == System::PowerLaw && std::abs(v) > wkb_limit_) {
    throw ValidationError("power-law sampling window must stay inside half the turning point of the "
                          "lowest WKB state: |x| <= " + fmt(wkb_limit_) + ", got x = " + fmt(v));
  }
}

void Superposition::spatial_factors(const Position& x, std::span<double> out) const {
  if (!separable()) throw DomainError("spatial_factors: free particle is not separable");
  check_position(x);
  const std::size_t K = terms();
  switch (spec_.system) {
    case System::Well:
      for (std::size_t k = 0; k < K; ++k) out[k] = x.sin_multiple(indices_[k]);
      break;
    case System::Oscillator: {
      const std::size_t h = hermite_indices_.size();
      eigenbasis::hermite_eigenstates(x.value(), hermite_indices_, out.first(h));
      for (std::size_t k = h; k < K; ++k) {
        out[k] = eigenbasis::wkb_oscillator_matched(indices_[k], x.value());
      }
      break;
    }
    case System::PowerLaw: {
      const std::size_t low = numerov_states_.size();
      for (std::size_t k = 0; k < low; ++k) out[k] = numerov_states_[k](x.value());
      for (std::size_t k = low; k < K; ++k) {
        out[k] = eigenbasis::wkb_powerlaw_eigenstate(spec_.alpha, indices_[k], x.value());
      }
      break;
    }
    case System::FreeGaussian: break;
  }
  for (std::size_t k = 0; k < K; ++k) out[k] *= norm_ * coeffs_[k];
}

void Superposition::temporal_factors(double t, std::span<Complex> out) const {
  for (std::size_t k = 0; k < terms(); ++k) {
    const double phase = energies_[k] * t;
    out[k] = Complex(std::cos(phase), -std::sin(phase));
  }
}

Complex Superposition::combine(std::span<const double> spatial,
                               std::span<const Complex> temporal) const {
  if (spec_.compensated) {
    Neumaier re, im;
    for (std::size_t k = 0; k < spatial.size(); ++k) {
      re.add(spatial[k] * temporal[k].real());
      im.add(spatial[k] * temporal[k].imag());
    }
    return {re.value(), im.value()};
  }
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < spatial.size(); ++k) {
    re += spatial[k] * temporal[k].real();
    im += spatial[k] * temporal[k].imag();
  }
  return {re, im};
}

Complex Superposition::free_gaussian(double x, double t) const {
  // Each term is a pair of Gaussian packets centred at +-2 q^n t. The sine
  // and the envelope are combined in the exponent so nothing overflows.
  const double denom = 1.0 + t * t;
  const double quad = t * x * x / 4.0;
  double re = 0.0, im = 0.0;
  Neumaier cre, cim;
  for (std::size_t n = 0; n < terms(); ++n) {
    const double k = static_cast<double>(indices_[n]);
    const double base = -k * k * t + quad;
    const double dp = x - 2.0 * k * t;
    const double dm = x + 2.0 * k * t;
    const double mag_p = std::exp(-dp * dp / (4.0 * denom));
    const double mag_m = std::exp(-dm * dm / (4.0 * denom));
    const double ph_p = (x * k + base) / denom;
    const double ph_m = (-x * k + base) / denom;
    // (e^{E+} - e^{E-}) / (2i)
    const double diff_re = mag_p * std::cos(ph_p) - mag_m * std::cos(ph_m);
    const double diff_im = mag_p * std::sin(ph_p) - mag_m * std::sin(ph_m);
    const double term_re = coeffs_[n] * 0.5 * diff_im;
    const double term_im = -coeffs_[n] * 0.5 * diff_re;
    if (spec_.compensated) {
      cre.add(term_re);
      cim.add(term_im);
    } else {
      re += term_re;
      im += term_im;
    }
  }
  if (spec_.compensated) {
    re = cre.value();
    im = cim.value();
  }
  return norm_ / std::sqrt(Complex(1.0, t)) * Complex(re, im);
}

Complex Superposition::psi(const Position& x, double t) const {
  if (!separable()) {
    check_position(x);
    return free_gaussian(x.value(), t);
  }
  std::vector<double> spatial(terms());
  std::vector<Complex> temporal(terms());
  spatial_factors(x, spatial);
  temporal_factors(t, temporal);
  return combine(spatial, temporal);
}

double Superposition::max_wavenumber() const {
  const double top = static_cast<double>(indices_.back());
  switch (spec_.system) {
    case System::Well:
    case System::FreeGaussian: return top;
    case System::Oscillator: return std::sqrt(top + 0.5);
    case System::PowerLaw: return std::pow(top, 0.5 * eigenbasis::wkb_exponents(spec_.alpha).beta);
  }
  return top;
}

double Superposition::max_density_frequency() const {
  return energies_.back() - energies_.front();
}

std::optional<double> Superposition::density_period() const {
  const double q2 = static_cast<double>(spec_.q) * spec_.q;
  if (spec_.system == System::Well) return 2.0 * kPi / (q2 - 1.0);
  if (spec_.system == System::Oscillator) return 2.0 * kPi / (q2 * (q2 - 1.0));
  return std::nullopt;
}

Complex well_psi(const SuperpositionSpec& spec, const Position& x, double t) {
  if (spec.system != System::Well) throw DomainError("well_psi: spec.system must be Well");
  return Superposition(spec).psi(x, t);
}

Complex oscillator_psi(const SuperpositionSpec& spec, const Position& x, double t) {
  if (spec.system != System::Oscillator) {
    throw DomainError("oscillator_psi: spec.system must be Oscillator");
  }
  return Superposition(spec).psi(x, t);
}

Complex powerlaw_psi(const SuperpositionSpec& spec, const Position& x, double t) {
  if (spec.system != System::PowerLaw) throw DomainError("powerlaw_psi: spec.system must be PowerLaw");
  return Superposition(spec).psi(x, t);
}

Complex free_gaussian_psi(const SuperpositionSpec& spec, const Position& x, double t) {
  if (spec.system != System::FreeGaussian) {
    throw DomainError("free_gaussian_psi: spec.system must be FreeGaussian");
  }
  return Superposition(spec).psi(x, t);
}

// Sampling --------------------------------------------------------------------

namespace {

void check_grid(const UniformGrid& g, const char* axis) {
  if (g.n < 2 || !(g.hi > g.lo) || !std::isfinite(g.lo) || !std::isfinite(g.hi)) {
    throw DomainError(std::string(axis) + " grid must have >= 2 nodes and lo < hi");
  }
}

template <typename Fn>
void with_coordinates(const char* what, double x, double t, Fn&& fn) {
  try {
    fn();
  } catch (const DomainError& e) {
    throw DomainError(std::string(what) + " at (x = " + fmt(x) + ", t = " + fmt(t) + "): " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(what) + " at (x = " + fmt(x) + ", t = " + fmt(t) + "): " +
                          e.what());
  }
}

}  // namespace

SampledCarpet sample_carpet(const SuperpositionSpec& spec, const UniformGrid& x_grid,
                            const UniformGrid& t_grid, unsigned threads) {
  check_grid(x_grid, "x");
  check_grid(t_grid, "t");
  const Superposition sup(spec);
  SampledCarpet out;
  out.psi.x_grid = x_grid.nodes();
  out.psi.t_grid = t_grid.nodes();
  const std::size_t nx = x_grid.n, nt = t_grid.n, K = sup.terms();
  out.psi.values.assign(nx * nt, Complex{});

  if (sup.separable()) {
    std::vector<double> spatial(nx * K);
    parallel_for(nx, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t ix = b; ix < e; ++ix) {
        const double x = out.psi.x_grid[ix];
        with_coordinates("sample_carpet", x, t_grid.lo, [&] {
          sup.spatial_factors(Position(x), std::span(spatial).subspan(ix * K, K));
        });
      }
    });
    parallel_for(nt, threads, [&](std::size_t b, std::size_t e) {
      std::vector<Complex> temporal(K);
      for (std::size_t it = b; it < e; ++it) {
        sup.temporal_factors(out.psi.t_grid[it], temporal);
        for (std::size_t ix = 0; ix < nx; ++ix) {
          out.psi(it, ix) = sup.combine(std::span(spatial).subspan(ix * K, K), temporal);
        }
      }
    });
  } else {
    parallel_for(nt, threads, [&](std::size_t b, std::size_t e) {
      for (std::size_t it = b; it < e; ++it) {
        const double t = out.psi.t_grid[it];
        for (std::size_t ix = 0; ix < nx; ++ix) {
          const double x = out.psi.x_grid[ix];
          with_coordinates("sample_carpet", x, t, [&] { out.psi(it, ix) = sup.psi(Position(x), t); });
        }
      }
    });
  }

  out.density.x_grid = out.psi.x_grid;
  out.density.t_grid = out.psi.t_grid;
  out.density.values.resize(nx * nt);
  for (std::size_t i = 0; i < nx * nt; ++i) out.density.values[i] = std::norm(out.psi.values[i]);
  return out;
}

std::vector<double> density_x_cut(const Superposition& sup, const UniformGrid& x_grid, double t,
                                  unsigned threads) {
  check_grid(x_grid, "x");
  std::vector<double> out(x_grid.n);
  const std::size_t K = sup.terms();
  std::vector<Complex> temporal(K);
  if (sup.separable()) sup.temporal_factors(t, temporal);
  parallel_for(x_grid.n, threads, [&](std::size_t b, std::size_t e) {
    std::vector<double> spatial(K);
    for (std::size_t i = b; i < e; ++i) {
      const double x = x_grid.at(i);
      with_coordinates("density_x_cut", x, t, [&] {
        if (sup.separable()) {
          sup.spatial_factors(Position(x), spatial);
          out[i] = std::norm(sup.combine(spatial, temporal));
        } else {
          out[i] = std::norm(sup.psi(Position(x), t));
        }
      });
    }
  });
  return out;
}

std::vector<double> density_t_cut(const Superposition& sup, const Position& x,
                                  const UniformGrid& t_grid, unsigned threads) {
  check_grid(t_grid, "t");
  std::vector<double> out(t_grid.n);
  const std::size_t K = sup.terms();
  std::vector<double> spatial(K);
  if (sup.separable()) {
    with_coordinates("density_t_cut", x.value(), t_grid.lo, [&] { sup.spatial_factors(x, spatial); });
  }
  parallel_for(t_grid.n, threads, [&](std::size_t b, std::size_t e) {
    std::vector<Complex> temporal(K);
    for (std::size_t i = b; i < e; ++i) {
      const double t = t_grid.at(i);
      if (sup.separable()) {
        sup.temporal_factors(t, temporal);
        out[i] = std::norm(sup.combine(spatial, temporal));
      } else {
        with_coordinates("density_t_cut", x.value(), t, [&] { out[i] = std::norm(sup.psi(x, t)); });
      }
    }
  });
  return out;
}

double norm_check(const SuperpositionSpec& spec, double t, const NormWindow& window) {
  const Superposition sup(spec);
  UniformGrid g{window.lo, window.hi, window.n};
  if (spec.system == System::Well) {
    const double kmax = static_cast<double>(sup.indices().back());
    g = UniformGrid{0.0, kPi, std::max<std::size_t>(window.n, static_cast<std::size_t>(8.0 * kmax) + 1)};
  }
  if (g.n % 2 == 0) ++g.n;
  check_grid(g, "norm window");
  const std::vector<double> p = density_x_cut(sup, g, t);
  const std::size_t last = g.n - 1;
  auto weight = [&](std::size_t i) {
    if (i == 0 || i == last) return 1.0;
    return i % 2 == 1 ? 4.0 : 2.0;
  };
  double total = 0.0;
  for (std::size_t i = 0; i <= last; ++i) total += weight(i) * p[i];
  total *= g.spacing() / 3.0;
  if (!std::isfinite(total)) {
    throw NumericalError(NumericalError::Kind::Quadrature, "norm_check: non-finite quadrature");
  }
  if (spec.system != System::Well) {
    const auto edge = static_cast<std::size_t>(0.05 * static_cast<double>(g.n));
    double tail = 0.0;
    for (std::size_t i = 0; i < edge; ++i) tail += p[i] + p[last - i];
    tail *= g.spacing();
    if (tail > 1e-6 * std::max(total, 1e-300)) {
      throw NumericalError(NumericalError::Kind::WindowTooSmall,
                           "norm_check: window [" + fmt(g.lo) + ", " + fmt(g.hi) +
                               "] too small, tail mass " + fmt(tail) + " exceeds 1e-6");
    }
  }
  return total;
}

}  // namespace qcarpet::wavefield
