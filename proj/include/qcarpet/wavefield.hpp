#pragma once

// Truncated fractal superpositions and their space-time sampling.
//
//   Well         Psi = N sum_{n=0}^{M} q^{n(s-2)} sin(q^n x) e^{-i q^{2n} t}
//   Oscillator   Psi = N sum_{n=1}^{M} q^{n(s-3/2)} phi_{q^{2n}}(x) e^{-i (q^{2n}+1/2) t}
//   PowerLaw     Psi = N sum_{n=1}^{M} q^{n(s-2+1/alpha)} phi_{b_n}(x) e^{-i E_{b_n} t}
//   FreeGaussian Gaussian-enveloped free packet, positions in units of sigma.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcarpet/eigenbasis.hpp"

namespace qcarpet::wavefield {

using Complex = std::complex<double>;

enum class System { Well, Oscillator, PowerLaw, FreeGaussian };

const char* to_string(System s);
System system_from_string(const std::string& name);

struct SuperpositionSpec {
  System system = System::Well;
  int q = 2;
  double s = 1.5;
  int M = 16;
  double alpha = 2.0;           // PowerLaw only
  bool sigma_units = true;      // FreeGaussian: x in sigma, t in 2 m sigma^2 / hbar
  bool compensated = false;     // Neumaier summation of the series
  bool numerov_low_states = false;  // PowerLaw: Numerov eigenfunctions for b_n <= 500
};

/// Throws ValidationError naming the violated constraint.
void validate(const SuperpositionSpec& spec);

/// x = numerator * pi / denominator, held exactly.
struct PiFraction {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
};

/// A position along x. Positions built from doubles that equal 0 or the
/// double nearest pi are held as exact multiples of pi so the well
/// boundary terms vanish identically.
class Position {
 public:
  Position(double x);  // NOLINT(google-explicit-constructor)
  static Position pi_fraction(std::int64_t numerator, std::int64_t denominator);

  double value() const { return value_; }
  const std::optional<PiFraction>& exact() const { return exact_; }

  /// sin(multiplier * x). For exact positions the integer phase is reduced
  /// modulo 2 pi before any floating point, so sin(q^n k pi / q^m) is
  /// exactly zero for n >= m.
  double sin_multiple(std::int64_t multiplier) const;
  /// cos(multiplier * x) with the same reduction.
  double cos_multiple(std::int64_t multiplier) const;

 private:
  double value_ = 0.0;
  std::optional<PiFraction> exact_;
};

/// Parses "1.25", "pi", "pi/8", "3pi/16", "3*pi/16".
Position parse_position(const std::string& text);

/// Uniform ascending grid lo + (hi - lo) * i / (n - 1); the last node is hi.
/// Refining to 2n - 1 nodes reproduces every existing node bit for bit.
struct UniformGrid {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t n = 2;

  double at(std::size_t i) const;
  std::vector<double> nodes() const;
  double spacing() const { return (hi - lo) / static_cast<double>(n - 1); }
};

/// A validated superposition with its coefficients, energies, and
/// normalization precomputed.
class Superposition {
 public:
  explicit Superposition(const SuperpositionSpec& spec);

  const SuperpositionSpec& spec() const { return spec_; }
  double normalization() const { return norm_; }
  std::size_t terms() const { return coeffs_.size(); }
  std::span<const double> coefficients() const { return coeffs_; }
  std::span<const double> energies() const { return energies_; }
  /// Eigenstate index of each term: q^n (well wavenumber), q^{2n}, b_n.
  std::span<const std::int64_t> indices() const { return indices_; }

  Complex psi(const Position& x, double t) const;

  /// Separable systems only: out[k] = N c_k phi_k(x).
  void spatial_factors(const Position& x, std::span<double> out) const;
  /// Separable systems only: out[k] = exp(-i E_k t).
  void temporal_factors(double t, std::span<Complex> out) const;
  bool separable() const { return spec_.system != System::FreeGaussian; }
  /// sum_k spatial[k] temporal[k] in ascending k.
  Complex combine(std::span<const double> spatial, std::span<const Complex> temporal) const;

  /// Largest spatial wavenumber in Psi.
  double max_wavenumber() const;
  /// Largest frequency present in P = |Psi|^2 as a function of t.
  double max_density_frequency() const;
  /// Period of P in t when all differences E_m - E_n share a common
  /// divisor (well, oscillator); nullopt otherwise.
  std::optional<double> density_period() const;

  /// PowerLaw: largest |x| the WKB eigenfunctions may be sampled at.
  double wkb_window_limit() const;

 private:
  Complex free_gaussian(double x, double t) const;
  void check_position(const Position& x) const;

  SuperpositionSpec spec_;
  double norm_ = 1.0;
  std::vector<double> coeffs_;
  std::vector<double> energies_;
  std::vector<std::int64_t> indices_;
  std::vector<eigenbasis::EigenstateRecord> numerov_states_;  // PowerLaw low states
  std::vector<std::size_t> hermite_terms_;  // Oscillator terms on the exact branch
  std::vector<std::int64_t> hermite_indices_;
  double wkb_limit_ = 0.0;
};

// Convenience wrappers ------------------------------------------------------

Complex well_psi(const SuperpositionSpec& spec, const Position& x, double t);
Complex oscillator_psi(const SuperpositionSpec& spec, const Position& x, double t);
Complex powerlaw_psi(const SuperpositionSpec& spec, const Position& x, double t);
Complex free_gaussian_psi(const SuperpositionSpec& spec, const Position& x, double t);

/// N = sqrt((2/pi)(1 - q^{2(s-2)})).
double well_normalization(int q, double s);

// Fields ----------------------------------------------------------------------

template <typename T>
struct Field {
  std::vector<double> x_grid;
  std::vector<double> t_grid;
  std::vector<T> values;  // row = time index, column = space index

  std::size_t nx() const { return x_grid.size(); }
  std::size_t nt() const { return t_grid.size(); }
  const T& operator()(std::size_t it, std::size_t ix) const { return values[it * nx() + ix]; }
  T& operator()(std::size_t it, std::size_t ix) { return values[it * nx() + ix]; }
};

using ComplexField = Field<Complex>;
using CarpetField = Field<double>;

struct SampledCarpet {
  ComplexField psi;
  CarpetField density;
};

/// Evaluates Psi at every (x, t) node; P = |Psi|^2. Rows are partitioned
/// across `threads` workers; each node is computed independently in a
/// fixed order, so the result does not depend on the thread count.
SampledCarpet sample_carpet(const SuperpositionSpec& spec, const UniformGrid& x_grid,
                            const UniformGrid& t_grid, unsigned threads = 1);

/// P(x, t) along x at fixed t.
std::vector<double> density_x_cut(const Superposition& sup, const UniformGrid& x_grid, double t,
                                  unsigned threads = 1);
/// P(x, t) along t at fixed x.
std::vector<double> density_t_cut(const Superposition& sup, const Position& x,
                                  const UniformGrid& t_grid, unsigned threads = 1);

struct NormWindow {
  double lo = -40.0;
  double hi = 40.0;
  std::size_t n = 1 << 16;
};

/// Integral of |Psi(x, t)|^2 over the window by composite Simpson. The
/// well always integrates over [0, pi]. Throws NumericalError(WindowTooSmall)
/// when more than 1e-6 of the mass sits in the outer 5% of the window.
double norm_check(const SuperpositionSpec& spec, double t, const NormWindow& window = {});

}  // namespace qcarpet::wavefield
