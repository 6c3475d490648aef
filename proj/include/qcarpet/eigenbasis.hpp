#pragma once

// Eigenstates and eigenenergies of the one-dimensional confining problems.
//
// Units: i d/dt psi = (-d^2/dx^2 + V) psi, so the free dispersion is E = k^2.
// The oscillator uses x in units of sqrt(hbar / 2 m omega), where
// E_n = n + 1/2 and phi_n(x) ~ H_n(x / sqrt 2) exp(-x^2 / 4).

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qcarpet::eigenbasis {

enum class Method { ExactWell, ExactHermite, WKBAsymptotic, Numerov };

const char* to_string(Method m);

/// Indices above this use the WKB sinusoid instead of the Hermite recurrence.
inline constexpr std::int64_t kHermiteSwitch = 10'000;

struct WKBExponents {
  double alpha;
  double beta;   // E_n ~ n^beta
  double gamma;  // g_n ~ n^-gamma
};

/// beta = 2 alpha / (2 + alpha), gamma = 1 / (2 + alpha).
/// alpha = +inf is the infinite well (beta = 2, gamma = 0).
WKBExponents wkb_exponents(double alpha);

struct EigenstateRecord {
  std::int64_t n = 0;
  double energy = 0.0;
  Method method = Method::ExactWell;
  std::optional<double> turning_point;
  double alpha = 0.0;  // potential exponent, PowerLaw / Numerov only

  // Numerov only: normalized samples psi[i] at x = grid_start + i * grid_step.
  double grid_start = 0.0;
  double grid_step = 0.0;
  std::vector<double> psi;

  /// Evaluates the eigenfunction at x. Numerov samples are interpolated
  /// with a cubic through the four nearest nodes and vanish outside the box.
  double operator()(double x) const;
};

// Infinite well on [0, pi] -----------------------------------------------

double well_eigenstate(std::int64_t n, double x);
EigenstateRecord well_state(std::int64_t n);

// Harmonic oscillator -----------------------------------------------------

/// phi_n(x) = (sqrt(2 pi) 2^n n!)^(-1/2) H_n(x / sqrt 2) exp(-x^2 / 4).
/// Evaluated by the normalized three-term recurrence with a running log
/// scale, so no intermediate overflows or underflows for |x| <= 50.
/// For n > kHermiteSwitch this returns wkb_oscillator_matched(n, x).
double hermite_eigenstate(std::int64_t n, double x);

/// Evaluates phi_k(x) for every k in `indices` (ascending, each
/// <= kHermiteSwitch) with one recurrence sweep. out[i] = phi_{indices[i]}(x).
void hermite_eigenstates(double x, std::span<const std::int64_t> indices,
                         std::span<double> out);

/// n^(-1/4) sin(sqrt(n + 1/2) x - (n - 1) pi / 2), the potential-free WKB form.
double wkb_oscillator_asymptotic(std::int64_t n, double x);

/// wkb_oscillator_asymptotic scaled by pi^(-1/2) so its envelope matches the
/// unit-normalized Hermite functions near the origin.
double wkb_oscillator_matched(std::int64_t n, double x);

EigenstateRecord oscillator_state(std::int64_t n);

// Power-law potentials V(x) = |x|^alpha -----------------------------------

/// Energies are E_n = n^beta with the WKB proportionality constant set to 1.
double powerlaw_energy(double alpha, std::int64_t n);

/// Classical return point x_n with x_n^alpha = E_n.
double powerlaw_turning_point(double alpha, std::int64_t n);

/// g_n sin(k_n x - theta_n) with k_n = n^(beta/2), g_n = n^(-gamma),
/// theta_n = (n - 1) pi / 2.
double wkb_powerlaw_eigenstate(double alpha, std::int64_t n, double x);

EigenstateRecord powerlaw_wkb_state(double alpha, std::int64_t n);

struct NumerovOptions {
  double k_h = 0.02;            // max local wavenumber times step
  double box_factor = 1.5;      // box half-width in units of the turning point
  double tail_log = 32.0;       // WKB decay integral required past the turning point
  double rel_tolerance = 1e-13;  // bisection stop on energy
  int max_iterations = 400;
};

/// n-th eigenpair of -d^2/dx^2 + |x|^alpha by Numerov shooting.
/// Eigenvalues are located by bisection on the node count of the shooting
/// solution; the eigenfunction is assembled from inward and outward sweeps
/// matched at the classical turning point and normalized to unit norm.
/// Throws NumericalError(Convergence) if no bracket is found in budget.
EigenstateRecord numerov_solve(double alpha, std::int64_t n,
                               const NumerovOptions& opts = {});

/// Bohr-Sommerfeld estimate of E_n for |x|^alpha, used to size the box.
double bohr_sommerfeld_energy(double alpha, std::int64_t n);

}  // namespace qcarpet::eigenbasis
