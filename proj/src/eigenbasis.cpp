#include "qcarpet/eigenbasis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "qcarpet/errors.hpp"

namespace qcarpet::eigenbasis {

namespace {

constexpr double kPi = std::numbers::pi;

// Recurrence coefficients for the normalized Hermite functions
// psi_{k+1}(u) = a_k u psi_k(u) - b_k psi_{k-1}(u).
struct HermiteTables {
  std::vector<double> a;
  std::vector<double> b;

  HermiteTables() : a(kHermiteSwitch + 1), b(kHermiteSwitch + 1) {
    for (std::int64_t k = 0; k <= kHermiteSwitch; ++k) {
      const double kd = static_cast<double>(k);
      a[k] = std::sqrt(2.0 / (kd + 1.0));
      b[k] = std::sqrt(kd / (kd + 1.0));
    }
  }
};

const HermiteTables& hermite_tables() {
  static const HermiteTables tables;
  return tables;
}

constexpr double kRescaleAbove = 1e150;
const double kLogRescale = std::log(kRescaleAbove);

// sin(phase - (n - 1) pi / 2) with the quarter-turn reduced exactly.
double shifted_sine(double phase, std::int64_t n) {
  // (n - 1) mod 4 selects sin, -cos, -sin, cos.
  const auto r = static_cast<int>(((n - 1) % 4 + 4) % 4);
  switch (r) {
    case 0: return std::sin(phase);
    case 1: return -std::cos(phase);
    case 2: return -std::sin(phase);
    default: return std::cos(phase);
  }
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::ExactWell: return "exact-well";
    case Method::ExactHermite: return "exact-hermite";
    case Method::WKBAsymptotic: return "wkb-asymptotic";
    case Method::Numerov: return "numerov";
  }
  return "unknown";
}

WKBExponents wkb_exponents(double alpha) {
  if (!(alpha > 0.0)) {
    throw DomainError("wkb_exponents: alpha must be > 0, got " + std::to_string(alpha));
  }
  if (std::isinf(alpha)) return {alpha, 2.0, 0.0};
  return {alpha, 2.0 * alpha / (2.0 + alpha), 1.0 / (2.0 + alpha)};
}

double EigenstateRecord::operator()(double x) const {
  switch (method) {
    case Method::ExactWell: return well_eigenstate(n, x);
    case Method::ExactHermite: return hermite_eigenstate(n, x);
    case Method::WKBAsymptotic:
      if (alpha == 2.0 && !turning_point) return wkb_oscillator_matched(n, x);
      return wkb_powerlaw_eigenstate(alpha, n, x);
    case Method::Numerov: {
      if (psi.size() < 4) return 0.0;
      const double u = (x - grid_start) / grid_step;
      const double last = static_cast<double>(psi.size() - 1);
      if (u < 0.0 || u > last) return 0.0;
      auto i = static_cast<std::int64_t>(std::floor(u));
      i = std::clamp<std::int64_t>(i - 1, 0, static_cast<std::int64_t>(psi.size()) - 4);
      // Lagrange cubic through nodes i..i+3.
      const double s = u - static_cast<double>(i);
      const double p0 = psi[i], p1 = psi[i + 1], p2 = psi[i + 2], p3 = psi[i + 3];
      return p0 * (s - 1) * (s - 2) * (s - 3) / -6.0 + p1 * s * (s - 2) * (s - 3) / 2.0 +
             p2 * s * (s - 1) * (s - 3) / -2.0 + p3 * s * (s - 1) * (s - 2) / 6.0;
    }
  }
  return 0.0;
}

double well_eigenstate(std::int64_t n, double x) {
  if (n < 1) throw DomainError("well_eigenstate: n must be >= 1");
  if (!(x >= 0.0 && x <= kPi)) {
    throw DomainError("well_eigenstate: x must lie in [0, pi], got " + std::to_string(x));
  }
  return std::sin(static_cast<double>(n) * x);
}

EigenstateRecord well_state(std::int64_t n) {
  if (n < 1) throw DomainError("well_state: n must be >= 1");
  EigenstateRecord r;
  r.n = n;
  r.energy = static_cast<double>(n) * static_cast<double>(n);
  r.method = Method::ExactWell;
  r.alpha = std::numeric_limits<double>::infinity();
  return r;
}

void hermite_eigenstates(double x, std::span<const std::int64_t> indices,
                         std::span<double> out) {
  if (indices.size() != out.size()) {
    throw DomainError("hermite_eigenstates: indices and output differ in size");
  }
  if (indices.empty()) return;
  if (!std::is_sorted(indices.begin(), indices.end()) || indices.front() < 0 ||
      indices.back() > kHermiteSwitch) {
    throw DomainError("hermite_eigenstates: indices must be ascending in [0, kHermiteSwitch]");
  }
  const auto& tab = hermite_tables();
  const double u = x / std::numbers::sqrt2;
  // psi_0(u) = pi^(-1/4) exp(-u^2/2); phi_k(x) = 2^(-1/4) psi_k(u).
  double log_scale = -0.5 * u * u;
  double prev = 0.0;
  double cur = std::pow(kPi, -0.25) * std::pow(2.0, -0.25);
  std::size_t slot = 0;
  const std::int64_t top = indices.back();
  for (std::int64_t k = 0;; ++k) {
    while (slot < indices.size() && indices[slot] == k) {
      out[slot++] = cur == 0.0 ? 0.0
                                : std::copysign(std::exp(log_scale + std::log(std::abs(cur))), cur);
    }
    if (k == top) break;
    const double next = tab.a[k] * u * cur - tab.b[k] * prev;
    prev = cur;
    cur = next;
    if (std::abs(cur) > kRescaleAbove) {
      cur /= kRescaleAbove;
      prev /= kRescaleAbove;
      log_scale += kLogRescale;
    }
  }
}

double hermite_eigenstate(std::int64_t n, double x) {
  if (n < 0) throw DomainError("hermite_eigenstate: n must be >= 0");
  if (n > kHermiteSwitch) return wkb_oscillator_matched(n, x);
  const std::int64_t idx[1] = {n};
  double out[1];
  hermite_eigenstates(x, idx, out);
  return out[0];
}

double wkb_oscillator_asymptotic(std::int64_t n, double x) {
  if (n < 1) throw DomainError("wkb_oscillator_asymptotic: n must be >= 1");
  const double nd = static_cast<double>(n);
  return std::pow(nd, -0.25) * shifted_sine(std::sqrt(nd + 0.5) * x, n);
}

double wkb_oscillator_matched(std::int64_t n, double x) {
  return wkb_oscillator_asymptotic(n, x) / std::sqrt(kPi);
}

EigenstateRecord oscillator_state(std::int64_t n) {
  if (n < 0) throw DomainError("oscillator_state: n must be >= 0");
  EigenstateRecord r;
  r.n = n;
  r.energy = static_cast<double>(n) + 0.5;
  r.method = n > kHermiteSwitch ? Method::WKBAsymptotic : Method::ExactHermite;
  r.alpha = 2.0;
  return r;
}

double powerlaw_energy(double alpha, std::int64_t n) {
  if (n < 1) throw DomainError("powerlaw_energy: n must be >= 1");
  return std::pow(static_cast<double>(n), wkb_exponents(alpha).beta);
}

double powerlaw_turning_point(double alpha, std::int64_t n) {
  if (std::isinf(alpha)) return kPi;
  return std::pow(powerlaw_energy(alpha, n), 1.0 / alpha);
}

double wkb_powerlaw_eigenstate(double alpha, std::int64_t n, double x) {
  if (n < 1) throw DomainError("wkb_powerlaw_eigenstate: n must be >= 1");
  const auto ex = wkb_exponents(alpha);
  const double nd = static_cast<double>(n);
  const double k = std::pow(nd, 0.5 * ex.beta);
  const double g = std::pow(nd, -ex.gamma);
  return g * shifted_sine(k * x, n);
}

EigenstateRecord powerlaw_wkb_state(double alpha, std::int64_t n) {
  EigenstateRecord r;
  r.n = n;
  r.energy = powerlaw_energy(alpha, n);
  r.method = Method::WKBAsymptotic;
  r.alpha = alpha;
  r.turning_point = powerlaw_turning_point(alpha, n);
  return r;
}

double bohr_sommerfeld_energy(double alpha, std::int64_t n) {
  if (!(alpha > 0.0) || std::isinf(alpha)) {
    throw DomainError("bohr_sommerfeld_energy: alpha must be finite and > 0");
  }
  // int_0^1 sqrt(1 - u^alpha) du
  const double shape = std::tgamma(1.0 + 1.0 / alpha) * std::tgamma(1.5) /
                       std::tgamma(1.5 + 1.0 / alpha);
  const double action = (static_cast<double>(n) + 0.5) * kPi / (2.0 * shape);
  return std::pow(action, 2.0 * alpha / (alpha + 2.0));
}

}  // namespace qcarpet::eigenbasis
