// Numerov shooting for -psi'' + |x|^alpha psi = E psi on a symmetric box.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qcarpet/eigenbasis.hpp"
#include "qcarpet/errors.hpp"

namespace qcarpet::eigenbasis {

namespace {

constexpr double kRenormAbove = 1e200;

struct Box {
  double half_width = 0.0;
  double step = 0.0;
  std::vector<double> potential;  // V at x_i = -half_width + i * step

  double x(std::size_t i) const { return -half_width + static_cast<double>(i) * step; }
  std::size_t size() const { return potential.size(); }
};

// Distance past the turning point at which the WKB decay exponent reaches `target`.
double tail_distance(double alpha, double energy, double target) {
  const double xt = std::pow(energy, 1.0 / alpha);
  double d = 0.0;
  double acc = 0.0;
  const double dx = std::max(1e-3, 1e-3 * xt);
  while (acc < target) {
    const double x = xt + d + 0.5 * dx;
    acc += std::sqrt(std::max(0.0, std::pow(x, alpha) - energy)) * dx;
    d += dx;
  }
  return d;
}

Box make_box(double alpha, double energy_cap, const NumerovOptions& opts) {
  Box box;
  const double xt = std::pow(energy_cap, 1.0 / alpha);
  box.half_width = std::max(opts.box_factor * xt, xt + tail_distance(alpha, energy_cap, opts.tail_log));
  box.step = opts.k_h / std::sqrt(energy_cap);
  auto n = static_cast<std::size_t>(std::ceil(2.0 * box.half_width / box.step));
  if (n % 2 == 1) ++n;  // odd node count so Simpson applies
  box.step = 2.0 * box.half_width / static_cast<double>(n);
  box.potential.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) box.potential[i] = std::pow(std::abs(box.x(i)), alpha);
  return box;
}

// Sign changes of the outward shooting solution across the box.
std::int64_t count_nodes(const Box& box, double energy) {
  const double h2 = box.step * box.step / 12.0;
  const std::size_t n = box.size();
  double f_prev = 1.0 + h2 * (energy - box.potential[0]);
  double f_cur = 1.0 + h2 * (energy - box.potential[1]);
  double p_prev = 0.0;
  double p_cur = 1e-30;
  std::int64_t nodes = 0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double f_next = 1.0 + h2 * (energy - box.potential[i + 1]);
    const double p_next = ((12.0 - 10.0 * f_cur) * p_cur - f_prev * p_prev) / f_next;
    if ((p_next < 0.0) != (p_cur < 0.0) && p_next != 0.0) ++nodes;
    p_prev = p_cur;
    p_cur = p_next;
    f_prev = f_cur;
    f_cur = f_next;
    if (std::abs(p_cur) > kRenormAbove) {
      p_cur /= kRenormAbove;
      p_prev /= kRenormAbove;
    }
  }
  return nodes;
}

// Sweep from `from` toward `to` (exclusive of overshoot), writing into psi.
void sweep(const Box& box, double energy, std::vector<double>& psi, std::size_t from,
           std::size_t to) {
  const double h2 = box.step * box.step / 12.0;
  const bool forward = to > from;
  auto f = [&](std::size_t i) { return 1.0 + h2 * (energy - box.potential[i]); };
  auto advance = [&](std::size_t i) { return forward ? i + 1 : i - 1; };
  std::size_t i0 = from;
  std::size_t i1 = advance(from);
  psi[i0] = 0.0;
  psi[i1] = 1e-30;
  while (i1 != to) {
    const std::size_t i2 = advance(i1);
    psi[i2] = ((12.0 - 10.0 * f(i1)) * psi[i1] - f(i0) * psi[i0]) / f(i2);
    if (std::abs(psi[i2]) > kRenormAbove) {
      for (std::size_t j = std::min(from, i2); j <= std::max(from, i2); ++j) psi[j] /= kRenormAbove;
    }
    i0 = i1;
    i1 = i2;
  }
}

}  // namespace

EigenstateRecord numerov_solve(double alpha, std::int64_t n, const NumerovOptions& opts) {
  if (!(alpha > 0.0) || std::isinf(alpha)) {
    throw DomainError("numerov_solve: alpha must be finite and > 0");
  }
  if (n < 0) throw DomainError("numerov_solve: n must be >= 0");

  double cap = 1.25 * bohr_sommerfeld_energy(alpha, n) + 1.0;
  Box box = make_box(alpha, cap, opts);
  int budget = opts.max_iterations;
  while (count_nodes(box, cap) <= n) {
    if (--budget <= 0) {
      throw NumericalError(NumericalError::Kind::Convergence,
                           "numerov_solve: could not bracket eigenvalue " + std::to_string(n));
    }
    cap *= 1.5;
    box = make_box(alpha, cap, opts);
  }

  double lo = 0.0;
  double hi = cap;
  while (hi - lo > opts.rel_tolerance * hi) {
    if (--budget <= 0) {
      throw NumericalError(NumericalError::Kind::Convergence,
                           "numerov_solve: bisection budget exhausted for n = " + std::to_string(n));
    }
    const double mid = 0.5 * (lo + hi);
    if (count_nodes(box, mid) <= n) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double energy = 0.5 * (lo + hi);

  // Match outward and inward sweeps at the right classical turning point.
  const std::size_t last = box.size() - 1;
  const double xt = std::pow(energy, 1.0 / alpha);
  auto match = static_cast<std::size_t>(std::llround((xt + box.half_width) / box.step));
  match = std::clamp<std::size_t>(match, 2, last - 2);

  std::vector<double> psi(box.size(), 0.0);
  std::vector<double> right(box.size(), 0.0);
  sweep(box, energy, psi, 0, match);
  sweep(box, energy, right, last, match);
  if (right[match] == 0.0) {
    throw NumericalError(NumericalError::Kind::Convergence,
                         "numerov_solve: degenerate matching point");
  }
  auto rescale = [](std::vector<double>& v, std::size_t b, std::size_t e) {
    double peak = 0.0;
    for (std::size_t i = b; i <= e; ++i) peak = std::max(peak, std::abs(v[i]));
    for (std::size_t i = b; i <= e; ++i) v[i] /= peak;
  };
  rescale(psi, 0, match);
  rescale(right, match, last);
  const double scale = psi[match] / right[match];
  for (std::size_t i = match + 1; i <= last; ++i) psi[i] = right[i] * scale;
  rescale(psi, 0, last);

  // Simpson normalization; node count is even by construction of the box.
  double norm = psi[0] * psi[0] + psi[last] * psi[last];
  for (std::size_t i = 1; i < last; ++i) norm += (i % 2 == 1 ? 4.0 : 2.0) * psi[i] * psi[i];
  norm *= box.step / 3.0;
  double inv = 1.0 / std::sqrt(norm);
  // Sign convention: the leftmost lobe is positive.
  for (std::size_t i = 0; i <= last; ++i) {
    if (std::abs(psi[i]) * inv > 1e-8) {
      if (psi[i] < 0.0) inv = -inv;
      break;
    }
  }
  for (double& v : psi) v *= inv;

  EigenstateRecord r;
  r.n = n;
  r.energy = energy;
  r.method = Method::Numerov;
  r.alpha = alpha;
  r.turning_point = xt;
  r.grid_start = -box.half_width;
  r.grid_step = box.step;
  r.psi = std::move(psi);
  return r;
}

}  // namespace qcarpet::eigenbasis
