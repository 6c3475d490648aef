#include "qcarpet/fracdim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "qcarpet/errors.hpp"
#include "qcarpet/parallel.hpp"

namespace qcarpet::fracdim {

namespace {

constexpr double kAutoBandR2 = 0.995;
constexpr int kMinScales = 5;

std::string num(double v) { return std::to_string(v); }

// Values rescaled to [0, 1]; a constant input maps to all zeros.
std::vector<double> unit_rescale(std::span<const double> v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  const double min = *lo, range = *hi - *lo;
  std::vector<double> out(v.size(), 0.0);
  if (range > 0.0) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::clamp((v[i] - min) / range, 0.0, 1.0);
  }
  return out;
}

std::int64_t cells_per_axis(double eps) {
  return static_cast<std::int64_t>(std::ceil(1.0 / eps - 1e-9));
}

std::int64_t cell_of(double v, double eps, std::int64_t cells) {
  return std::min(static_cast<std::int64_t>(std::floor(v / eps)), cells - 1);
}

void check_eps(std::span<const double> eps, double unit_spacing) {
  for (double e : eps) {
    if (!(e > 0.0) || e > 1.0) throw DomainError("eps must lie in (0, 1], got " + num(e));
    if (e < 2.0 * unit_spacing * (1.0 - 1e-12)) {
      throw NumericalError(NumericalError::Kind::Resolution,
                           "eps = " + num(e) + " is below twice the sample spacing " +
                               num(unit_spacing));
    }
  }
}

void check_monotone(std::span<const ScalePoint> counts) {
  std::vector<ScalePoint> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalePoint& a, const ScalePoint& b) { return a.scale > b.scale; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].value < sorted[i - 1].value) {
      throw std::logic_error("box counts must be nonincreasing in eps (eps " +
                             num(sorted[i - 1].scale) + " -> " + num(sorted[i].scale) + ")");
    }
  }
}

struct Regression {
  double slope = 0.0;
  double std_error = 0.0;
  double r_squared = 0.0;
};

Regression regress(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  Regression r;
  r.slope = sxy / sxx;
  const double ss_res = std::max(0.0, syy - r.slope * sxy);
  r.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  r.std_error = x.size() > 2 ? std::sqrt(ss_res / (n - 2.0) / sxx) : 0.0;
  return r;
}

// Points ordered by descending scale; x and y are the regression coordinates.
struct FitInput {
  std::vector<double> scale, x, y;
};

struct FitOutput {
  Regression reg;
  double lo = 0.0, hi = 0.0;
  int n = 0;
};

FitOutput fit_band(const FitInput& in, std::optional<ScalingBand> band) {
  const std::size_t n = in.scale.size();
  if (band) {
    if (!(band->lo < band->hi)) throw DomainError("scaling band requires lo < hi");
    std::vector<double> xs, ys;
    FitOutput out;
    out.lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double s = in.scale[i];
      if (s >= band->lo * (1.0 - 1e-9) && s <= band->hi * (1.0 + 1e-9)) {
        xs.push_back(in.x[i]);
        ys.push_back(in.y[i]);
        out.lo = std::min(out.lo, s);
        out.hi = std::max(out.hi, s);
      }
    }
    if (static_cast<int>(xs.size()) < kMinScales) {
      throw NumericalError(NumericalError::Kind::NoScalingBand,
                           "only " + std::to_string(xs.size()) + " scales inside band [" +
                               num(band->lo) + ", " + num(band->hi) + "], need 5");
    }
    out.reg = regress(xs, ys);
    out.n = static_cast<int>(xs.size());
    return out;
  }
  std::optional<FitOutput> best;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + kMinScales; j <= n; ++j) {
      const Regression r = regress(std::span(in.x).subspan(i, j - i), std::span(in.y).subspan(i, j - i));
      if (r.r_squared < kAutoBandR2) continue;
      const int width = static_cast<int>(j - i);
      if (!best || width > best->n || (width == best->n && r.r_squared > best->reg.r_squared)) {
        best = FitOutput{r, in.scale[j - 1], in.scale[i], width};
      }
    }
  }
  if (!best) {
    throw NumericalError(NumericalError::Kind::NoScalingBand,
                         "no contiguous window of >= 5 scales reaches r^2 >= 0.995");
  }
  return *best;
}

FitInput sorted_input(std::span<const ScalePoint> pts, bool log_inverse_scale) {
  std::vector<ScalePoint> sorted(pts.begin(), pts.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ScalePoint& a, const ScalePoint& b) { return a.scale > b.scale; });
  FitInput in;
  for (const auto& p : sorted) {
    if (!(p.value > 0.0) || !std::isfinite(p.value)) {
      throw NumericalError(NumericalError::Kind::NoScalingBand,
                           "non-positive value " + num(p.value) + " at scale " + num(p.scale));
    }
    in.scale.push_back(p.scale);
    in.x.push_back(log_inverse_scale ? -std::log(p.scale) : std::log(p.scale));
    in.y.push_back(std::log(p.value));
  }
  return in;
}

DimensionEstimate to_estimate(const FitOutput& f, double dimension, double kappa) {
  DimensionEstimate e;
  e.dimension = dimension;
  e.holder_kappa = kappa;
  e.std_error = f.reg.std_error;
  e.eps_min = f.lo;
  e.eps_max = f.hi;
  e.r_squared = f.reg.r_squared;
  e.n_scales = f.n;
  e.raw_slope = f.reg.slope;
  return e;
}

// Positions along one axis where the interpolant must be sampled for a
// given eps: all grid nodes plus every cell boundary. cell_start[j] and
// cell_start[j + 1] bracket the points of cell j (boundaries are shared).
struct AugmentedAxis {
  std::vector<std::size_t> node;  // left grid node of the interval holding the point
  std::vector<double> frac;       // position inside that interval
  std::vector<std::size_t> cell_start;
};

AugmentedAxis augment_axis(std::size_t intervals, double eps, std::int64_t cells) {
  AugmentedAxis a;
  const auto N = static_cast<double>(intervals);
  auto push = [&](double u) {
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= intervals) i = intervals - 1;
    a.node.push_back(i);
    a.frac.push_back(u - static_cast<double>(i));
  };
  a.cell_start.reserve(static_cast<std::size_t>(cells) + 1);
  for (std::int64_t j = 0; j < cells; ++j) {
    const double ul = static_cast<double>(j) * eps * N;
    const double ur = std::min(static_cast<double>(j + 1) * eps, 1.0) * N;
    a.cell_start.push_back(a.node.size());
    push(ul);
    for (auto i = static_cast<std::size_t>(std::floor(ul)) + 1; static_cast<double>(i) < ur; ++i) {
      push(static_cast<double>(i));
    }
  }
  a.cell_start.push_back(a.node.size());
  push(N);
  return a;
}

}  // namespace

// SampledCurve ----------------------------------------------------------------

void SampledCurve::validate() const {
  if (xs.size() < 2) throw DomainError("curve needs at least two samples");
  if (xs.size() != ys.size()) throw DomainError("curve xs and ys differ in length");
  const double span = xs.back() - xs.front();
  if (!(span > 0.0) || !std::isfinite(span)) throw DomainError("curve xs must be ascending and finite");
  const double h = span / static_cast<double>(xs.size() - 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(ys[i]) || !std::isfinite(xs[i])) {
      throw DomainError("curve has a non-finite value at sample " + std::to_string(i));
    }
    if (i > 0 && std::abs((xs[i] - xs[i - 1]) - h) > 1e-12 * std::max(1.0, std::abs(span)) +
                                                         1e-9 * h) {
      throw DomainError("curve xs are not uniform at sample " + std::to_string(i));
    }
  }
}

// Weierstrass -----------------------------------------------------------------

void WeierstrassSpec::validate() const {
  if (!(a > 1.0) || !std::isfinite(a)) throw ValidationError("weierstrass requires a > 1");
  if (!(b > 0.0 && b < 1.0)) throw ValidationError("weierstrass requires 0 < b < 1");
  if (a * b < 1.0 - 1e-12) throw ValidationError("weierstrass requires a b >= 1");
  if (n_terms < 1) throw ValidationError("weierstrass requires n_terms >= 1");
}

double weierstrass(const WeierstrassSpec& spec, double x) {
  spec.validate();
  double sum = 0.0, amp = 1.0, freq = 1.0;
  for (int n = 0; n < spec.n_terms; ++n) {
    sum += amp * std::sin(freq * x);
    amp *= spec.b;
    freq *= spec.a;
  }
  return sum;
}

double weierstrass_dimension(const WeierstrassSpec& spec) {
  spec.validate();
  return 2.0 - std::abs(std::log(spec.b) / std::log(spec.a));
}

// Schedules -------------------------------------------------------------------

std::vector<double> default_eps_schedule(double unit_spacing) {
  std::vector<double> out;
  for (double e = 0x1p-3; e >= 4.0 * unit_spacing * (1.0 - 1e-12); e *= 0.5) out.push_back(e);
  return out;
}

ScalingBand resolved_band(std::size_t samples, double span, double shortest_wavelength) {
  if (samples < 513) {
    throw NumericalError(NumericalError::Kind::Resolution,
                         "at least 513 samples are needed for a five-scale band");
  }
  if (!(span > 0.0)) throw DomainError("resolved_band: span must be positive");
  const double dx = 1.0 / static_cast<double>(samples - 1);
  double v = std::max(64.0 * dx, 4.0 * std::max(0.0, shortest_wavelength) / span);
  v = std::clamp(v, 4.0 * dx, 0x1p-7);
  const double lo = std::exp2(std::ceil(std::log2(v) - 1e-9));
  return {lo, 0x1p-3};
}

// Curves ----------------------------------------------------------------------

std::vector<ScalePoint> box_count_curve(const SampledCurve& curve, std::span<const double> eps,
                                        unsigned threads) {
  curve.validate();
  check_eps(eps, curve.unit_spacing());
  const std::vector<double> y = unit_rescale(curve.ys);
  const std::size_t N = curve.size() - 1;
  const auto Nd = static_cast<double>(N);
  auto interp = [&](double u) {
    auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= N) return y[N];
    const double f = u - static_cast<double>(i);
    return y[i] + f * (y[i + 1] - y[i]);
  };

  std::vector<ScalePoint> out(eps.size());
  parallel_for(eps.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double w = eps[k];
      const std::int64_t cells = cells_per_axis(w);
      std::int64_t count = 0;
      for (std::int64_t j = 0; j < cells; ++j) {
        const double ul = static_cast<double>(j) * w * Nd;
        const double ur = std::min(static_cast<double>(j + 1) * w, 1.0) * Nd;
        double lo = interp(ul), hi = lo;
        const double yr = interp(ur);
        lo = std::min(lo, yr);
        hi = std::max(hi, yr);
        const auto first = static_cast<std::size_t>(std::ceil(ul));
        const auto last = std::min(static_cast<std::size_t>(std::floor(ur)), N);
        for (std::size_t i = first; i <= last; ++i) {
          lo = std::min(lo, y[i]);
          hi = std::max(hi, y[i]);
        }
        count += cell_of(hi, w, cells) - cell_of(lo, w, cells) + 1;
      }
      out[k] = {w, static_cast<double>(count)};
    }
  });
  check_monotone(out);
  return out;
}

DimensionEstimate fit_dimension(std::span<const ScalePoint> counts, std::optional<ScalingBand> band,
                                GraphKind kind) {
  const FitOutput f = fit_band(sorted_input(counts, true), band);
  const double lo = kind == GraphKind::Curve ? 1.0 : 2.0;
  const double d = std::clamp(f.reg.slope, lo, lo + 1.0);
  return to_estimate(f, d, lo + 1.0 - d);
}

std::vector<ScalePoint> oscillation_profile(const SampledCurve& curve, std::span<const double> tau) {
  curve.validate();
  const std::vector<double> y = unit_rescale(curve.ys);
  const std::size_t N = curve.size() - 1;
  std::vector<ScalePoint> out;
  out.reserve(tau.size());
  for (double t : tau) {
    const auto w = static_cast<std::size_t>(std::llround(t * static_cast<double>(N)));
    if (w < 2) {
      throw NumericalError(NumericalError::Kind::Resolution,
                           "tau = " + num(t) + " is below twice the sample spacing");
    }
    if (w > N) throw DomainError("tau = " + num(t) + " exceeds the curve range");
    const std::size_t windows = N / w;
    double total = 0.0;
    for (std::size_t k = 0; k < windows; ++k) {
      const auto [lo, hi] = std::minmax_element(y.begin() + static_cast<std::ptrdiff_t>(k * w),
                                                y.begin() + static_cast<std::ptrdiff_t>((k + 1) * w + 1));
      total += *hi - *lo;
    }
    out.push_back({t, total / static_cast<double>(windows)});
  }
  return out;
}

DimensionEstimate oscillation_dimension(const SampledCurve& curve, std::span<const double> tau,
                                        std::optional<ScalingBand> band) {
  const std::vector<ScalePoint> prof = oscillation_profile(curve, tau);
  const bool flat = std::all_of(prof.begin(), prof.end(), [](const ScalePoint& p) { return p.value == 0.0; });
  if (flat) {
    std::vector<ScalePoint> in_band;
    for (const auto& p : prof) {
      if (!band || (p.scale >= band->lo * (1.0 - 1e-9) && p.scale <= band->hi * (1.0 + 1e-9))) {
        in_band.push_back(p);
      }
    }
    if (static_cast<int>(in_band.size()) < kMinScales) {
      throw NumericalError(NumericalError::Kind::NoScalingBand, "fewer than 5 scales in band");
    }
    DimensionEstimate e;
    e.dimension = 1.0;
    e.holder_kappa = 1.0;
    e.raw_slope = 1.0;
    e.r_squared = 1.0;
    e.n_scales = static_cast<int>(in_band.size());
    e.eps_min = in_band.front().scale;
    e.eps_max = in_band.front().scale;
    for (const auto& p : in_band) {
      e.eps_min = std::min(e.eps_min, p.scale);
      e.eps_max = std::max(e.eps_max, p.scale);
    }
    return e;
  }
  const FitOutput f = fit_band(sorted_input(prof, false), band);
  const double d = std::clamp(2.0 - f.reg.slope, 1.0, 2.0);
  return to_estimate(f, d, 2.0 - d);
}

// Surfaces --------------------------------------------------------------------

std::vector<ScalePoint> box_count_surface_counts(const wavefield::CarpetField& field,
                                                 std::span<const double> eps, unsigned threads) {
  const std::size_t nx = field.nx(), nt = field.nt();
  if (nx < 1024 || nt < 1024) {
    throw DomainError("surface counting needs at least 2^10 x 2^10 samples");
  }
  if (field.values.size() != nx * nt) throw DomainError("field extent does not match its grids");
  for (double v : field.values) {
    if (!std::isfinite(v)) throw DomainError("field has non-finite values");
  }
  check_eps(eps, 1.0 / static_cast<double>(std::min(nx, nt) - 1));
  const std::vector<double> p = unit_rescale(field.values);
  const std::size_t NX = nx - 1, NT = nt - 1;

  std::vector<ScalePoint> out(eps.size());
  parallel_for(eps.size(), threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const double w = eps[k];
      const std::int64_t cells = cells_per_axis(w);
      const AugmentedAxis ax = augment_axis(NX, w, cells);
      const AugmentedAxis at = augment_axis(NT, w, cells);
      const auto C = static_cast<std::size_t>(cells);
      const std::size_t rows = at.node.size();
      std::vector<double> rmin(rows * C), rmax(rows * C), line(ax.node.size());
      for (std::size_t r = 0; r < rows; ++r) {
        const std::size_t it = at.node[r];
        const double ft = at.frac[r];
        const double* p0 = &p[it * nx];
        const double* p1 = &p[(it + 1) * nx];
        for (std::size_t c = 0; c < ax.node.size(); ++c) {
          const std::size_t ix = ax.node[c];
          const double fx = ax.frac[c];
          const double a = p0[ix] + fx * (p0[ix + 1] - p0[ix]);
          const double d = p1[ix] + fx * (p1[ix + 1] - p1[ix]);
          line[c] = a + ft * (d - a);
        }
        for (std::size_t jx = 0; jx < C; ++jx) {
          const auto [lo, hi] = std::minmax_element(
              line.begin() + static_cast<std::ptrdiff_t>(ax.cell_start[jx]),
              line.begin() + static_cast<std::ptrdiff_t>(ax.cell_start[jx + 1] + 1));
          rmin[r * C + jx] = *lo;
          rmax[r * C + jx] = *hi;
        }
      }
      std::int64_t count = 0;
      for (std::size_t jt = 0; jt < C; ++jt) {
        for (std::size_t jx = 0; jx < C; ++jx) {
          double lo = 1.0, hi = 0.0;
          for (std::size_t r = at.cell_start[jt]; r <= at.cell_start[jt + 1]; ++r) {
            lo = std::min(lo, rmin[r * C + jx]);
            hi = std::max(hi, rmax[r * C + jx]);
          }
          count += cell_of(hi, w, cells) - cell_of(lo, w, cells) + 1;
        }
      }
      out[k] = {w, static_cast<double>(count)};
    }
  });
  check_monotone(out);
  return out;
}

DimensionEstimate box_count_surface(const wavefield::CarpetField& field, std::span<const double> eps,
                                    std::optional<ScalingBand> band, unsigned threads) {
  const auto counts = box_count_surface_counts(field, eps, threads);
  return fit_dimension(counts, band, GraphKind::Surface);
}

}  // namespace qcarpet::fracdim
