#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "mwarp/error.hpp"
#include "mwarp/intrinsic.hpp"
#include "mwarp/matrix.hpp"
#include "mwarp/panel.hpp"
#include "mwarp/parallel.hpp"
#include "mwarp/random.hpp"

namespace mwarp {

// ---------------------------------------------------------------------------
// Target functions
// ---------------------------------------------------------------------------

/// A pattern f together with its derivative.
struct TargetFunction {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  double operator()(double t) const { return value(t); }
};

/// Registered names: "tsint" (t sin t), "identity", "gaussian_bump" (exp(-t^2/2)).
inline TargetFunction make_target(const std::string& name) {
  if (name == "tsint") {
    return {name, [](double t) { return t * std::sin(t); },
            [](double t) { return std::sin(t) + t * std::cos(t); }};
  }
  if (name == "identity") {
    return {name, [](double t) { return t; }, [](double) { return 1.0; }};
  }
  if (name == "gaussian_bump") {
    return {name, [](double t) { return std::exp(-0.5 * t * t); },
            [](double t) { return -t * std::exp(-0.5 * t * t); }};
  }
  throw UsageError("unknown target function '" + name +
                   "' (expected tsint, identity or gaussian_bump)");
}

/// Wraps a user function; its derivative is taken by central differences
/// with step 1e-5 times the grid range.
inline TargetFunction make_user_target(std::string name, std::function<double(double)> f,
                                       double grid_range) {
  if (!(grid_range > 0.0)) throw UsageError("make_user_target: grid range must be > 0");
  const double h = 1e-5 * grid_range;
  auto df = [f, h](double t) { return (f(t + h) - f(t - h)) / (2.0 * h); };
  return {std::move(name), std::move(f), std::move(df)};
}

// ---------------------------------------------------------------------------
// Grids and sampling laws
// ---------------------------------------------------------------------------

struct GridSpec {
  std::size_t m = 100;
  double lo = -10.0;
  double hi = 10.0;
};

inline std::vector<double> uniform_grid(const GridSpec& spec) {
  if (spec.m < 2) throw UsageError("grid needs m >= 2 points");
  if (!(spec.lo < spec.hi)) throw UsageError("grid interval must satisfy lo < hi");
  std::vector<double> t(spec.m);
  for (std::size_t j = 0; j < spec.m; ++j) {
    t[j] = spec.lo + (spec.hi - spec.lo) * static_cast<double>(j) / static_cast<double>(spec.m - 1);
  }
  t.back() = spec.hi;
  return t;
}

/// Uniform law on [lo, hi]; lo == hi pins the parameter.
struct UniformLaw {
  double lo = 0.0;
  double hi = 0.0;

  double draw(Rng& rng) const { return lo == hi ? lo : rng.uniform(lo, hi); }
};

// ---------------------------------------------------------------------------
// Shift model: X_i(t_j) = f(t_j - A_i)
// ---------------------------------------------------------------------------

struct ShiftConfig {
  TargetFunction target = make_target("tsint");
  GridSpec grid;
  std::size_t n = 51;
  double shift_lo = -2.0;  // shifts drawn uniform on (shift_lo, shift_hi)
  double shift_hi = 2.0;
  std::vector<double> shifts;  // when non-empty, used verbatim and n is ignored
  std::uint64_t seed = 1;
};

inline CurvePanel generate_shift_sample(const ShiftConfig& cfg) {
  CurvePanel panel;
  panel.grid = uniform_grid(cfg.grid);
  if (cfg.shifts.empty()) {
    if (!(cfg.shift_lo < cfg.shift_hi)) throw UsageError("shift law needs shift_lo < shift_hi");
    Rng rng(cfg.seed);
    panel.shifts.resize(cfg.n);
    for (double& a : panel.shifts) a = rng.uniform(cfg.shift_lo, cfg.shift_hi);
  } else {
    panel.shifts = cfg.shifts;
  }
  panel.values = Matrix(panel.shifts.size(), panel.grid.size());
  for (std::size_t i = 0; i < panel.shifts.size(); ++i) {
    for (std::size_t j = 0; j < panel.grid.size(); ++j) {
      const double arg = panel.grid[j] - panel.shifts[i];
      const double v = cfg.target(arg);
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << cfg.target.name << " is not finite at t_j - A_i = " << arg;
        throw NumericError(msg.str());
      }
      panel.values(i, j) = v;
    }
  }
  return panel;
}

// ---------------------------------------------------------------------------
// Amplitude / scale / shift model: Y_i(t_j) = A_i f(B_i t_j - C_i) + noise
// ---------------------------------------------------------------------------

struct WarpConfig {
  TargetFunction target = make_target("tsint");
  GridSpec grid;
  std::size_t n = 100;
  UniformLaw amplitude{-10.0, 10.0};
  UniformLaw scale{-1.0, 1.0};
  UniformLaw shift{-10.0, 10.0};
  double noise_sd = 0.0;
  std::uint64_t seed = 1;
};

/// Simulation defaults: f = t sin t on 100 points of [-10, 10], A and C
/// uniform on [-10, 10], B uniform on [-1, 1], n = 100, no noise.
using Sim2Config = WarpConfig;

struct WarpSample {
  CurvePanel panel;
  std::vector<double> amplitude;
  std::vector<double> scale;
  std::vector<double> shift;
};

/// Per curve, draws A, B, C in that order, then the m noise values.
inline WarpSample generate_warped(const WarpConfig& cfg) {
  WarpSample out;
  out.panel.grid = uniform_grid(cfg.grid);
  const std::size_t m = out.panel.grid.size();
  out.panel.values = Matrix(cfg.n, m);
  Rng rng(cfg.seed);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    const double a = cfg.amplitude.draw(rng);
    const double b = cfg.scale.draw(rng);
    const double c = cfg.shift.draw(rng);
    out.amplitude.push_back(a);
    out.scale.push_back(b);
    out.shift.push_back(c);
    for (std::size_t j = 0; j < m; ++j) {
      double v = a * cfg.target(b * out.panel.grid[j] - c);
      if (cfg.noise_sd > 0.0) v += rng.normal(0.0, cfg.noise_sd);
      out.panel.values(i, j) = v;
    }
  }
  return out;
}

inline WarpSample generate_sim2(const Sim2Config& cfg) { return generate_warped(cfg); }

// ---------------------------------------------------------------------------
// Labeled train/test splits for classification benchmarks
// ---------------------------------------------------------------------------

/// One class of a benchmark: its warp model (n and seed are ignored) and
/// the number of curves in each split.
struct ClassSpec {
  std::string label;
  WarpConfig warp;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
};

struct LabeledSplit {
  CurvePanel train;
  CurvePanel test;
};

/// Seed of class `cls`, split `split` (0 train, 1 test) under a base seed.
inline std::uint64_t split_seed(std::uint64_t base, std::size_t cls, std::size_t split) {
  return base + 7919u * (2u * cls + split + 1u);
}

/// Generates every class on `grid` and stacks them in class order.
inline LabeledSplit generate_labeled_split(const std::vector<ClassSpec>& classes,
                                           const GridSpec& grid, std::uint64_t seed) {
  if (classes.empty()) throw UsageError("benchmark needs at least one class");
  std::vector<std::vector<double>> rows[2];
  LabeledSplit out;
  CurvePanel* panels[2] = {&out.train, &out.test};
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (std::size_t s = 0; s < 2; ++s) {
      WarpConfig cfg = classes[c].warp;
      cfg.grid = grid;
      cfg.n = s == 0 ? classes[c].n_train : classes[c].n_test;
      cfg.seed = split_seed(seed, c, s);
      const WarpSample sample = generate_warped(cfg);
      for (std::size_t i = 0; i < sample.panel.size(); ++i) {
        rows[s].push_back(sample.panel.values.row_copy(i));
        panels[s]->labels.push_back(classes[c].label);
      }
    }
  }
  for (std::size_t s = 0; s < 2; ++s) {
    panels[s]->grid = uniform_grid(grid);
    panels[s]->values = Matrix::from_rows(rows[s]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Noisy parabola cloud
// ---------------------------------------------------------------------------

struct Sim1Config {
  std::size_t n = 30;
  double noise_sd = 0.1;  // variance 0.01
  bool noiseless = false;
  std::uint64_t seed = 1;
};

/// Points (x_i + e1, 2 x_i^2 + e2) with x_i = (2i - n - 1)/(n - 1), i = 1..n.
inline PointCloud generate_sim1(const Sim1Config& cfg) {
  if (cfg.n < 2) throw UsageError("sim1 needs n >= 2");
  PointCloud cloud(cfg.n, 2);
  Rng rng(cfg.seed);
  const double denom = static_cast<double>(cfg.n - 1);
  for (std::size_t k = 0; k < cfg.n; ++k) {
    const double i = static_cast<double>(k + 1);
    const double x = (2.0 * i - static_cast<double>(cfg.n) - 1.0) / denom;
    double e1 = 0.0;
    double e2 = 0.0;
    if (!cfg.noiseless) {
      e1 = rng.normal(0.0, cfg.noise_sd);
      e2 = rng.normal(0.0, cfg.noise_sd);
    }
    cloud(k, 0) = x + e1;
    cloud(k, 1) = 2.0 * x * x + e2;
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Exact geodesics on the shift manifold a -> (f(t_1 - a), ..., f(t_m - a))
// ---------------------------------------------------------------------------

/// Speed of the curve a -> X(a): sqrt(sum_j f'(t_j - a)^2).
inline double shift_speed(const std::function<double(double)>& df, std::span<const double> grid,
                          double a) {
  double sum = 0.0;
  for (double t : grid) {
    const double d = df(t - a);
    sum += d * d;
  }
  return std::sqrt(sum);
}

/// |integral from a1 to a2 of the speed|, by composite Simpson with interval
/// halving until two successive estimates agree to `rel_tol`.
inline double exact_shift_geodesic(const std::function<double(double)>& df,
                                   std::span<const double> grid, double a1, double a2,
                                   double rel_tol = 1e-8) {
  if (!std::isfinite(a1) || !std::isfinite(a2)) throw UsageError("shift geodesic: non-finite shift");
  if (a1 == a2) return 0.0;
  if (a1 > a2) std::swap(a1, a2);
  constexpr std::size_t max_intervals = std::size_t{1} << 20;
  auto speed = [&](double a) { return shift_speed(df, grid, a); };

  // Trapezoid refinement T_{2N} = T_N / 2 + h * (sum of new midpoints);
  // Simpson S_{2N} = (4 T_{2N} - T_N) / 3.
  const double width = a2 - a1;
  std::size_t intervals = 1;
  double trap = 0.5 * width * (speed(a1) + speed(a2));
  double simpson_prev = 0.0;
  double change = std::numeric_limits<double>::infinity();
  for (int level = 0; intervals < max_intervals; ++level) {
    const double h = width / static_cast<double>(2 * intervals);
    double mid = 0.0;
    for (std::size_t k = 0; k < intervals; ++k) mid += speed(a1 + (2.0 * k + 1.0) * h);
    const double trap_next = 0.5 * trap + h * mid;
    const double simpson = (4.0 * trap_next - trap) / 3.0;
    trap = trap_next;
    intervals *= 2;
    if (level >= 4) {  // at least 32 intervals before testing convergence
      change = std::abs(simpson - simpson_prev);
      if (change <= rel_tol * std::abs(simpson) || simpson == 0.0) return simpson;
    }
    simpson_prev = simpson;
  }
  std::ostringstream msg;
  msg << "shift geodesic quadrature did not converge on [" << a1 << ", " << a2
      << "]: last relative change " << change / std::abs(simpson_prev);
  throw NumericError(msg.str());
}

/// Matrix of exact geodesic distances between the curves of a shift panel.
inline Matrix exact_shift_distances(const std::function<double(double)>& df,
                                    std::span<const double> grid, std::span<const double> shifts,
                                    unsigned threads = 0) {
  const std::size_t n = shifts.size();
  Matrix dm(n, n);
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      dm(i, j) = exact_shift_geodesic(df, grid, shifts[i], shifts[j]);
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) dm(j, i) = dm(i, j);
  }
  return dm;
}

/// Index of the sample median shift; the lower median for even counts and
/// the smallest index among equal values.
inline std::size_t median_shift_index(std::span<const double> shifts) {
  if (shifts.empty()) throw UsageError("median of an empty shift sample");
  std::vector<std::size_t> order(shifts.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return shifts[x] < shifts[y]; });
  return order[(shifts.size() - 1) / 2];
}

/// f evaluated on the grid shifted by the sample median of the true shifts.
inline std::vector<double> structural_median_oracle(const CurvePanel& panel,
                                                    const TargetFunction& target) {
  if (!panel.has_shifts()) throw UsageError("structural median oracle needs ground-truth shifts");
  const double med = panel.shifts[median_shift_index(panel.shifts)];
  std::vector<double> out(panel.grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = target(panel.grid[j] - med);
  return out;
}

/// Intrinsic median (alpha = 1) under exact shift-manifold geodesics.
inline IntrinsicEstimate intrinsic_median_exact(const CurvePanel& panel,
                                                const TargetFunction& target,
                                                unsigned threads = 0) {
  if (!panel.has_shifts()) throw UsageError("intrinsic_median_exact needs ground-truth shifts");
  return intrinsic_estimate(
      exact_shift_distances(target.derivative, panel.grid, panel.shifts, threads), 1.0);
}

}  // namespace mwarp
