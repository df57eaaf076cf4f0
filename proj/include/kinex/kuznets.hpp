#ifndef KINEX_KUZNETS_HPP_
#define KINEX_KUZNETS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "kinex/analytics.hpp"
#include "kinex/core.hpp"
#include "kinex/simulation.hpp"

// Inequality along the path alpha = lambda^(1/tau) through the (lambda, alpha)
// square, from the uncorrelated no-saving corner (0, 0) toward (1, 1).

namespace kinex {

inline double path_alpha(double lambda, double tau) {
  detail::require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
  detail::require(std::isfinite(lambda) && lambda >= 0.0 && lambda < 1.0, "lambda must lie in [0, 1)");
  if (lambda == 0.0) return 0.0;
  return std::pow(lambda, 1.0 / tau);
}

/// Uniform lambdas k / (points + 1), k = 1..points. The default gives 0.01, ..., 0.99.
inline std::vector<double> default_lambda_grid(std::size_t points = 99) {
  detail::require(points >= 1, "grid needs at least one point");
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = static_cast<double>(i + 1) / static_cast<double>(points + 1);
  }
  return grid;
}

struct PathSpec {
  double tau = 5.0;
  std::vector<double> lambda_grid = default_lambda_grid();

  void validate() const {
    detail::require(std::isfinite(tau) && tau > 0.0, "tau must be positive");
    detail::require(!lambda_grid.empty(), "lambda grid is empty");
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
      const double l = lambda_grid[i];
      detail::require(l >= 0.0 && l < 1.0, "lambda grid must lie in [0, 1)");
      detail::require(i == 0 || l > lambda_grid[i - 1], "lambda grid must be strictly increasing");
    }
  }
};

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

struct SweepRow {
  double lambda = 0.0;
  double alpha = 0.0;
  double variance_closed = 0.0;
  double variance_mc = kMissing;
  double cv_closed = 0.0;
  double cv_mc = kMissing;
  double gini_mc = kMissing;
  std::optional<std::uint64_t> seed;

  bool has_mc() const { return !std::isnan(variance_mc); }
};

struct SweepResult {
  double tau = 0.0;
  std::vector<SweepRow> rows;
};

inline SweepResult sweep_closed_form(const PathSpec& path) {
  path.validate();
  SweepResult out;
  out.tau = path.tau;
  out.rows.reserve(path.lambda_grid.size());
  for (double l : path.lambda_grid) {
    SweepRow row;
    row.lambda = l;
    row.alpha = path_alpha(l, path.tau);
    row.variance_closed = closed_form_variance(row.lambda, row.alpha);
    row.cv_closed = std::sqrt(row.variance_closed);
    out.rows.push_back(row);
  }
  return out;
}

/// How grid points are seeded in a Monte Carlo sweep.
///  - common: every point reuses the base seed, so neighbouring points see the
///    same pair and return draws and their difference carries little noise.
///  - per_point: point i uses derive_seed(base, i); estimates are independent.
enum class SeedPolicy { common, per_point };

struct SweepOptions {
  SeedPolicy seeds = SeedPolicy::common;
  std::size_t threads = 0;  // 0: hardware concurrency
};

/// Closed-form columns plus a generalized-kernel run per grid point. Points
/// run concurrently; rows are returned in grid order and do not depend on the
/// thread count.
inline SweepResult sweep_monte_carlo(const PathSpec& path, const SimConfig& config,
                                     const SweepOptions& options = {}) {
  config.validate();
  SweepResult out = sweep_closed_form(path);
  const std::size_t n = out.rows.size();

  auto run_point = [&](std::size_t i) {
    SweepRow& row = out.rows[i];
    SimConfig local = config;
    local.seed = options.seeds == SeedPolicy::common ? config.seed : derive_seed(config.seed, i);
    const SimulationResult sim = run_simulation(local, ModelParams(row.lambda, row.alpha));
    row.variance_mc = sim.report.variance;
    row.cv_mc = sim.report.cv;
    row.gini_mc = sim.report.gini;
    row.seed = local.seed;
  };

  std::size_t workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  workers = std::clamp<std::size_t>(workers, 1, n);
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) run_point(i);
    return out;
  }
  std::vector<std::future<void>> jobs;
  jobs.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) run_point(i);
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

enum class SweepColumn { variance_closed, cv_closed, variance_mc, cv_mc, gini_mc };

inline bool is_monte_carlo(SweepColumn c) {
  return c == SweepColumn::variance_mc || c == SweepColumn::cv_mc || c == SweepColumn::gini_mc;
}

inline std::vector<double> column(const SweepResult& result, SweepColumn c) {
  std::vector<double> out;
  out.reserve(result.rows.size());
  for (const auto& r : result.rows) {
    switch (c) {
      case SweepColumn::variance_closed: out.push_back(r.variance_closed); break;
      case SweepColumn::cv_closed: out.push_back(r.cv_closed); break;
      case SweepColumn::variance_mc: out.push_back(r.variance_mc); break;
      case SweepColumn::cv_mc: out.push_back(r.cv_mc); break;
      case SweepColumn::gini_mc: out.push_back(r.gini_mc); break;
    }
  }
  return out;
}

/// Centered moving average; the two end points average over what exists.
inline std::vector<double> smooth3(std::span<const double> xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(i + 1, xs.size() - 1);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += xs[k];
    out[i] = acc / static_cast<double>(hi - lo + 1);
  }
  return out;
}

struct Reversal {
  std::size_t peak_index = 0;
  bool is_reversal = false;
};

/// Inverted-U test: the argmax is interior, the series is non-decreasing up to
/// it and non-increasing after it.
inline Reversal detect_reversal(std::span<const double> series, bool smooth = false) {
  detail::require(series.size() >= 3, "reversal detection needs at least three points");
  for (double v : series) detail::require(std::isfinite(v), "series has missing values");
  const std::vector<double> s = smooth ? smooth3(series) : std::vector<double>(series.begin(), series.end());
  Reversal r;
  r.peak_index = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
  if (r.peak_index == 0 || r.peak_index + 1 == s.size()) return r;
  for (std::size_t i = 1; i <= r.peak_index; ++i)
    if (s[i] < s[i - 1]) return r;
  for (std::size_t i = r.peak_index + 1; i < s.size(); ++i)
    if (s[i] > s[i - 1]) return r;
  r.is_reversal = true;
  return r;
}

/// Monte Carlo columns are smoothed with a window of 3 before the test.
inline Reversal detect_reversal(const SweepResult& result, SweepColumn c) {
  const auto series = column(result, c);
  return detect_reversal(series, is_monte_carlo(c));
}

/// Number of strict interior local maxima.
inline std::size_t count_interior_maxima(std::span<const double> xs) {
  std::size_t count = 0;
  for (std::size_t i = 1; i + 1 < xs.size(); ++i)
    if (xs[i] > xs[i - 1] && xs[i] > xs[i + 1]) ++count;
  return count;
}

}  // namespace kinex

#endif  // KINEX_KUZNETS_HPP_
