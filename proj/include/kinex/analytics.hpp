#ifndef KINEX_ANALYTICS_HPP_
#define KINEX_ANALYTICS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "kinex/core.hpp"

namespace kinex {

enum class LimitQuery { reject, allow };

/// Steady-state variance of holdings (unit mean) under the generalized kernel,
/// from the moment closure with w1, w2 ~ U[0, 1]:
///   dm = 2(1-l)[a(1-l)/3 + l/2 + (1-l)(1-a)/4] / (1 - z) - 1
///   z  = (1-l)^2 [1/3 + l/(1-l)^2 + (a^2 + (1-a)^2)/3 + a(1-a)/2]
/// Cancelling the common factor gives the equivalent form
///   dm = (1-l)(1 + a^2) / (6 - (1-l)(4 - a + a^2)),
/// which is exact at the rational anchors and well conditioned as l -> 1.
/// lambda = 1 itself is 0/0 in the raw form and is only answered (with the
/// delta-function limit 0) when `limit == LimitQuery::allow`.
inline double closed_form_variance(double lambda, double alpha, LimitQuery limit = LimitQuery::reject) {
  detail::require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0, 1]");
  detail::require(std::isfinite(lambda) && lambda >= 0.0 && lambda <= 1.0, "lambda must lie in [0, 1)");
  if (lambda == 1.0) {
    detail::require(limit == LimitQuery::allow, "closed-form variance is 0/0 at lambda = 1");
    return 0.0;
  }
  const double u = 1.0 - lambda;
  return u * (1.0 + alpha * alpha) / (6.0 - u * (4.0 - alpha + alpha * alpha));
}

inline double closed_form_variance(const ModelParams& params) {
  return closed_form_variance(params.lambda, params.alpha);
}

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // n - 1 normalization
};

inline Moments empirical_moments(std::span<const double> xs) {
  detail::require(!xs.empty(), "empirical_moments needs a non-empty sample");
  const auto n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

namespace detail {

inline double checked_mean(std::span<const double> xs) {
  require(xs.size() >= 2, "gini needs at least two holdings");
  double sum = 0.0;
  for (double x : xs) {
    require(std::isfinite(x) && x >= 0.0, "gini needs non-negative holdings");
    sum += x;
  }
  const double mean = sum / static_cast<double>(xs.size());
  require(mean > 0.0, "gini is undefined for zero mean");
  return mean;
}

}  // namespace detail

/// Gini concentration ratio sum_i sum_j |m_i - m_j| / (2 mu N (N - 1)),
/// evaluated in O(N log N) via the order statistics:
///   G = sum_k (2k - N - 1) m_(k) / (mu N (N - 1)),  k = 1..N.
inline double gini(std::span<const double> holdings) {
  const double mean = detail::checked_mean(holdings);
  std::vector<double> sorted(holdings.begin(), holdings.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    acc += (2.0 * static_cast<double>(k + 1) - n - 1.0) * sorted[k];
  }
  return std::clamp(acc / (mean * n * (n - 1.0)), 0.0, 1.0);
}

/// The O(N^2) double sum, for cross-checking `gini`.
inline double gini_double_sum(std::span<const double> holdings) {
  const double mean = detail::checked_mean(holdings);
  double acc = 0.0;
  for (double x : holdings)
    for (double y : holdings) acc += std::abs(x - y);
  const auto n = static_cast<double>(holdings.size());
  return acc / (2.0 * mean * n * (n - 1.0));
}

struct Histogram {
  std::vector<double> edges;      // bins + 1 entries
  std::vector<double> densities;  // bins entries

  std::size_t bins() const { return densities.size(); }
  double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
  double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }

  double integral() const {
    double acc = 0.0;
    for (std::size_t b = 0; b < bins(); ++b) acc += densities[b] * width(b);
    return acc;
  }

  /// Center of the highest-density bin.
  double mode() const {
    const auto it = std::max_element(densities.begin(), densities.end());
    return center(static_cast<std::size_t>(it - densities.begin()));
  }
};

inline constexpr std::size_t kDefaultBins = 50;

/// Density-normalized histogram of all pooled values over [0, max].
inline Histogram estimate_distribution(std::span<const std::vector<double>> snapshots,
                                       std::size_t bins = kDefaultBins) {
  detail::require(bins >= 2, "a histogram needs at least two bins");
  std::size_t count = 0;
  double hi = 0.0;
  for (const auto& s : snapshots) {
    for (double x : s) {
      detail::require(std::isfinite(x) && x >= 0.0, "holdings must be non-negative");
      hi = std::max(hi, x);
    }
    count += s.size();
  }
  detail::require(count > 0, "cannot estimate a distribution from an empty pool");
  if (hi <= 0.0) hi = 1.0;

  Histogram h;
  h.edges.resize(bins + 1);
  const double width = hi / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) h.edges[b] = width * static_cast<double>(b);
  h.edges[bins] = hi;

  std::vector<std::size_t> counts(bins, 0);
  for (const auto& s : snapshots) {
    for (double x : s) {
      auto b = static_cast<std::size_t>(x / width);
      ++counts[std::min(b, bins - 1)];
    }
  }
  h.densities.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h.densities[b] = static_cast<double>(counts[b]) / (static_cast<double>(count) * h.width(b));
  }
  return h;
}

/// Least-squares slope of log density against bin center over bins whose
/// centers fall in [lo, hi]; empty bins are skipped.
inline double log_density_slope(const Histogram& h, double lo, double hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  std::size_t n = 0;
  for (std::size_t b = 0; b < h.bins(); ++b) {
    const double x = h.center(b);
    if (x < lo || x > hi || h.densities[b] <= 0.0) continue;
    const double y = std::log(h.densities[b]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  detail::require(n >= 2, "not enough populated bins for a slope fit");
  const auto dn = static_cast<double>(n);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

struct InequalityReport {
  double mean = 0.0;
  double variance = 0.0;
  double cv = 0.0;
  double gini = 0.0;  // average of per-snapshot Gini ratios
  Histogram histogram;
};

/// Report over post-thermalization snapshots. Moments are pooled across all
/// snapshots; the Gini ratio is averaged over snapshots.
inline InequalityReport summarize(std::span<const std::vector<double>> snapshots,
                                  std::size_t bins = kDefaultBins) {
  detail::require(!snapshots.empty(), "no snapshots to summarize");
  std::vector<double> pooled;
  double gini_acc = 0.0;
  for (const auto& s : snapshots) {
    pooled.insert(pooled.end(), s.begin(), s.end());
    gini_acc += gini(s);
  }
  const Moments mo = empirical_moments(pooled);
  InequalityReport r;
  r.mean = mo.mean;
  r.variance = mo.variance;
  r.cv = std::sqrt(mo.variance) / mo.mean;
  r.gini = gini_acc / static_cast<double>(snapshots.size());
  r.histogram = estimate_distribution(snapshots, bins);
  return r;
}

}  // namespace kinex

#endif  // KINEX_ANALYTICS_HPP_
