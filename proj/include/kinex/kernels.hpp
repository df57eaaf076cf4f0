#ifndef KINEX_KERNELS_HPP_
#define KINEX_KERNELS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "kinex/core.hpp"

namespace kinex {

using MoneyPair = std::pair<double, double>;

namespace detail {

inline void require_money(double m) {
  require(std::isfinite(m) && m >= 0.0, "holdings must be finite and non-negative");
}

inline void require_unit(double u, const char* what) {
  require(std::isfinite(u) && u >= 0.0 && u <= 1.0, what);
}

// Agent i keeps `mi_next`, agent j receives the remainder of the pooled money.
// Rounding can push mi_next a few ulps past the pool; clamp so both stay >= 0.
inline MoneyPair split_pool(double pool, double mi_next) {
  mi_next = std::clamp(mi_next, 0.0, pool);
  return {mi_next, pool - mi_next};
}

}  // namespace detail

/// Generalized kernel:
///   m_i' = lambda m_i + w1 (1 - lambda) m_i + (alpha w1 + (1 - alpha) w2)(1 - lambda) m_j
///   m_j' = m_i + m_j - m_i'
/// Both agents are updated from the pre-trade values.
inline MoneyPair exchange_generalized(double m_i, double m_j, double omega1, double omega2,
                                      const ModelParams& params) {
  detail::require_money(m_i);
  detail::require_money(m_j);
  detail::require_unit(omega1, "omega1 must lie in [0, 1]");
  detail::require_unit(omega2, "omega2 must lie in [0, 1]");
  const double keep = 1.0 - params.lambda;
  const double self_share = params.lambda + omega1 * keep;
  const double cross_share = (params.alpha * omega1 + (1.0 - params.alpha) * omega2) * keep;
  return detail::split_pool(m_i + m_j, self_share * m_i + cross_share * m_j);
}

/// Uncorrelated random sharing of the pooled money: (eps, 1 - eps) split.
inline MoneyPair exchange_random_share(double m_i, double m_j, double epsilon) {
  detail::require_money(m_i);
  detail::require_money(m_j);
  detail::require_unit(epsilon, "epsilon must lie in [0, 1]");
  const double pool = m_i + m_j;
  return detail::split_pool(pool, epsilon * pool);
}

/// K simultaneous commodity trades with equal weights; the share of the pool
/// taken by agent i is the mean of the K returns.
inline MoneyPair exchange_diversified(double m_i, double m_j, std::span<const double> epsilons) {
  detail::require(!epsilons.empty(), "exchange_diversified needs at least one return");
  for (double e : epsilons) detail::require_unit(e, "each epsilon must lie in [0, 1]");
  const double share =
      std::accumulate(epsilons.begin(), epsilons.end(), 0.0) / static_cast<double>(epsilons.size());
  return exchange_random_share(m_i, m_j, std::min(share, 1.0));
}

/// Portfolio weights minimizing var(sum_k f_k eps_k) for i.i.d. returns under
/// sum_k f_k = 1. The objective is proportional to sum_k f_k^2.
inline std::vector<double> optimal_weights(std::size_t k) {
  detail::require(k >= 1, "the number of assets must be positive");
  return std::vector<double>(k, 1.0 / static_cast<double>(k));
}

/// Risk of a portfolio of i.i.d. returns, in units of the single-asset variance.
inline double portfolio_risk(std::span<const double> weights) {
  return std::inner_product(weights.begin(), weights.end(), weights.begin(), 0.0);
}

}  // namespace kinex

#endif  // KINEX_KERNELS_HPP_
