#ifndef KINEX_CORE_HPP_
#define KINEX_CORE_HPP_

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kinex {

/// Relative tolerance on total-money drift over a run.
inline constexpr double kConservationTolerance = 1e-9;

/// Raised when a run leaves the conservation tolerance; maps to a runtime failure.
class ConservationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool ok, const char* what) {
  if (!ok) [[unlikely]] throw std::invalid_argument(what);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Seed for member `index` of a family rooted at `base`. Stable across platforms.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return detail::splitmix64(detail::splitmix64(base) ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// Savings propensity and correlation-tuning parameter of the generalized kernel.
struct ModelParams {
  double lambda = 0.0;
  double alpha = 1.0;

  ModelParams() = default;
  ModelParams(double lambda_, double alpha_) : lambda(lambda_), alpha(alpha_) {
    detail::require(std::isfinite(lambda) && lambda >= 0.0 && lambda < 1.0,
                    "lambda must lie in [0, 1)");
    detail::require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0,
                    "alpha must lie in [0, 1]");
  }
};

/// Deterministic uniform source. Draws are defined bit-for-bit by the seed and
/// stream; no std distribution objects are involved.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(stream == 0 ? seed : derive_seed(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0, 1).
  double uniform_open() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  /// Unbiased integer in [0, n); Lemire's multiply-shift with rejection.
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = n;
    unsigned __int128 m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::size_t>(m >> 64);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

/// Per-agent money holdings of a closed economy. The total is fixed at
/// construction; trades redistribute it and never create or destroy money.
class Economy {
 public:
  explicit Economy(std::vector<double> holdings) : holdings_(std::move(holdings)) {
    detail::require(holdings_.size() >= 2, "an economy needs at least two agents");
    for (double m : holdings_) {
      detail::require(std::isfinite(m) && m >= 0.0, "holdings must be finite and non-negative");
    }
    total_ = std::accumulate(holdings_.begin(), holdings_.end(), 0.0);
    detail::require(total_ > 0.0, "total money must be positive");
  }

  std::size_t size() const { return holdings_.size(); }
  std::span<const double> holdings() const { return holdings_; }
  double operator[](std::size_t i) const { return holdings_[i]; }

  double total() const { return total_; }
  double endowment() const { return total_ / static_cast<double>(holdings_.size()); }

  /// Sum recomputed from the current holdings.
  double current_sum() const { return std::accumulate(holdings_.begin(), holdings_.end(), 0.0); }
  double relative_drift() const { return std::abs(current_sum() - total_) / total_; }

  void settle(std::size_t i, std::size_t j, std::pair<double, double> outcome) {
    holdings_[i] = outcome.first;
    holdings_[j] = outcome.second;
  }

 private:
  std::vector<double> holdings_;
  double total_ = 0.0;
};

inline Economy init_economy(std::size_t n_agents, double endowment) {
  detail::require(n_agents >= 2, "n_agents must be at least 2");
  detail::require(std::isfinite(endowment) && endowment > 0.0, "endowment must be positive");
  return Economy(std::vector<double>(n_agents, endowment));
}

/// Ordered pair (i, j), i != j, uniform over ordered pairs and hence over
/// unordered ones. The first index plays the "i" role in asymmetric kernels.
inline std::pair<std::size_t, std::size_t> pick_pair(RandomSource& rng, std::size_t n_agents) {
  detail::require(n_agents >= 2, "pick_pair needs at least two agents");
  const std::size_t i = rng.index(n_agents);
  std::size_t j = rng.index(n_agents - 1);
  if (j >= i) ++j;
  return {i, j};
}

/// Simulation budget. One MC step is n_agents pairwise trades.
struct SimConfig {
  std::size_t n_agents = 100;
  std::size_t thermalization_steps = 100000;
  std::size_t sample_steps = 1000;
  std::size_t sample_interval = 10;
  std::uint64_t seed = 1;
  /// Independent ensemble members; each gets its own stream of `seed`.
  std::size_t replicas = 1;
  double endowment = 1.0;

  void validate() const {
    detail::require(n_agents >= 2, "n_agents must be at least 2");
    detail::require(sample_steps >= 1, "sample_steps must be positive");
    detail::require(sample_interval >= 1, "sample_interval must be at least 1");
    detail::require(replicas >= 1, "replicas must be at least 1");
    detail::require(std::isfinite(endowment) && endowment > 0.0, "endowment must be positive");
  }
};

}  // namespace kinex

#endif  // KINEX_CORE_HPP_
