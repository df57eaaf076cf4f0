#ifndef KINEX_SIMULATION_HPP_
#define KINEX_SIMULATION_HPP_

#include <algorithm>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "kinex/analytics.hpp"
#include "kinex/core.hpp"
#include "kinex/kernels.hpp"
#include "kinex/microtrade.hpp"

namespace kinex {

enum class KernelKind { generalized, random_share, diversified, microtrade };

inline std::string_view to_string(KernelKind k) {
  switch (k) {
    case KernelKind::generalized: return "generalized";
    case KernelKind::random_share: return "random_share";
    case KernelKind::diversified: return "diversified";
    case KernelKind::microtrade: return "microtrade";
  }
  return "unknown";
}

/// Which exchange rule drives a run, plus its rule-specific knobs.
struct KernelSpec {
  KernelKind kind = KernelKind::generalized;
  std::size_t k = 2;       // diversified: commodity pairs per trade
  bool cc_limit = false;   // microtrade: agent 2 copies agent 1's preferences
};

struct SimulationResult {
  std::vector<std::vector<double>> snapshots;
  InequalityReport report;
  double max_relative_drift = 0.0;
};

namespace detail {

class Trader {
 public:
  Trader(const ModelParams& params, const KernelSpec& spec) : params_(params), spec_(spec) {
    if (spec.kind == KernelKind::diversified) {
      require(spec.k >= 1, "diversified kernel needs k >= 1");
      returns_.resize(spec.k);
    }
    if (spec.kind == KernelKind::microtrade) {
      require(params.lambda > 0.0, "microtrade kernel needs lambda in (0, 1)");
    }
  }

  MoneyPair operator()(RandomSource& rng, double m_i, double m_j) {
    switch (spec_.kind) {
      case KernelKind::generalized: {
        const double w1 = rng.uniform();
        const double w2 = rng.uniform();
        return exchange_generalized(m_i, m_j, w1, w2, params_);
      }
      case KernelKind::random_share:
        return exchange_random_share(m_i, m_j, rng.uniform());
      case KernelKind::diversified:
        for (double& e : returns_) e = rng.uniform();
        return exchange_diversified(m_i, m_j, returns_);
      case KernelKind::microtrade: {
        auto [a, b] = sample_prefs(rng, params_.lambda);
        if (spec_.cc_limit) b = a;
        const auto out = clear_market(TradeSetup{a, b, m_i, m_j, 1.0, 1.0});
        return split_pool(m_i + m_j, out.m1_next);
      }
    }
    throw std::logic_error("unhandled kernel");
  }

 private:
  ModelParams params_;
  KernelSpec spec_;
  std::vector<double> returns_;
};

inline void check_conservation(const Economy& econ, double& worst) {
  const double drift = econ.relative_drift();
  worst = std::max(worst, drift);
  if (drift > kConservationTolerance) {
    throw ConservationError("total money drifted by " + std::to_string(drift) + " (relative)");
  }
}

}  // namespace detail

/// Advances `econ` by `mc_steps` Monte Carlo steps of n pairwise trades each.
inline void advance(Economy& econ, RandomSource& rng, detail::Trader& trade, std::size_t mc_steps) {
  const std::size_t n = econ.size();
  for (std::size_t s = 0; s < mc_steps; ++s) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto [i, j] = pick_pair(rng, n);
      econ.settle(i, j, trade(rng, econ[i], econ[j]));
    }
  }
}

/// Thermalizes, then records `sample_steps` snapshots spaced `sample_interval`
/// MC steps apart, for each replica. Replica r draws from stream r of the seed.
inline SimulationResult run_simulation(const SimConfig& config, const ModelParams& params,
                                       const KernelSpec& kernel = {}, std::size_t bins = kDefaultBins) {
  config.validate();
  SimulationResult result;
  result.snapshots.reserve(config.sample_steps * config.replicas);
  for (std::size_t r = 0; r < config.replicas; ++r) {
    RandomSource rng(config.seed, r);
    detail::Trader trade(params, kernel);
    Economy econ = init_economy(config.n_agents, config.endowment);
    advance(econ, rng, trade, config.thermalization_steps);
    detail::check_conservation(econ, result.max_relative_drift);
    for (std::size_t s = 0; s < config.sample_steps; ++s) {
      advance(econ, rng, trade, config.sample_interval);
      detail::check_conservation(econ, result.max_relative_drift);
      result.snapshots.emplace_back(econ.holdings().begin(), econ.holdings().end());
    }
  }
  result.report = summarize(result.snapshots, bins);
  return result;
}

}  // namespace kinex

#endif  // KINEX_SIMULATION_HPP_
