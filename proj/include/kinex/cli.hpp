#ifndef KINEX_CLI_HPP_
#define KINEX_CLI_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "kinex/analytics.hpp"
#include "kinex/csv.hpp"
#include "kinex/kuznets.hpp"
#include "kinex/microtrade.hpp"
#include "kinex/simulation.hpp"

namespace kinex::cli {

enum class Command { simulate, sweep, variance_table, microcheck, diversify };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::sweep: return "sweep";
    case Command::variance_table: return "variance-table";
    case Command::microcheck: return "microcheck";
    case Command::diversify: return "diversify";
  }
  return "unknown";
}

/// Exit codes of the command-line tool.
enum ExitCode : int { kOk = 0, kInvalidConfig = 1, kRuntimeFailure = 2 };

inline constexpr double kMicrocheckDefaultLambda = 0.5;

struct RunConfig {
  Command command = Command::simulate;
  std::optional<double> lambda;  // simulate/diversify: 0, microcheck: 0.5
  double alpha = 1.0;
  std::vector<double> taus{5.0, 7.0, 10.0, 13.0};
  std::vector<std::size_t> ks{1, 2, 3, 4};
  SimConfig sim;
  bool mc = false;
  bool cc_limit = false;
  std::size_t trade_setups = 10000;  // microcheck draws (--steps)
  std::size_t bins = kDefaultBins;
  std::size_t threads = 0;
  std::filesystem::path out = ".";

  double lambda_or(double fallback) const { return lambda.value_or(fallback); }
};

/// Flat key = value echo of a config; the same format `--config` reads back.
inline std::string echo(const RunConfig& c) {
  std::ostringstream os;
  auto join = [](const auto& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ',';
      if constexpr (std::is_floating_point_v<std::decay_t<decltype(xs[i])>>) {
        s += csv::format(static_cast<double>(xs[i]));
      } else {
        s += csv::format(static_cast<std::uint64_t>(xs[i]));
      }
    }
    return s;
  };
  os << "# command = " << to_string(c.command) << '\n';
  if (c.lambda) {
    os << "lambda = " << csv::format(*c.lambda) << '\n';
  } else if (c.command == Command::microcheck) {
    os << "lambda = " << csv::format(kMicrocheckDefaultLambda) << '\n';
  } else if (c.command == Command::simulate || c.command == Command::diversify) {
    os << "lambda = 0\n";
  }
  os << "alpha = " << csv::format(c.alpha) << '\n'
     << "tau = " << join(c.taus) << '\n'
     << "k = " << join(c.ks) << '\n'
     << "agents = " << c.sim.n_agents << '\n'
     << "thermalize = " << c.sim.thermalization_steps << '\n'
     << "samples = " << c.sim.sample_steps << '\n'
     << "interval = " << c.sim.sample_interval << '\n'
     << "replicas = " << c.sim.replicas << '\n'
     << "seed = " << c.sim.seed << '\n'
     << "steps = " << c.trade_setups << '\n'
     << "bins = " << c.bins << '\n'
     << "mc = " << (c.mc ? "true" : "false") << '\n'
     << "cc-limit = " << (c.cc_limit ? "true" : "false") << '\n';
  return os.str();
}

namespace detail {

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
}

inline std::string tau_tag(double tau) { return "tau" + csv::format(tau); }

inline void prepare(const RunConfig& c) {
  c.sim.validate();
  kinex::detail::require(c.bins >= 2, "bins must be at least 2");
  if (c.lambda) kinex::detail::require(*c.lambda >= 0.0 && *c.lambda < 1.0, "lambda must lie in [0, 1)");
  kinex::detail::require(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must lie in [0, 1]");
  std::filesystem::create_directories(c.out);
  write_text(c.out / (std::string(to_string(c.command)) + "_config.txt"), echo(c));
}

}  // namespace detail

inline int cmd_simulate(const RunConfig& c, std::ostream& log) {
  const ModelParams params(c.lambda_or(0.0), c.alpha);
  detail::prepare(c);
  const SimulationResult sim = run_simulation(c.sim, params, {}, c.bins);
  const auto& r = sim.report;
  csv::write_histogram(c.out / "simulate_histogram.csv", r.histogram);
  csv::Writer w(c.out / "simulate_report.csv",
                {"lambda", "alpha", "mean", "variance", "variance_closed", "cv", "gini", "mode"});
  w.row(params.lambda, params.alpha, r.mean, r.variance, closed_form_variance(params), r.cv, r.gini,
        r.histogram.mode());
  log << "simulate lambda=" << csv::format(params.lambda) << " alpha=" << csv::format(params.alpha)
      << " variance=" << csv::format(r.variance)
      << " closed_form=" << csv::format(closed_form_variance(params)) << " gini=" << csv::format(r.gini)
      << '\n';
  return kOk;
}

inline int cmd_sweep(const RunConfig& c, std::ostream& log) {
  kinex::detail::require(!c.taus.empty(), "at least one tau is required");
  std::vector<PathSpec> paths;
  for (double tau : c.taus) {
    PathSpec p{tau, default_lambda_grid()};
    p.validate();
    paths.push_back(std::move(p));
  }
  detail::prepare(c);
  csv::Writer all(c.out / "sweep_all.csv", {"tau", "lambda", "alpha", "variance_closed", "variance_mc",
                                            "cv_closed", "cv_mc", "gini_mc", "seed"});
  for (const auto& path : paths) {
    const SweepResult res =
        c.mc ? sweep_monte_carlo(path, c.sim, {SeedPolicy::common, c.threads}) : sweep_closed_form(path);
    csv::Writer w(c.out / ("sweep_" + detail::tau_tag(path.tau) + ".csv"),
                  {"lambda", "alpha", "variance_closed", "variance_mc", "cv_closed", "cv_mc", "gini_mc", "seed"});
    for (const auto& r : res.rows) {
      w.row(r.lambda, r.alpha, r.variance_closed, r.variance_mc, r.cv_closed, r.cv_mc, r.gini_mc, r.seed);
      all.row(path.tau, r.lambda, r.alpha, r.variance_closed, r.variance_mc, r.cv_closed, r.cv_mc, r.gini_mc,
              r.seed);
    }
    const Reversal closed = detect_reversal(res, SweepColumn::cv_closed);
    log << "tau=" << csv::format(path.tau) << " cv_closed peak lambda="
        << csv::format(res.rows[closed.peak_index].lambda) << " is_reversal=" << closed.is_reversal;
    if (c.mc) {
      const Reversal g = detect_reversal(res, SweepColumn::gini_mc);
      log << " gini_mc peak lambda=" << csv::format(res.rows[g.peak_index].lambda)
          << " is_reversal=" << g.is_reversal;
    }
    log << '\n';
  }
  return kOk;
}

/// The (lambda, alpha) grid {0, 0.1, ..., 0.9} x {0, 0.25, ..., 1}.
inline std::vector<ModelParams> variance_grid() {
  std::vector<ModelParams> grid;
  for (int l = 0; l <= 9; ++l)
    for (int a = 0; a <= 4; ++a) grid.emplace_back(l / 10.0, a / 4.0);
  return grid;
}

inline int cmd_variance_table(const RunConfig& c, std::ostream& log) {
  detail::prepare(c);
  csv::Writer w(c.out / "variance_table.csv",
                {"lambda", "alpha", "variance_closed", "variance_mc", "relative_error"});
  double worst = 0.0;
  for (const auto& p : variance_grid()) {
    const double closed = closed_form_variance(p);
    double mc = kMissing, rel = kMissing;
    if (c.mc) {
      mc = run_simulation(c.sim, p, {}, c.bins).report.variance;
      rel = std::abs(mc - closed) / closed;
      worst = std::max(worst, rel);
    }
    w.row(p.lambda, p.alpha, closed, mc, rel);
  }
  log << "variance-table: 50 points";
  if (c.mc) log << ", max relative error " << csv::format(worst);
  log << '\n';
  return kOk;
}

inline int cmd_diversify(const RunConfig& c, std::ostream& log) {
  kinex::detail::require(!c.ks.empty(), "at least one k is required");
  for (std::size_t k : c.ks) kinex::detail::require(k >= 1, "k must be positive");
  detail::prepare(c);
  csv::Writer w(c.out / "diversify_report.csv", {"k", "mean", "variance", "cv", "gini"});
  for (std::size_t k : c.ks) {
    const SimulationResult sim =
        run_simulation(c.sim, ModelParams(0.0, 1.0), {KernelKind::diversified, k, false}, c.bins);
    csv::write_histogram(c.out / ("diversify_k" + csv::format(std::uint64_t{k}) + ".csv"), sim.report.histogram);
    w.row(std::uint64_t{k}, sim.report.mean, sim.report.variance, sim.report.cv, sim.report.gini);
    log << "k=" << k << " variance=" << csv::format(sim.report.variance) << '\n';
  }
  return kOk;
}

struct MicrocheckReport {
  std::size_t setups = 0;
  double lambda = 0.0;
  double max_clearing_residual = 0.0;
  double max_conservation_error = 0.0;
  double max_theta_equivalence_error = 0.0;
  double max_column_sum_error = 0.0;
  double max_q_invariance_error = 0.0;
  double coefficient_correlation = 0.0;  // corr(theta11, theta12) over the draws
};

/// Randomized trade setups at money exponent `lambda`: preferences from
/// sample_prefs, holdings uniform on (0, 2), goods uniform on (0.1, 10).
inline MicrocheckReport run_microcheck(std::size_t setups, double lambda, std::uint64_t seed) {
  kinex::detail::require(setups >= 2, "microcheck needs at least two trade setups");
  RandomSource rng(seed);
  MicrocheckReport rep;
  rep.setups = setups;
  rep.lambda = lambda;
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t n = 0; n < setups; ++n) {
    const auto [a, b] = sample_prefs(rng, lambda);
    TradeSetup t{a, b, 2.0 * rng.uniform_open(), 2.0 * rng.uniform_open(),
                 0.1 + 9.9 * rng.uniform_open(), 0.1 + 9.9 * rng.uniform_open()};
    const ClearingOutcome o = clear_market(t);
    const double total = t.m1 + t.m2;
    rep.max_clearing_residual =
        std::max({rep.max_clearing_residual, std::abs(o.agent1.x1 + o.agent2.x1 - t.q1) / t.q1,
                  std::abs(o.agent1.x2 + o.agent2.x2 - t.q2) / t.q2});
    rep.max_conservation_error =
        std::max(rep.max_conservation_error, std::abs(o.m1_next + o.m2_next - total) / total);
    const auto [th1, th2] = theta_update(t);
    rep.max_theta_equivalence_error =
        std::max({rep.max_theta_equivalence_error, std::abs(th1 - o.m1_next), std::abs(th2 - o.m2_next)});
    rep.max_column_sum_error =
        std::max({rep.max_column_sum_error, std::abs(o.theta[0][0] + o.theta[1][0] - (1.0 - lambda)),
                  std::abs(o.theta[0][1] + o.theta[1][1] - (1.0 - lambda))});
    TradeSetup scaled = t;
    scaled.q1 *= 10.0;
    scaled.q2 *= 10.0;
    const ClearingOutcome os = clear_market(scaled);
    rep.max_q_invariance_error = std::max(
        {rep.max_q_invariance_error, std::abs(os.m1_next - o.m1_next), std::abs(os.m2_next - o.m2_next)});

    const double x = o.theta[0][0], y = o.theta[0][1];
    sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y;
  }
  const auto n = static_cast<double>(setups);
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double vx = sxx / n - (sx / n) * (sx / n);
  const double vy = syy / n - (sy / n) * (sy / n);
  rep.coefficient_correlation = cov / std::sqrt(vx * vy);
  return rep;
}

inline int cmd_microcheck(const RunConfig& c, std::ostream& log) {
  const double lambda = c.lambda_or(kMicrocheckDefaultLambda);
  kinex::detail::require(lambda > 0.0 && lambda < 1.0, "microcheck needs lambda in (0, 1)");
  detail::prepare(c);
  const MicrocheckReport rep = run_microcheck(c.trade_setups, lambda, c.sim.seed);
  csv::Writer w(c.out / "microcheck.csv", {"metric", "value"});
  w.row(std::string_view("setups"), std::uint64_t{rep.setups});
  w.row(std::string_view("lambda"), rep.lambda);
  w.row(std::string_view("max_clearing_residual"), rep.max_clearing_residual);
  w.row(std::string_view("max_conservation_error"), rep.max_conservation_error);
  w.row(std::string_view("max_theta_equivalence_error"), rep.max_theta_equivalence_error);
  w.row(std::string_view("max_column_sum_error"), rep.max_column_sum_error);
  w.row(std::string_view("max_q_invariance_error"), rep.max_q_invariance_error);
  w.row(std::string_view("coefficient_correlation"), rep.coefficient_correlation);
  log << "microcheck lambda=" << csv::format(lambda) << " setups=" << rep.setups
      << " clearing=" << csv::format(rep.max_clearing_residual)
      << " conservation=" << csv::format(rep.max_conservation_error)
      << " theta=" << csv::format(rep.max_theta_equivalence_error)
      << " correlation=" << csv::format(rep.coefficient_correlation) << '\n';
  if (c.cc_limit) {
    const SimulationResult sim =
        run_simulation(c.sim, ModelParams(lambda, 1.0), {KernelKind::microtrade, 2, true}, c.bins);
    const double expected = (1.0 - lambda) / (1.0 + 2.0 * lambda);
    w.row(std::string_view("cc_variance_mc"), sim.report.variance);
    w.row(std::string_view("cc_variance_expected"), expected);
    log << "cc-limit steady-state variance=" << csv::format(sim.report.variance)
        << " expected=" << csv::format(expected) << '\n';
  }
  return kOk;
}

inline int run(const RunConfig& c, std::ostream& log = std::cout) {
  switch (c.command) {
    case Command::simulate: return cmd_simulate(c, log);
    case Command::sweep: return cmd_sweep(c, log);
    case Command::variance_table: return cmd_variance_table(c, log);
    case Command::microcheck: return cmd_microcheck(c, log);
    case Command::diversify: return cmd_diversify(c, log);
  }
  return kInvalidConfig;
}

}  // namespace kinex::cli

#endif  // KINEX_CLI_HPP_
