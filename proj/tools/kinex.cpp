#include <exception>
#include <iostream>
#include <stdexcept>

#include "CLI11.hpp"
#include "kinex/cli.hpp"

int main(int argc, char** argv) {
  using namespace kinex::cli;
  RunConfig cfg;
  double lambda = 0.0;
  std::size_t agents = cfg.sim.n_agents;
  std::string out = cfg.out.string();

  CLI::App app{"Kinetic exchange simulations of a closed market economy"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");

  auto* lambda_opt = app.add_option("--lambda", lambda, "Savings propensity in [0, 1)");
  app.add_option("--alpha", cfg.alpha, "Correlation parameter in [0, 1]")->capture_default_str();
  app.add_option("--tau", cfg.taus, "Comma-separated path exponents")->delimiter(',')->capture_default_str();
  app.add_option("--k", cfg.ks, "Comma-separated commodity counts")->delimiter(',')->capture_default_str();
  app.add_option("--agents", agents, "Number of agents")->capture_default_str();
  app.add_option("--steps", cfg.trade_setups, "Randomized trade setups (microcheck)")->capture_default_str();
  app.add_option("--thermalize", cfg.sim.thermalization_steps, "Thermalization MC steps")->capture_default_str();
  app.add_option("--samples", cfg.sim.sample_steps, "Snapshots recorded after thermalization")
      ->capture_default_str();
  app.add_option("--interval", cfg.sim.sample_interval, "MC steps between snapshots")->capture_default_str();
  app.add_option("--replicas", cfg.sim.replicas, "Independent ensemble members")->capture_default_str();
  app.add_option("--seed", cfg.sim.seed, "Base random seed")->capture_default_str();
  app.add_option("--bins", cfg.bins, "Histogram bins")->capture_default_str();
  app.add_option("--threads", cfg.threads, "Worker threads for sweeps (0: all cores)")->capture_default_str();
  app.add_flag("--mc", cfg.mc, "Add Monte Carlo columns (sweep, variance-table)");
  app.add_flag("--cc-limit", cfg.cc_limit, "Microcheck: also simulate the equal-preference limit");
  app.add_option("--out", out, "Output directory")->capture_default_str();

  struct Sub {
    const char* name;
    const char* help;
    Command command;
  };
  const Sub subs[] = {
      {"simulate", "Steady-state distribution at one (lambda, alpha)", Command::simulate},
      {"sweep", "Inequality along alpha = lambda^(1/tau)", Command::sweep},
      {"variance-table", "Closed-form (and MC) variance over the parameter grid", Command::variance_table},
      {"microcheck", "Market-clearing identities of the Cobb-Douglas trade", Command::microcheck},
      {"diversify", "Steady states of the K-commodity kernel", Command::diversify},
  };
  for (const auto& s : subs) {
    app.add_subcommand(s.name, s.help)->fallthrough()->callback([&cfg, c = s.command] { cfg.command = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidConfig;
  }

  cfg.sim.n_agents = agents;
  cfg.out = out;
  if (lambda_opt->count() > 0) cfg.lambda = lambda;

  try {
    return run(cfg, std::cout);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kInvalidConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}
