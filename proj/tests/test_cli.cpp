#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "kinex/cli.hpp"
#include "kinex/ks_test.hpp"

namespace kinex::cli {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() /
                     ("kinex_cli_" + tag + "_" + std::to_string(std::random_device{}()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  return line;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

RunConfig small(Command cmd, const fs::path& out) {
  RunConfig c;
  c.command = cmd;
  c.sim.thermalization_steps = 300;
  c.sim.sample_steps = 200;
  c.sim.sample_interval = 5;
  c.sim.seed = 9;
  c.out = out;
  return c;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(KINEX_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

TEST(Simulate, WritesHistogramAndReport) {
  const auto dir = fresh_dir("sim");
  RunConfig c = small(Command::simulate, dir);
  c.lambda = 0.5;
  c.alpha = 1.0;
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kOk);
  EXPECT_EQ(first_line(dir / "simulate_histogram.csv"), "bin_left,bin_right,density");
  EXPECT_EQ(read_csv(dir / "simulate_histogram.csv").size(), 51u);
  EXPECT_EQ(first_line(dir / "simulate_report.csv"),
            "lambda,alpha,mean,variance,variance_closed,cv,gini,mode");
  EXPECT_TRUE(fs::exists(dir / "simulate_config.txt"));
  fs::remove_all(dir);
}

TEST(Simulate, ByteIdenticalReruns) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  ASSERT_EQ(run(small(Command::simulate, a), std::cout), kOk);
  ASSERT_EQ(run(small(Command::simulate, b), std::cout), kOk);
  for (const char* f : {"simulate_histogram.csv", "simulate_report.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Sweep, ClosedFormOnlyIsFastAndLeavesMonteCarloEmpty) {
  const auto dir = fresh_dir("sweep");
  RunConfig c = small(Command::sweep, dir);
  c.taus = {10.0};
  std::ostringstream log;
  const auto t0 = std::chrono::steady_clock::now();
  ASSERT_EQ(run(c, log), kOk);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 1.0);
  const auto rows = read_csv(dir / "sweep_tau10.csv");
  ASSERT_EQ(rows.size(), 100u);
  EXPECT_EQ(first_line(dir / "sweep_tau10.csv"), "lambda,alpha,variance_closed,variance_mc,cv_closed,cv_mc,gini_mc,seed");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    ASSERT_EQ(rows[i].size(), 8u);
    EXPECT_FALSE(rows[i][2].empty());
    EXPECT_TRUE(rows[i][3].empty());
    EXPECT_TRUE(rows[i][7].empty());
  }
  EXPECT_EQ(first_line(dir / "sweep_all.csv"),
            "tau,lambda,alpha,variance_closed,variance_mc,cv_closed,cv_mc,gini_mc,seed");
  EXPECT_NE(log.str().find("is_reversal=1"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Sweep, MonteCarloFlagsReversalForEachTau) {
  const auto dir = fresh_dir("sweep_mc");
  RunConfig c = small(Command::sweep, dir);
  c.mc = true;
  c.sim.thermalization_steps = 1000;
  c.sim.sample_steps = 1000;
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kOk);
  for (const char* f : {"sweep_tau5.csv", "sweep_tau7.csv", "sweep_tau10.csv", "sweep_tau13.csv"}) {
    const auto rows = read_csv(dir / f);
    ASSERT_EQ(rows.size(), 100u);
    EXPECT_FALSE(rows[1][6].empty());
    EXPECT_EQ(rows[1][7], "9");
  }
  std::size_t flagged = 0, pos = 0;
  const std::string text = log.str();
  while ((pos = text.find("gini_mc peak", pos)) != std::string::npos) {
    const auto eol = text.find('\n', pos);
    if (text.substr(pos, eol - pos).find("is_reversal=1") != std::string::npos) ++flagged;
    pos = eol;
  }
  EXPECT_EQ(flagged, 4u) << text;
  fs::remove_all(dir);
}

TEST(Diversify, HistogramsPerK) {
  const auto dir = fresh_dir("div");
  RunConfig c = small(Command::diversify, dir);
  c.sim.thermalization_steps = 500;
  c.sim.sample_steps = 500;
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kOk);
  const auto rep = read_csv(dir / "diversify_report.csv");
  ASSERT_EQ(rep.size(), 5u);
  double prev = 1e9;
  for (std::size_t i = 1; i < rep.size(); ++i) {
    EXPECT_TRUE(fs::exists(dir / ("diversify_k" + rep[i][0] + ".csv")));
    const double v = std::stod(rep[i][2]);
    EXPECT_LT(v, prev);
    prev = v;
  }
  fs::remove_all(dir);
}

TEST(Microcheck, ReportsIdentitiesAndCorrelation) {
  const auto dir = fresh_dir("micro");
  RunConfig c = small(Command::microcheck, dir);
  c.trade_setups = 5000;
  c.cc_limit = true;
  c.sim.thermalization_steps = 1000;
  c.sim.sample_steps = 1000;
  c.sim.sample_interval = 10;
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kOk);
  std::map<std::string, double> m;
  const auto rows = read_csv(dir / "microcheck.csv");
  for (std::size_t i = 1; i < rows.size(); ++i) m[rows[i][0]] = std::stod(rows[i][1]);
  EXPECT_LT(m["max_clearing_residual"], 1e-9);
  EXPECT_LT(m["max_conservation_error"], 1e-12);
  EXPECT_LT(m["max_theta_equivalence_error"], 1e-12);
  EXPECT_LT(m["max_q_invariance_error"], 1e-12);
  EXPECT_GT(m["coefficient_correlation"], 0.4);
  EXPECT_NEAR(m["cc_variance_mc"], 0.25, 0.01);
  fs::remove_all(dir);
}

TEST(Microcheck, RejectsZeroLambda) {
  RunConfig c = small(Command::microcheck, fresh_dir("micro_bad"));
  c.lambda = 0.0;
  std::ostringstream log;
  EXPECT_THROW(run(c, log), std::invalid_argument);
  fs::remove_all(c.out);
}

TEST(VarianceTable, ClosedFormGrid) {
  const auto dir = fresh_dir("vt");
  RunConfig c = small(Command::variance_table, dir);
  std::ostringstream log;
  ASSERT_EQ(run(c, log), kOk);
  const auto rows = read_csv(dir / "variance_table.csv");
  ASSERT_EQ(rows.size(), 51u);
  EXPECT_EQ(rows[5][0], "0");
  EXPECT_EQ(rows[5][1], "1");
  EXPECT_EQ(rows[5][2], "1");
  fs::remove_all(dir);
}

TEST(Binary, ExitCodes) {
  const auto dir = fresh_dir("bin");
  const std::string out = " --out " + dir.string();
  EXPECT_EQ(run_binary("sweep --tau 5" + out), 0);
  EXPECT_EQ(run_binary("simulate --lambda 1.0" + out), 1);
  EXPECT_EQ(run_binary("simulate --alpha 2" + out), 1);
  EXPECT_EQ(run_binary("simulate --agents 1" + out), 1);
  EXPECT_EQ(run_binary("frobnicate" + out), 1);
  EXPECT_EQ(run_binary("sweep --tau abc" + out), 1);
  EXPECT_EQ(run_binary("--help"), 0);
  // Output path below a regular file cannot be created.
  std::ofstream(dir / "plain") << "x";
  EXPECT_EQ(run_binary("sweep --tau 5 --out " + (dir / "plain" / "sub").string()), 2);
  fs::remove_all(dir);
}

TEST(Binary, ConfigFileWithFlagOverride) {
  const auto dir = fresh_dir("cfg");
  {
    std::ofstream f(dir / "run.cfg");
    f << "# sweep settings\n"
      << "tau = 7,13\n"
      << "seed = 4\n"
      << "out = " << (dir / "from_file").string() << "\n";
  }
  ASSERT_EQ(run_binary("sweep --config " + (dir / "run.cfg").string() + " --tau 10"), 0);
  EXPECT_TRUE(fs::exists(dir / "from_file" / "sweep_tau10.csv"));
  EXPECT_FALSE(fs::exists(dir / "from_file" / "sweep_tau7.csv"));
  ASSERT_EQ(run_binary("sweep --config " + (dir / "run.cfg").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "from_file" / "sweep_tau7.csv"));
  EXPECT_TRUE(fs::exists(dir / "from_file" / "sweep_tau13.csv"));
  // The echoed config reads back as a config file.
  ASSERT_EQ(run_binary("sweep --config " + (dir / "from_file" / "sweep_config.txt").string() + " --out " +
                       (dir / "echo").string()),
            0);
  EXPECT_EQ(slurp(dir / "echo" / "sweep_tau13.csv"), slurp(dir / "from_file" / "sweep_tau13.csv"));
  fs::remove_all(dir);
}

TEST(Binary, ByteIdenticalOutputsAcrossInvocations) {
  const auto dir = fresh_dir("bin_det");
  const std::string flags = " --lambda 0.3 --alpha 0.6 --thermalize 200 --samples 100 --seed 11";
  ASSERT_EQ(run_binary("simulate" + flags + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(run_binary("simulate" + flags + " --out " + (dir / "b").string()), 0);
  EXPECT_EQ(slurp(dir / "a" / "simulate_histogram.csv"), slurp(dir / "b" / "simulate_histogram.csv"));
  EXPECT_EQ(slurp(dir / "a" / "simulate_report.csv"), slurp(dir / "b" / "simulate_report.csv"));
  fs::remove_all(dir);
}

TEST(Format, LocaleIndependentShortest) {
  EXPECT_EQ(csv::format(0.1), "0.1");
  EXPECT_EQ(csv::format(1234567.5), "1234567.5");
  EXPECT_EQ(csv::format(kMissing), "");
  EXPECT_EQ(csv::format(std::uint64_t{42}), "42");
}

}  // namespace
}  // namespace kinex::cli
