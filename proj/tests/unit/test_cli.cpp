#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "mfbm/errors.hpp"

using namespace mfbm;
using namespace mfbm::cli;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "mfbm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string temp_path(const std::string& name) {
  return testing::TempDir() + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* const* argv_of(const std::vector<const char*>& v) { return v.data(); }

}  // namespace

TEST(Config, PrecedenceFlagsOverFileOverDefaults) {
  const std::string cfg = temp_path("prec.toml");
  std::ofstream(cfg) << "h1 = 0.55\nh2 = 0.7\nt = 3\n[solve]\nn = 48\n[estimate]\nsolver_n = 99\n";
  std::vector<const char*> argv = {"mfbm", "solve", "--config", cfg.c_str(), "--t", "2"};
  const ParseOutcome p = parse_run_config(static_cast<int>(argv.size()), argv_of(argv));
  EXPECT_EQ(p.config.command, Command::kSolve);
  EXPECT_EQ(p.config.text("h1"), "0.55");
  EXPECT_EQ(p.config.text("n"), "48");
  EXPECT_EQ(p.config.text("t"), "2");
  EXPECT_EQ(p.config.text("grading"), "0");
  EXPECT_FALSE(p.config.has("solver_n"));
  EXPECT_EQ(p.config.provenance().rfind("# mfbm ", 0), 0u);
  EXPECT_EQ(p.config.provenance().find("config="), std::string::npos);
}

TEST(Config, Errors) {
  const std::string cfg = temp_path("bad.toml");
  std::ofstream(cfg) << "colour = 3\n";
  EXPECT_EQ(invoke({"solve", "--config", cfg}).code, 1);
  EXPECT_EQ(invoke({"solve", "--t", "abc"}).code, 1);
  EXPECT_EQ(invoke({"solve", "--h1", "0.9", "--h2", "0.8"}).code, 1);
  EXPECT_EQ(invoke({"montecarlo", "--reps", "0", "--seed", "1"}).code, 1);
  EXPECT_EQ(invoke({"montecarlo", "--reps", "100"}).code, 1);  // seed is mandatory
  EXPECT_EQ(invoke({"simulate"}).code, 1);
  EXPECT_EQ(invoke({"nosuchcommand"}).code, 1);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, NumericFailureExitsWithTwo) {
  const Invocation r = invoke({"solve", "--n", "32", "--cond-limit", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("horizon"), std::string::npos);
}

TEST(Cli, KernelGridDiagonal) {
  const Invocation r = invoke({"kernel-grid", "--h1", "0.7", "--h2", "0.9", "--n", "64"});
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# mfbm", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line, "s,u,kappa0");
  double lo = 1e300, hi = -1e300;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    double s, u, k;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf", &s, &u, &k), 3);
    if (s == u && s > 0) lo = std::min(lo, k), hi = std::max(hi, k);
  }
  EXPECT_EQ(rows, 65u * 65u);
  EXPECT_LE(hi - lo, 1e-8);
  EXPECT_NE(r.err.find("\"c_diag\""), std::string::npos);
}

TEST(Cli, SimulateIngestEstimatePipeline) {
  const std::string path = temp_path("path.csv"), canon = temp_path("canon.csv");
  ASSERT_EQ(invoke({"simulate", "--seed", "3", "--t", "5", "--n", "128", "--out", path}).code, 0);
  const Invocation ing = invoke({"ingest", "--in", path, "--out", canon});
  ASSERT_EQ(ing.code, 0);
  EXPECT_NE(ing.out.find("\"points\":129"), std::string::npos);
  const Invocation est = invoke({"estimate", "--in", canon, "--solver-n", "64"});
  ASSERT_EQ(est.code, 0);
  EXPECT_NE(est.out.find("\"theta_hat\""), std::string::npos);
  EXPECT_NE(est.out.find("\"std_err_nominal\""), std::string::npos);
  EXPECT_EQ(est.out.find('\n'), est.out.size() - 1);  // a single line

  std::istringstream bad("time,value\n0,0\n0.1,1\n0.3,2\n");
  EXPECT_THROW(read_path_csv(bad), DomainError);
  std::istringstream good("# comment\ntime,value\n0,0\n0.5,1\n1.0,3\n");
  const SampledPath p = read_path_csv(good);
  EXPECT_EQ(p.values.back(), 3.0);
}

TEST(Cli, MonteCarloIsByteIdentical) {
  const std::vector<std::string> args = {"montecarlo", "--reps", "100", "--seed", "42", "--n", "64",
                                         "--solver-n", "32", "--t", "5", "--h1", "0.5", "--h2", "0.75"};
  auto with_threads = [&](const char* th, const std::string& out) {
    auto a = args;
    a.insert(a.end(), {"--threads", th, "--out", out});
    return invoke(a);
  };
  const Invocation a = with_threads("1", temp_path("mc1.csv"));
  const Invocation b = with_threads("3", temp_path("mc2.csv"));
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(slurp(temp_path("mc1.csv")), slurp(temp_path("mc2.csv")));
  EXPECT_NE(a.out.find("\"ks_statistic\""), std::string::npos);
  EXPECT_NE(a.out.find("\"scaled_mse\""), std::string::npos);
}

TEST(Validate, DefaultAndHalfConfigurationsPass) {
  for (const auto& extra : {std::vector<std::string>{}, std::vector<std::string>{"--h1", "0.5", "--h2", "0.9"}}) {
    std::vector<std::string> a = {"validate"};
    a.insert(a.end(), extra.begin(), extra.end());
    std::vector<const char*> argv = {"mfbm"};
    for (const auto& s : a) argv.push_back(s.c_str());
    const ParseOutcome p = parse_run_config(static_cast<int>(argv.size()), argv_of(argv));
    for (const auto& c : run_validate(p.config)) EXPECT_TRUE(c.passed) << c.name << " = " << c.value;
  }
}
