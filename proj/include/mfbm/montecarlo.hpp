#pragma once

#include <cstdint>
#include <vector>

#include "mfbm/estimator.hpp"

namespace mfbm {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test of `sample` against N(0, 1). The p-value
/// uses the asymptotic Kolmogorov distribution with Stephens' small-sample
/// correction of the statistic.
KsResult ks_normal(std::vector<double> sample);

struct MonteCarloConfig {
  ModelParams model;
  double T = 10.0;
  std::size_t grid_cells = 512;
  std::size_t replications = 1000;
  SolverOptions solver;
  unsigned threads = 0;
};

struct MonteCarloSummary {
  std::size_t replications = 0;
  double theta = 0.0;
  double horizon = 0.0;
  double mean = 0.0;
  double sd = 0.0;
  double std_err_theory = 0.0;   // sigma1 / (delta sqrt(J))
  double std_err_nominal = 0.0;  // sigma1 / sqrt(J)
  double var_ratio = 0.0;        // sd^2 / std_err_theory^2
  double var_ratio_nominal = 0.0;
  double mse = 0.0;
  double scaled_mse = 0.0;  // T^{2-2H2} mse
  KsResult ks;              // of (theta_hat - theta) / std_err_theory
  SolverDiagnostics diagnostics;
};

struct MonteCarloRun {
  std::vector<double> theta_hat;  // indexed by replication
  MonteCarloSummary summary;
};

/// Replication r simulates X from streams 2r, 2r+1 of model.seed and applies
/// the MLE with a single shared Fredholm solution. Output depends only on the
/// configuration, not on the thread count.
MonteCarloRun run_montecarlo(const MonteCarloConfig& config);

/// Same, reusing a solution computed for the configured horizon and scale.
MonteCarloRun run_montecarlo(const MonteCarloConfig& config, const FredholmSolution& sol);

}  // namespace mfbm
