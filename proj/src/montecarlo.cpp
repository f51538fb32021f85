#include "mfbm/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include "mfbm/errors.hpp"
#include "mfbm/parallel.hpp"

namespace mfbm {

namespace {

double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace

KsResult ks_normal(std::vector<double> sample) {
  if (sample.empty()) throw DomainError("ks_normal: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = normal_cdf(sample[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_tail((root + 0.12 + 0.11 / root) * d)};
}

MonteCarloRun run_montecarlo(const MonteCarloConfig& config) {
  if (config.replications < 2) throw DomainError("montecarlo needs at least 2 replications");
  SolverOptions opts = config.solver;
  const double ratio = config.model.sigma2 / config.model.sigma1;
  opts.kernel_scale = ratio * ratio;
  opts.threads = config.threads;
  const FredholmSolution sol = solve_hT(config.model.hurst, config.T, opts);
  return run_montecarlo(config, sol);
}

MonteCarloRun run_montecarlo(const MonteCarloConfig& config, const FredholmSolution& sol) {
  if (config.replications < 2) throw DomainError("montecarlo needs at least 2 replications");
  const auto grid = uniform_grid(config.T, config.grid_cells);
  const Estimator estimator(sol, grid, config.model.sigma1, config.model.sigma2);

  MonteCarloRun run;
  run.theta_hat.assign(config.replications, 0.0);
  EstimateResult first;
  parallel_for(config.replications, config.threads, [&](std::size_t r) {
    const EstimateResult e = estimator.estimate(simulate_X(config.model, grid, r));
    run.theta_hat[r] = e.theta_hat;
    if (r == 0) first = e;
  });

  auto& s = run.summary;
  const double n = static_cast<double>(config.replications);
  const double theta = config.model.theta;
  s.replications = config.replications;
  s.theta = theta;
  s.horizon = config.T;
  double sum = 0.0, sq = 0.0;
  for (double v : run.theta_hat) {
    sum += v;
    sq += (v - theta) * (v - theta);
  }
  s.mean = sum / n;
  double centered = 0.0;
  for (double v : run.theta_hat) centered += (v - s.mean) * (v - s.mean);
  s.sd = std::sqrt(centered / (n - 1.0));
  s.std_err_theory = first.std_err;
  s.std_err_nominal = first.std_err_nominal;
  s.var_ratio = s.sd * s.sd / (s.std_err_theory * s.std_err_theory);
  s.var_ratio_nominal = s.sd * s.sd / (s.std_err_nominal * s.std_err_nominal);
  s.mse = sq / n;
  s.scaled_mse = std::pow(config.T, 2.0 - 2.0 * config.model.hurst.h2) * s.mse;
  std::vector<double> z(run.theta_hat.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = (run.theta_hat[i] - theta) / s.std_err_theory;
  s.ks = ks_normal(std::move(z));
  s.diagnostics = first.diagnostics;
  return run;
}

}  // namespace mfbm
