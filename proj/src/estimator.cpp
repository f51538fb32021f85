#include "mfbm/estimator.hpp"

#include <cmath>
#include <string>

#include "mfbm/errors.hpp"

namespace mfbm {

namespace {

void check_horizon(const SampledPath& path, const FredholmSolution& sol) {
  const double T = path.horizon();
  const double target = sol.requested_T > 0.0 ? sol.requested_T : sol.horizon();
  if (std::abs(T - target) > 1e-9 * target && std::abs(T - sol.horizon()) > 1e-9 * T) {
    throw DomainError("horizon mismatch: path ends at " + std::to_string(T) +
                      ", solution was computed for " + std::to_string(target));
  }
}

void check_model(const HurstPair& pair, const FredholmSolution& sol, double sigma1, double sigma2) {
  const auto& sp = sol.context->kernel.pair();
  if (sp.h1 != pair.h1 || sp.h2 != pair.h2) {
    throw DomainError("Hurst pair differs from the one the solution was computed for");
  }
  if (!(sigma1 > 0.0) || !(sigma2 >= 0.0)) {
    throw DomainError("estimation needs sigma1 > 0 and sigma2 >= 0");
  }
  const double rho2 = (sigma2 / sigma1) * (sigma2 / sigma1);
  if (std::abs(sol.kernel_scale - rho2) > 1e-12 * std::max(1.0, rho2)) {
    throw DomainError("solution kernel_scale " + std::to_string(sol.kernel_scale) +
                      " does not match (sigma2/sigma1)^2 = " + std::to_string(rho2));
  }
}

SolverDiagnostics diagnostics_of(const FredholmSolution& sol) {
  return {sol.cond_estimate, sol.residual_sup, sol.lambda_probe, sol.horizon(), sol.retries};
}

std::vector<double> midpoint_values(const FredholmSolution& sol, const std::vector<double>& grid) {
  const Pchip h(sol.points, sol.h_values);
  std::vector<double> mid(grid.size() - 1);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) mid[k] = h(0.5 * (grid[k] + grid[k + 1]));
  return mid;
}

double sum_increments(const std::vector<double>& weights, const SampledPath& path, double scale) {
  double acc = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    acc += weights[k] * (path.values[k + 1] - path.values[k]);
  }
  return acc * scale;
}

}  // namespace

double stochastic_integral_N(const SampledPath& path, const FredholmSolution& sol) {
  if (path.times.size() < 2 || path.values.size() != path.times.size()) {
    throw DomainError("stochastic_integral_N: malformed path");
  }
  check_horizon(path, sol);
  return sum_increments(midpoint_values(sol, path.times), path, 1.0);
}

Estimator::Estimator(const FredholmSolution& sol, const std::vector<double>& grid, double sigma1,
                     double sigma2)
    : sol_(&sol), grid_(grid), sigma1_(sigma1) {
  require_uniform(grid_);
  check_model(sol.context->kernel.pair(), sol, sigma1, sigma2);
  SampledPath probe;
  probe.times = grid_;
  check_horizon(probe, sol);
  h_mid_ = midpoint_values(sol, grid_);
  const auto& c = sol.context->kernel.constants();
  const double j = weighted_integral(sol);
  if (!(j > 0.0)) throw NumericError("estimator: non-positive quadratic characteristic");
  ratio_ = c.delta_h1 / c.gamma_h1;
  base_.qvar = c.gamma_h1 * c.gamma_h1 * j;
  base_.std_err = sigma1 / (c.delta_h1 * std::sqrt(j));
  base_.std_err_nominal = sigma1 / std::sqrt(j);
  base_.horizon = grid_.back();
  base_.diagnostics = diagnostics_of(sol);
}

double Estimator::integral(const SampledPath& y) const {
  if (y.times.size() != grid_.size()) throw DomainError("estimator: path grid mismatch");
  return sum_increments(h_mid_, y, 1.0);
}

EstimateResult Estimator::estimate(const SampledPath& x) const {
  if (x.times.size() != grid_.size() || x.times.back() != grid_.back()) {
    throw DomainError("estimator: path grid mismatch");
  }
  SampledPath reduced = x;
  for (double& v : reduced.values) v /= sigma1_;
  const SampledPath y = transform_Y(reduced, sol_->context->kernel.pair());
  EstimateResult r = base_;
  r.n_value = integral(y);
  r.theta_hat = sigma1_ * r.n_value / (ratio_ * r.qvar);
  return r;
}

EstimateResult mle(const SampledPath& x, const HurstPair& pair, const FredholmSolution& sol,
                   double sigma1, double sigma2) {
  check_model(pair, sol, sigma1, sigma2);
  return Estimator(sol, x.times, sigma1, sigma2).estimate(x);
}

double log_likelihood(const SampledPath& x, double theta, const FredholmSolution& sol,
                      const HurstPair& pair, double sigma1, double sigma2) {
  const EstimateResult r = mle(x, pair, sol, sigma1, sigma2);
  const auto& c = sol.context->kernel.constants();
  const double ratio = c.delta_h1 / c.gamma_h1;
  const double t = theta / sigma1;
  return t * ratio * r.n_value - 0.5 * t * t * ratio * ratio * r.qvar;
}

}  // namespace mfbm
