#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "mfbm/errors.hpp"
#include "mfbm/estimator.hpp"
#include "mfbm/montecarlo.hpp"

using namespace mfbm;

namespace {

const HurstPair kPair = HurstPair::make(0.6, 0.8);

const FredholmSolution& solution(double T) {
  static std::map<double, FredholmSolution> cache;
  auto it = cache.find(T);
  if (it == cache.end()) {
    SolverOptions o;
    o.n = 128;
    o.compute_residual = false;
    it = cache.emplace(T, solve_hT(kPair, T, o)).first;
  }
  return it->second;
}

SampledPath line(const std::vector<double>& g, double slope) {
  SampledPath p;
  p.times = g;
  for (double t : g) p.values.push_back(slope * t);
  return p;
}

}  // namespace

TEST(StochasticIntegral, UnitSolutionTelescopes) {
  SolverOptions o;
  o.n = 32;
  o.kernel_scale = 0.0;
  const FredholmSolution one = solve_hT(kPair, 2.0, o);
  ModelParams p;
  p.seed = 3;
  const SampledPath x = simulate_X(p, uniform_grid(2.0, 64));
  EXPECT_NEAR(stochastic_integral_N(x, one), x.values.back(), 1e-13);
}

TEST(StochasticIntegral, DeterministicPathMatchesQuadrature) {
  const FredholmSolution& sol = solution(1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  const double direct = ts.integrate([&](double t) { return sol.evaluate(t); }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(stochastic_integral_N(line(uniform_grid(1.0, 512), 1.0), sol), direct, 1e-4 * direct);
}

TEST(StochasticIntegral, LinearAndHorizonChecked) {
  const FredholmSolution& sol = solution(1.0);
  const auto g = uniform_grid(1.0, 128);
  ModelParams p;
  p.seed = 8;
  const SampledPath a = simulate_X(p, g, 0), b = simulate_X(p, g, 1);
  SampledPath c = a;
  for (std::size_t k = 0; k < g.size(); ++k) c.values[k] = 1.5 * a.values[k] - 0.5 * b.values[k];
  EXPECT_NEAR(stochastic_integral_N(c, sol),
              1.5 * stochastic_integral_N(a, sol) - 0.5 * stochastic_integral_N(b, sol), 1e-12);
  EXPECT_THROW(stochastic_integral_N(line(uniform_grid(2.0, 16), 1.0), sol), DomainError);
}

TEST(Mle, RecoversPureDrift) {
  for (double T : {1.0, 10.0}) {
    const auto g = uniform_grid(T, 512);
    const EstimateResult r = mle(line(g, 2.5), kPair, solution(T));
    EXPECT_NEAR(r.theta_hat, 2.5, 2.5e-4) << "T = " << T;
    EXPECT_GT(r.qvar, 0.0);
    EXPECT_DOUBLE_EQ(r.horizon, T);
  }
}

TEST(Mle, StandardErrorsAreConsistent) {
  const FredholmSolution& sol = solution(10.0);
  const EstimateResult r = mle(line(uniform_grid(10.0, 64), 1.0), kPair, sol);
  const auto& c = sol.context->kernel.constants();
  const double j = weighted_integral(sol);
  EXPECT_NEAR(r.qvar, c.gamma_h1 * c.gamma_h1 * j, 1e-12);
  EXPECT_NEAR(r.std_err_nominal, std::pow(r.qvar / (c.gamma_h1 * c.gamma_h1), -0.5), 1e-12);
  EXPECT_NEAR(r.std_err, r.std_err_nominal / c.delta_h1, 1e-12);
}

TEST(Mle, SigmaReduction) {
  // With sigma2 / sigma1 = 1 the same solution serves sigma1 = sigma2 = 2.
  const auto g = uniform_grid(10.0, 256);
  const EstimateResult one = mle(line(g, 1.7), kPair, solution(10.0), 1.0, 1.0);
  const EstimateResult two = mle(line(g, 1.7), kPair, solution(10.0), 2.0, 2.0);
  EXPECT_NEAR(two.theta_hat, one.theta_hat, 1e-12);
  EXPECT_NEAR(two.std_err, 2.0 * one.std_err, 1e-12);
  EXPECT_THROW(mle(line(g, 1.0), kPair, solution(10.0), 1.0, 2.0), DomainError);
  EXPECT_THROW(mle(line(g, 1.0), HurstPair::make(0.55, 0.8), solution(10.0)), DomainError);
  EXPECT_THROW(mle(line(g, 1.0), kPair, solution(10.0), 0.0, 0.0), DomainError);
}

TEST(LogLikelihood, QuadraticWithVertexAtEstimate) {
  ModelParams p;
  p.seed = 5;
  const auto g = uniform_grid(10.0, 128);
  const SampledPath x = simulate_X(p, g);
  const FredholmSolution& sol = solution(10.0);
  const EstimateResult r = mle(x, kPair, sol);
  EXPECT_DOUBLE_EQ(log_likelihood(x, 0.0, sol, kPair), 0.0);
  const double h = 1e-2;
  const double l0 = log_likelihood(x, r.theta_hat, sol, kPair);
  EXPECT_GT(l0, log_likelihood(x, r.theta_hat + h, sol, kPair));
  EXPECT_GT(l0, log_likelihood(x, r.theta_hat - h, sol, kPair));
  const auto& c = sol.context->kernel.constants();
  const double second = (log_likelihood(x, 1.0 + h, sol, kPair) - 2 * log_likelihood(x, 1.0, sol, kPair) +
                         log_likelihood(x, 1.0 - h, sol, kPair)) / (h * h);
  const double ratio = c.delta_h1 / c.gamma_h1;
  EXPECT_NEAR(second, -ratio * ratio * r.qvar, 1e-6 * ratio * ratio * r.qvar);
  double best = -1e300, arg = 0.0;
  for (int i = -400; i <= 400; ++i) {
    const double t = r.theta_hat + 0.001 * i;
    const double v = log_likelihood(x, t, sol, kPair);
    if (v > best) best = v, arg = t;
  }
  EXPECT_NEAR(arg, r.theta_hat, 0.001);
}

TEST(MonteCarlo, ZeroDriftIsUnbiasedAndDeterministic) {
  MonteCarloConfig c;
  c.model.theta = 0.0;
  c.model.seed = 77;
  c.T = 10.0;
  c.grid_cells = 128;
  c.replications = 1000;
  c.solver.n = 64;
  c.solver.compute_residual = false;
  c.threads = 1;
  const MonteCarloRun a = run_montecarlo(c);
  EXPECT_LE(std::abs(a.summary.mean), 3.0 * a.summary.sd / std::sqrt(1000.0));
  c.threads = 3;
  const MonteCarloRun b = run_montecarlo(c);
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  c.replications = 1;
  EXPECT_THROW(run_montecarlo(c), DomainError);
}

TEST(KsNormal, DetectsShift) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z;
  std::vector<double> good(2000), shifted(2000);
  for (std::size_t i = 0; i < good.size(); ++i) {
    good[i] = z(rng);
    shifted[i] = z(rng) + 0.3;
  }
  EXPECT_GT(ks_normal(good).p_value, 0.01);
  EXPECT_LT(ks_normal(shifted).p_value, 1e-6);
  EXPECT_THROW(ks_normal({}), DomainError);
}
