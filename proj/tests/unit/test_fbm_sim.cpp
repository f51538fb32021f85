#include <gtest/gtest.h>

#include <algorithm>
#include <boost/math/statistics/anderson_darling.hpp>
#include <cmath>

#include "mfbm/errors.hpp"
#include "mfbm/fbm_sim.hpp"

using namespace mfbm;

namespace {

double sample_variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(Grid, UniformAndValidation) {
  const auto g = uniform_grid(2.0, 8);
  ASSERT_EQ(g.size(), 9u);
  EXPECT_DOUBLE_EQ(g[4], 1.0);
  EXPECT_DOUBLE_EQ(g.back(), 2.0);
  EXPECT_NO_THROW(require_uniform(g));
  EXPECT_THROW(require_uniform({0.0, 0.1, 0.3}), DomainError);
  EXPECT_THROW(require_uniform({0.1, 0.2, 0.3}), DomainError);
  EXPECT_THROW(uniform_grid(1.0, 0), DomainError);
}

TEST(Seeds, DeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(42, 3), derive_seed(42, 3));
  EXPECT_NE(derive_seed(42, 3), derive_seed(42, 4));
  EXPECT_NE(derive_seed(42, 3), derive_seed(43, 3));
  const auto g = uniform_grid(1.0, 64);
  const auto a = simulate_fbm(0.7, g, 9), b = simulate_fbm(0.7, g, 9);
  EXPECT_EQ(a.values, b.values);
  EXPECT_EQ(a.values.front(), 0.0);
}

TEST(Fbm, MarginalsVarianceAndSelfSimilarity) {
  const double h = 0.7;
  const auto g = uniform_grid(1.0, 32);
  const auto sampler = fbm_sampler(h, g);
  std::mt19937_64 rng(5);
  const std::size_t reps = 10000;
  std::vector<std::vector<double>> at(5);
  const std::size_t idx[5] = {4, 8, 16, 24, 32};
  for (std::size_t r = 0; r < reps; ++r) {
    const SampledPath p = sampler->sample(rng);
    for (int k = 0; k < 5; ++k) at[k].push_back(p.values[idx[k]]);
  }
  for (int k = 0; k < 5; ++k) {
    const double t = g[idx[k]];
    const double sd = std::pow(t, h);
    const double var = sample_variance(at[k]);
    EXPECT_NEAR(var / (sd * sd), 1.0, 0.05) << "t = " << t;
    std::vector<double> v = at[k];
    std::sort(v.begin(), v.end());
    // 5% critical value of the statistic for a fully specified normal
    EXPECT_LT(boost::math::statistics::anderson_darling_normality_statistic(v, 0.0, sd), 2.492);
  }
  // Var B(2t) / Var B(t) = 2^{2H}
  EXPECT_NEAR(sample_variance(at[2]) / sample_variance(at[1]), std::pow(2.0, 2 * h), 0.1);
}

TEST(SimulateX, ComponentsAndReproducibility) {
  ModelParams p;
  p.theta = 3.0;
  p.sigma1 = 0.0;
  p.sigma2 = 0.0;
  p.seed = 1;
  const auto g = uniform_grid(2.0, 16);
  const SampledPath x = simulate_X(p, g);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_DOUBLE_EQ(x.values[k], 3.0 * g[k]);
  p.sigma1 = 1.0;
  p.sigma2 = 0.5;
  EXPECT_EQ(simulate_X(p, g, 7).values, simulate_X(p, g, 7).values);
  EXPECT_NE(simulate_X(p, g, 7).values, simulate_X(p, g, 8).values);
}

TEST(TransformY, DriftLinearityAndHalf) {
  const HurstPair pair = HurstPair::make(0.6, 0.8);
  const auto g = uniform_grid(10.0, 256);
  SampledPath drift;
  drift.times = g;
  drift.values = g;
  const SampledPath y = transform_Y(drift, pair);
  const double b = beta_fn(0.9, 0.9);
  EXPECT_EQ(y.values[0], 0.0);
  for (std::size_t j = 1; j < g.size(); ++j) {
    EXPECT_NEAR(y.values[j], b * std::pow(g[j], 0.8), 1e-12 * y.values[j]);
  }
  ModelParams p;
  p.seed = 4;
  const SampledPath x1 = simulate_X(p, g, 0), x2 = simulate_X(p, g, 1);
  SampledPath sum = x1;
  for (std::size_t k = 0; k < g.size(); ++k) sum.values[k] = 2.0 * x1.values[k] - 3.0 * x2.values[k];
  const SampledPath ys = transform_Y(sum, pair), y1 = transform_Y(x1, pair), y2 = transform_Y(x2, pair);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(ys.values[k], 2.0 * y1.values[k] - 3.0 * y2.values[k], 1e-11 * (1.0 + std::abs(ys.values[k])));
  }
  const SampledPath yh = transform_Y(x1, HurstPair::make(0.5, 0.8));
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(yh.values[k], x1.values[k], 1e-12);
}

TEST(TransformY, MeanUnderDrift) {
  const HurstPair pair = HurstPair::make(0.6, 0.8);
  const auto g = uniform_grid(1.0, 64);
  ModelParams p;
  p.theta = 2.0;
  p.seed = 12;
  const std::size_t reps = 4000;
  std::vector<double> end(reps);
  for (std::size_t r = 0; r < reps; ++r) end[r] = transform_Y(simulate_X(p, g, r), pair).values.back();
  double m = 0.0;
  for (double v : end) m += v;
  m /= reps;
  const double se = std::sqrt(sample_variance(end) / reps);
  EXPECT_NEAR(m, 2.0 * beta_fn(0.9, 0.9), 3.0 * se);
}

TEST(Molchan, VarianceAndIncrements) {
  for (double h1 : {0.5, 0.6}) {
    const auto rep = molchan_check(HurstPair::make(h1, 0.8), uniform_grid(1.0, 128), 10000, 21);
    EXPECT_LT(rep.rel_error, 0.05);
    EXPECT_LT(std::abs(rep.increment_corr), 0.04);
    EXPECT_NEAR(rep.var_discrete, rep.var_theory, 1e-3 * rep.var_theory);
    EXPECT_EQ(rep.replications, 10000u);
  }
  EXPECT_THROW(molchan_check(HurstPair::make(0.6, 0.8), uniform_grid(1.0, 7), 100, 1), DomainError);
}
