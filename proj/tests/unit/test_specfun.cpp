#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/hypergeometric_pFq.hpp>
#include <cmath>
#include <random>

#include "mfbm/errors.hpp"
#include "mfbm/quadrature.hpp"
#include "mfbm/specfun.hpp"

using namespace mfbm;

TEST(Gamma, KnownValues) {
  EXPECT_DOUBLE_EQ(gamma_fn(1.0), 1.0);
  EXPECT_NEAR(gamma_fn(1.5), 0.8862269254527580, 1e-15);
  EXPECT_NEAR(gamma_fn(5.0), 24.0, 1e-12);
  EXPECT_THROW(gamma_fn(0.0), DomainError);
  EXPECT_THROW(gamma_fn(-1.5), DomainError);
}

TEST(Beta, KnownValues) {
  EXPECT_NEAR(beta_fn(1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(beta_fn(2.0, 3.0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(beta_fn(0.5, 0.5), M_PI, 1e-13);
  EXPECT_THROW(beta_fn(0.0, 1.0), DomainError);
}

TEST(Hyp2F1, Examples) {
  EXPECT_DOUBLE_EQ(hyp2f1({0.0, 0.7, 1.4, 0.3}), 1.0);
  EXPECT_DOUBLE_EQ(hyp2f1({0.4, 0.7, 1.4, 0.0}), 1.0);
  EXPECT_NEAR(hyp2f1({0.5, 0.5, 2.0, 1.0}), 4.0 / M_PI, 1e-12);
  EXPECT_NEAR(hyp2f1({1.0, 1.0, 2.0, 0.5}), 2.0 * std::log(2.0), 1e-12);
}

TEST(Hyp2F1, AgreesWithSeriesInsideUnitDisc) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = -1.0 + 2.0 * u(rng), b = 0.1 + 1.5 * u(rng), c = b + 0.1 + 1.5 * u(rng);
    const double x = -0.6 + 1.2 * u(rng);
    const double series = boost::math::hypergeometric_pFq({a, b}, {c}, x);
    EXPECT_NEAR(hyp2f1({a, b, c, x}), series, 1e-11 * std::abs(series)) << a << " " << b << " " << c << " " << x;
  }
}

TEST(Hyp2F1, PfaffBranchMatchesDirectIntegral) {
  const Hyp2F1 f(0.7, 0.4, 1.9);
  for (double x : {-0.1, -1.0, -4.9}) EXPECT_NEAR(f(x), f.euler(x), 1e-12 * f.euler(x));
}

TEST(Hyp2F1, DomainAndDivergence) {
  EXPECT_THROW(hyp2f1({0.5, 1.0, 1.0, 0.2}), DomainError);   // c <= b
  EXPECT_THROW(hyp2f1({0.5, -0.2, 1.0, 0.2}), DomainError);  // b <= 0
  EXPECT_THROW(hyp2f1({0.5, 0.5, 1.0, 1.2}), DomainError);   // x > 1
  EXPECT_THROW(hyp2f1({1.0, 1.0, 2.0, 1.0}), NumericError);  // c - a - b = 0
}

TEST(Hyp2F1, NondecreasingInX) {
  const Hyp2F1 f(0.6, 0.8, 2.1);
  double prev = f(0.0);
  for (int i = 1; i < 100; ++i) {
    const double v = f(i / 100.0);
    EXPECT_GE(v, prev);
    prev = v;
  }
}

TEST(HypBounds, Examples) {
  EXPECT_TRUE(check_hyp_bounds({0.8, 1.2, 2.5, 0.4}, BoundCase::kPositiveArgument).holds);
  const auto at_zero = check_hyp_bounds({1.0, 2.0, 3.0, 0.0}, BoundCase::kNegativeArgument);
  EXPECT_TRUE(at_zero.holds);
  EXPECT_DOUBLE_EQ(at_zero.value, 1.0);
  EXPECT_DOUBLE_EQ(at_zero.bound, 1.0);
  EXPECT_THROW(check_hyp_bounds({1.5, 2.0, 3.0, 0.5}, BoundCase::kNegativeArgument), DomainError);
  EXPECT_THROW(check_hyp_bounds({0.5, 1.0, 1.5, 0.5}, BoundCase::kPositiveArgument), DomainError);
}

TEST(Quadrature, GaussJacobiIntegratesPolynomialsExactly) {
  // int_0^1 t^p (1-t)^q t^k dt = B(p + k + 1, q + 1)
  const double p = -0.4, q = 0.3;
  const quad::Rule r = quad::jacobi_unit(8, p, q);
  for (int k = 0; k < 16; ++k) {
    EXPECT_NEAR(r.apply([&](double t) { return std::pow(t, k); }), beta_fn(p + k + 1, q + 1), 1e-13);
  }
}

TEST(Quadrature, GradedEndpointRule) {
  // int_0^1 w^p sqrt(w) dw with a non-smooth factor at 0
  const double p = -0.6;
  const quad::Rule r = quad::graded_endpoint_rule(p, 40, 12, 12);
  EXPECT_NEAR(r.apply([](double w) { return std::sqrt(w); }), 1.0 / (p + 1.5), 1e-13);
  const quad::Rule s = quad::scale_unit_rule(r, p, 3.0);
  EXPECT_NEAR(s.apply([](double) { return 1.0; }), std::pow(3.0, p + 1) / (p + 1), 1e-12);
}
