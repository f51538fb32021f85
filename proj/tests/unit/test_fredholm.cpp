#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "mfbm/errors.hpp"
#include "mfbm/fredholm.hpp"

using namespace mfbm;

namespace {

const HurstPair kPair = HurstPair::make(0.6, 0.8);

std::shared_ptr<const KernelContext> context() {
  static const auto ctx = make_context(kPair);
  return ctx;
}

SolverOptions fast(std::size_t n = 64) {
  SolverOptions o;
  o.n = n;
  o.compute_residual = false;
  return o;
}

}  // namespace

TEST(Mesh, GradedStructure) {
  const Mesh m = Mesh::graded(2.0, 64, 3.0);
  ASSERT_EQ(m.cells(), 64u);
  EXPECT_DOUBLE_EQ(m.nodes.front(), 0.0);
  EXPECT_DOUBLE_EQ(m.nodes.back(), 2.0);
  for (std::size_t k = 0; k < 64; ++k) EXPECT_GT(m.nodes[k + 1], m.nodes[k]);
  // symmetric about T/2 and finest at the ends
  for (std::size_t k = 0; k <= 64; ++k) EXPECT_NEAR(m.nodes[k] + m.nodes[64 - k], 2.0, 1e-13);
  EXPECT_LT(m.nodes[1] - m.nodes[0], 1e-2 * (m.nodes[33] - m.nodes[32]));
  const auto pts = m.points();
  ASSERT_EQ(pts.size(), 129u);
  EXPECT_EQ(m.cell_of(2.0), 63u);
  EXPECT_EQ(m.cell_of(0.0), 0u);
  EXPECT_EQ(m.cell_of(pts[41]), 20u);
}

TEST(Mesh, DefaultGrading) {
  EXPECT_DOUBLE_EQ(default_grading(HurstPair::make(0.5, 0.75), 256), 4.0);
  EXPECT_DOUBLE_EQ(default_grading(kPair, 256), 5.0);
  EXPECT_LE(default_grading(HurstPair::make(0.6, 0.65), 256), 6.0);
}

TEST(Assembly, ZeroScaleIsIdentity) {
  const Mesh m = Mesh::graded(1.0, 16, 2.0);
  const DenseSystem sys = assemble(*context(), m, 0.0);
  EXPECT_TRUE(sys.A.isIdentity());
  EXPECT_EQ(sys.b.size(), 33);
}

TEST(Assembly, RowSumsMatchKernelIntegral) {
  // sum_j w_j(u) = int_0^T kappa(s, u) ds; compare with tanh-sinh of kappa.
  const Mesh m = Mesh::graded(1.0, 32, 5.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  const auto& ctx = *context();
  for (double u : {0.0, 0.25, 0.6180339, 1.0}) {
    const auto w = product_weights(ctx, m, u);
    double sum = 0.0;
    for (double v : w) sum += v;
    // |s - u| from the endpoint offset to avoid cancellation next to u.
    const double e = 2.0 * kPair.gap() - 1.0;
    auto left = [&](double s, double sc) {
      const double gap = sc > 0.0 ? sc : u - s;
      return ctx.kernel.kappa0(s, u) * std::pow(s / u, 1.0 - 2.0 * kPair.h1) * std::pow(gap, e);
    };
    auto right = [&](double s, double sc) {
      const double gap = sc < 0.0 ? -sc : s - u;
      return ctx.kernel.kappa0(s, u) * std::pow(gap, e);
    };
    double q = 0.0;
    if (u > 0.0) q += ts.integrate(left, 0.0, u, 1e-13);
    if (u < 1.0) q += ts.integrate(right, u, 1.0, 1e-13);
    EXPECT_NEAR(sum, q, 1e-8 * q) << "u = " << u;
  }
}

TEST(Solver, ResidualPositivityAndDiagnostics) {
  SolverOptions o;
  o.n = 128;
  const FredholmSolution sol = solve_hT(context(), 1.0, o);
  EXPECT_GE(sol.residual_sup, 0.0);
  EXPECT_LE(sol.residual_sup, 1e-6);
  EXPECT_TRUE(sol.positive);
  EXPECT_GT(sol.min_h, 0.0);
  EXPECT_LT(sol.h_values.front(), 1.0);
  EXPECT_EQ(sol.retries, 0);
  EXPECT_GT(sol.cond_estimate, 1.0);
  EXPECT_NEAR(sol.lambda_probe, -std::pow(sol.context->kernel.constants().gamma_h1, 2), 1e-12);
  for (std::size_t i = 0; i < sol.points.size(); i += 7) {
    EXPECT_NEAR(sol.evaluate(sol.points[i]), sol.h_values[i], 1e-12);
    EXPECT_NEAR(sol.interpolate(sol.points[i]), sol.h_values[i], 1e-14);
  }
  const auto profile = residual_profile(sol);
  EXPECT_EQ(profile.size(), 3 * sol.mesh.cells());
  EXPECT_THROW(sol.interpolate(1.5), DomainError);
}

TEST(Solver, WeightedIntegralAgainstQuadrature) {
  const FredholmSolution sol = solve_hT(context(), 1.0, fast(128));
  boost::math::quadrature::tanh_sinh<double> ts;
  double q = 0.0;
  for (std::size_t k = 0; k < sol.mesh.cells(); ++k) {
    const double a = sol.mesh.nodes[k], b = sol.mesh.nodes[k + 1];
    q += ts.integrate([&](double t) { return sol.interpolate(t) * std::pow(t, 1 - 2 * kPair.h1); },
                      a, b, 1e-14);
  }
  EXPECT_NEAR(weighted_integral(sol), q, 1e-12);
  const double g = sol.context->kernel.constants().gamma_h1;
  EXPECT_NEAR(quadratic_char(sol), g * g * weighted_integral(sol), 1e-14);
}

TEST(Solver, KernelScaleZeroGivesOne) {
  SolverOptions o = fast(32);
  o.kernel_scale = 0.0;
  const FredholmSolution sol = solve_hT(context(), 3.0, o);
  for (double v : sol.h_values) EXPECT_DOUBLE_EQ(v, 1.0);
  EXPECT_DOUBLE_EQ(sol.evaluate(1.234), 1.0);
}

TEST(Solver, Errors) {
  EXPECT_THROW(solve_hT(context(), 1.0, fast(8)), DomainError);
  EXPECT_THROW(solve_hT(context(), -1.0, fast()), DomainError);
  SolverOptions o = fast(32);
  o.cond_limit = 1.0;  // every horizon looks exceptional
  try {
    solve_hT(context(), 1.0, o);
    FAIL() << "expected ExceptionalHorizonError";
  } catch (const ExceptionalHorizonError& e) {
    EXPECT_NE(std::string(e.what()).find("horizon"), std::string::npos);
  }
}

TEST(Solver, ScaleCovariance) {
  const FredholmSolution direct = solve_hT(context(), 4.0, fast());
  SolverOptions o = fast();
  o.kernel_scale = std::pow(4.0, 2 * kPair.gap());
  const FredholmSolution unit = solve_hT(context(), 1.0, o);
  for (int i = 0; i <= 40; ++i) EXPECT_NEAR(direct.evaluate(0.1 * i), unit.evaluate(0.025 * i), 1e-10);
}

TEST(Solver, HalfReducesToClassicalEquation) {
  // At H1 = 1/2 the kernel is H2(2H2 - 1)|s - u|^{2H2-2} and gamma = 1.
  const HurstPair half = HurstPair::make(0.5, 0.75);
  SolverOptions o = fast(128);
  o.compute_residual = true;
  const FredholmSolution sol = solve_hT(half, 1.0, o);
  EXPECT_LE(sol.residual_sup, 1e-6);
  EXPECT_NEAR(sol.context->kernel.constants().gamma_h1, 1.0, 1e-14);
  // symmetric about T/2 because the kernel is a function of |s - u|
  for (double u : {0.1, 0.3, 0.45}) EXPECT_NEAR(sol.evaluate(u), sol.evaluate(1.0 - u), 1e-9);
}

TEST(VarianceProbe, DecreasesAndReportsSpread) {
  const VarianceProbe p = asymptotic_variance_probe(kPair, {5.0, 10.0, 20.0}, fast());
  ASSERT_EQ(p.points.size(), 3u);
  EXPECT_GT(p.points[0].varproxy, p.points[1].varproxy);
  EXPECT_GT(p.points[1].varproxy, p.points[2].varproxy);
  EXPECT_NEAR(p.points[2].scaled, std::pow(20.0, 0.4) * p.points[2].varproxy, 1e-12);
  EXPECT_NEAR(p.last_spread, 0.075, 0.01);
}
