#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <memory>
#include <vector>

#include "mfbm/kernel.hpp"

namespace mfbm {

/// A MixedKernel together with its fast kappa0 table. Immutable, shared by
/// solutions so that they can be evaluated off the mesh.
struct KernelContext {
  explicit KernelContext(const HurstPair& pair);

  MixedKernel kernel;
  Kappa0Table kappa0;

  /// kappa(s, u) using the tabulated kappa0.
  double kappa(double s, double u) const;
};

std::shared_ptr<const KernelContext> make_context(const HurstPair& pair);

/// Mesh on [0, T], graded toward both endpoints. The first and last quarter of
/// the cells follow x = L T (4k/n)^q (mirrored at T) and the middle half is
/// uniform, with L chosen so the node spacing is continuous.
struct Mesh {
  double T = 1.0;
  std::vector<double> nodes;
  double grading = 1.0;

  static Mesh graded(double T, std::size_t cells, double grading);
  std::size_t cells() const { return nodes.size() - 1; }
  /// Collocation points: cell ends and midpoints, 2 cells() + 1 in total.
  std::vector<double> points() const;
  /// Index k of the cell [x_k, x_{k+1}] containing u (last cell for u = T).
  std::size_t cell_of(double u) const;
};

/// Default grading exponent max(2, 1/(2 - 2 H1), 1/(H2 - H1)), capped at 6 and
/// so that the smallest cell stays above 1e-12 T.
double default_grading(const HurstPair& pair, std::size_t cells);

struct DenseSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

/// Product-integration weights w_j(u) = int_0^T kappa(s, u) b_j(s) ds for the
/// continuous piecewise-quadratic Lagrange basis b_j attached to
/// mesh.points(). Accepts any u in [0, T], on or off the mesh.
std::vector<double> product_weights(const KernelContext& ctx, const Mesh& mesh, double u);

/// A = I + scale / gamma^2 * W with W[i][j] = w_j(z_i) over the collocation
/// points z_i, b = 1. `kernel_scale`
/// multiplies kappa; 0 gives the identity, rho^2 handles sigma2/sigma1 = rho.
DenseSystem assemble(const KernelContext& ctx, const Mesh& mesh, double kernel_scale = 1.0,
                     unsigned threads = 0);

struct SolverOptions {
  std::size_t n = 256;        // mesh cells
  double grading = 0.0;       // 0 selects default_grading
  double kernel_scale = 1.0;  // factor on kappa
  double cond_limit = 1e10;
  int max_retries = 3;
  bool compute_residual = true;
  unsigned threads = 0;
};

struct FredholmSolution {
  std::shared_ptr<const KernelContext> context;
  Mesh mesh;
  std::vector<double> points;    // collocation points, mesh.points()
  std::vector<double> h_values;  // h at the collocation points
  double kernel_scale = 1.0;
  double cond_estimate = 0.0;
  double lambda_probe = 0.0;
  double residual_sup = -1.0;  // negative when not computed
  double requested_T = 0.0;
  int retries = 0;
  double min_h = 0.0;   // positivity diagnostic
  bool positive = true;

  /// Piecewise-quadratic interpolant of the nodal values.
  double interpolate(double u) const;
  /// Nystrom interpolant 1 - scale/gamma^2 * sum_j w_j(u) h_j (the natural
  /// extension of the discrete solution, equal to h_values at the points).
  double evaluate(double u) const;
  double horizon() const { return mesh.T; }
};

/// Solve h(u) + scale/gamma^2 int_0^T kappa(s, u) h(s) ds = 1. Retries at
/// T (1 + 1e-3)^k when the condition estimate exceeds the limit and throws
/// ExceptionalHorizonError after max_retries perturbations.
FredholmSolution solve_hT(std::shared_ptr<const KernelContext> ctx, double T,
                          const SolverOptions& opts = {});
FredholmSolution solve_hT(const HurstPair& pair, double T, const SolverOptions& opts = {});

struct ResidualPoint {
  double u = 0.0;
  double value = 0.0;
};

/// Equation residual of the Nystrom interpolant at three interior points per
/// cell (fractions 1/4, 1/2, 3/4).
std::vector<ResidualPoint> residual_profile(const FredholmSolution& sol, unsigned threads = 0);

/// Sup of |residual_profile|.
double residual_sup(const FredholmSolution& sol, unsigned threads = 0);

/// int_0^T h(t) t^{1-2H1} dt for the piecewise-quadratic h, with exact power
/// moments on cells near the origin.
double weighted_integral(const FredholmSolution& sol);

/// <N>(T) = gamma^2 * weighted_integral(sol).
double quadratic_char(const FredholmSolution& sol);

struct VarianceProbePoint {
  double T = 0.0;
  double varproxy = 0.0;  // 1 / (delta^2 int h t^{1-2H1} dt)
  double scaled = 0.0;    // T^{2-2H2} varproxy
};

struct VarianceProbe {
  std::vector<VarianceProbePoint> points;
  double last_spread = 0.0;  // relative spread of the last two scaled entries
  bool stabilized = false;   // last_spread <= 5%
};

VarianceProbe asymptotic_variance_probe(const HurstPair& pair, const std::vector<double>& horizons,
                                        const SolverOptions& opts = {});

}  // namespace mfbm
