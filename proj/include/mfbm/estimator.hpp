#pragma once

#include <vector>

#include "mfbm/fbm_sim.hpp"
#include "mfbm/fredholm.hpp"
#include "mfbm/interp.hpp"

namespace mfbm {

struct SolverDiagnostics {
  double cond_estimate = 0.0;
  double residual_sup = -1.0;
  double lambda_probe = 0.0;
  double horizon_used = 0.0;
  int retries = 0;
};

/// Output of the drift MLE. All quantities refer to the original model, with
/// sigma1 scaled back in.
struct EstimateResult {
  double theta_hat = 0.0;
  double n_value = 0.0;          // N(T) = int h dY of the reduced path
  double qvar = 0.0;             // <N>(T) = gamma^2 int h t^{1-2H1} dt
  double std_err = 0.0;          // sigma1 / (delta sqrt(J)), J = int h t^{1-2H1} dt
  double std_err_nominal = 0.0;  // sigma1 / sqrt(J)
  double horizon = 0.0;
  SolverDiagnostics diagnostics;
};

/// Riemann-Stieltjes sum sum_k h(m_k) (path_{k+1} - path_k) over the path's
/// cells, h taken from a monotone cubic interpolant of the solution's nodal
/// values at the cell midpoints m_k.
double stochastic_integral_N(const SampledPath& path, const FredholmSolution& sol);

/// MLE from an observed X path. X is divided by sigma1, transformed to Y,
/// and theta_hat = sigma1 gamma N / (delta <N>). The solution must have been
/// computed with kernel_scale (sigma2/sigma1)^2.
EstimateResult mle(const SampledPath& x, const HurstPair& pair, const FredholmSolution& sol,
                   double sigma1 = 1.0, double sigma2 = 1.0);

/// log L(theta) = t (delta/gamma) N - t^2 (delta/gamma)^2 <N> / 2, t = theta/sigma1.
/// Quadratic in theta with vertex at theta_hat.
double log_likelihood(const SampledPath& x, double theta, const FredholmSolution& sol,
                      const HurstPair& pair, double sigma1 = 1.0, double sigma2 = 1.0);

/// Precomputed estimator for many paths on one grid (Monte Carlo use).
class Estimator {
 public:
  Estimator(const FredholmSolution& sol, const std::vector<double>& grid, double sigma1 = 1.0,
            double sigma2 = 1.0);

  EstimateResult estimate(const SampledPath& x) const;
  /// N(T) for a path that is already in the Y domain and reduced by sigma1.
  double integral(const SampledPath& y) const;

 private:
  const FredholmSolution* sol_;
  std::vector<double> grid_;
  std::vector<double> h_mid_;
  double sigma1_;
  EstimateResult base_;  // fields that do not depend on the path
  double ratio_ = 0.0;   // delta / gamma
};

}  // namespace mfbm
