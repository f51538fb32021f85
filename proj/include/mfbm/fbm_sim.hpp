#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mfbm/kernel.hpp"

namespace mfbm {

struct ModelParams {
  double theta = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  HurstPair hurst = HurstPair::make(0.6, 0.8);
  std::uint64_t seed = 0;
};

enum class PathKind { kX, kY, kFbm, kMartingale };

std::string to_string(PathKind kind);

/// A process sampled on a uniform grid 0 = t_0 < ... < t_n = T.
struct SampledPath {
  std::vector<double> times;
  std::vector<double> values;
  PathKind kind = PathKind::kX;

  double horizon() const { return times.back(); }
  std::size_t cells() const { return times.size() - 1; }
};

/// t_k = k T / n, k = 0..n.
std::vector<double> uniform_grid(double T, std::size_t n);

/// Throws DomainError unless the grid starts at 0 and is uniform to 1e-9.
void require_uniform(const std::vector<double>& times);

/// Seed of stream `stream` derived from `master` by two rounds of SplitMix64.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Exact fBm sampler on a uniform grid: Cholesky factor of the fractional
/// Gaussian noise covariance, samples are cumulative sums of L z.
class FbmSampler {
 public:
  FbmSampler(double h, const std::vector<double>& grid);

  SampledPath sample(std::mt19937_64& rng) const;
  /// Increment vector L z for a standard normal z.
  Eigen::VectorXd increments(std::mt19937_64& rng) const;

  double hurst() const { return h_; }
  const std::vector<double>& grid() const { return grid_; }

 private:
  double h_;
  std::vector<double> grid_;
  Eigen::MatrixXd lower_;
};

/// Shared sampler for (h, grid), built once per process.
std::shared_ptr<const FbmSampler> fbm_sampler(double h, const std::vector<double>& grid);

SampledPath simulate_fbm(double h, const std::vector<double>& grid, std::uint64_t seed);

/// X = theta t + sigma1 B^{H1} + sigma2 B^{H2}. The two fBms use streams
/// 2 r and 2 r + 1 of params.seed, r being the replication index.
SampledPath simulate_X(const ModelParams& params, const std::vector<double>& grid,
                       std::uint64_t replication = 0);

/// Weights of the discrete transform Y(t_j) = sum_k W[j][k] (X_{k+1} - X_k)/dt
/// with W[j][k] = int over cell k of (t_j - s)^{1/2-H} s^{1/2-H} ds, i.e.
/// X linear on each cell.
class YTransform {
 public:
  YTransform(double h, const std::vector<double>& grid);

  SampledPath apply(const SampledPath& x) const;
  /// Row j of the map from increments of X to Y(t_j).
  Eigen::VectorXd row(std::size_t j) const;

 private:
  double h_;
  std::vector<double> grid_;
  Eigen::MatrixXd weights_;  // lower triangular, increments -> Y values
};

std::shared_ptr<const YTransform> y_transform(double h, const std::vector<double>& grid);

/// Y = int_0^t l_{H1}(t, s) dX(s) on the grid of `x`.
SampledPath transform_Y(const SampledPath& x, const HurstPair& pair);

struct MolchanReport {
  double t = 1.0;
  double var_empirical = 0.0;
  double var_theory = 0.0;      // gamma^2 t^{2-2H}/(2-2H)
  double var_discrete = 0.0;    // exact variance of the discretised transform
  double rel_error = 0.0;       // |var_empirical / var_theory - 1|
  double increment_corr = 0.0;  // Corr(Y(t) - Y(t/2), Y(t/2))
  std::size_t replications = 0;
};

/// Pure B^{H1} input (sigma2 = 0): compares the sample variance of Y(t_n) with
/// the Molchan martingale's quadratic characteristic. Only pair.h1 is used.
MolchanReport molchan_check(const HurstPair& pair, const std::vector<double>& grid,
                            std::size_t replications, std::uint64_t seed, unsigned threads = 0);

}  // namespace mfbm
