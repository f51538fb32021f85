#include "mfbm/fbm_sim.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "mfbm/errors.hpp"
#include "mfbm/parallel.hpp"
#include "mfbm/quadrature.hpp"

namespace mfbm {

namespace {

constexpr std::size_t kJacobiPoints = 16;
constexpr std::size_t kCellPoints = 12;

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Cache key: Hurst index and grid (n, T).
using GridKey = std::tuple<double, std::size_t, double>;

GridKey key_of(double h, const std::vector<double>& grid) {
  return {h, grid.size(), grid.back()};
}

template <class T>
std::shared_ptr<const T> cached(std::map<GridKey, std::shared_ptr<const T>>& cache, std::mutex& mu,
                                double h, const std::vector<double>& grid) {
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key_of(h, grid));
    if (it != cache.end()) return it->second;
  }
  auto built = std::make_shared<const T>(h, grid);
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key_of(h, grid), std::move(built)).first->second;
}

double fgn_autocov(double h, std::size_t lag) {
  const double k = static_cast<double>(lag);
  const double e = 2.0 * h;
  return 0.5 * (std::pow(k + 1.0, e) - 2.0 * std::pow(k, e) + std::pow(std::abs(k - 1.0), e));
}

}  // namespace

std::string to_string(PathKind kind) {
  switch (kind) {
    case PathKind::kX:
      return "X";
    case PathKind::kY:
      return "Y";
    case PathKind::kFbm:
      return "fbm";
    case PathKind::kMartingale:
      return "martingale";
  }
  return "unknown";
}

std::vector<double> uniform_grid(double T, std::size_t n) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("uniform_grid: horizon must be positive");
  if (n < 1) throw DomainError("uniform_grid: need at least one cell");
  std::vector<double> t(n + 1);
  for (std::size_t k = 0; k <= n; ++k) t[k] = T * static_cast<double>(k) / static_cast<double>(n);
  t.back() = T;
  return t;
}

void require_uniform(const std::vector<double>& times) {
  if (times.size() < 2 || times.front() != 0.0) {
    throw DomainError("grid must start at 0 and contain at least two points");
  }
  const double dt = times.back() / static_cast<double>(times.size() - 1);
  if (!(dt > 0.0)) throw DomainError("grid must be increasing");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (std::abs(times[k] - times[k - 1] - dt) > 1e-9 * dt) {
      throw DomainError("grid is not uniform at index " + std::to_string(k));
    }
  }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t state = master;
  const std::uint64_t a = splitmix64(state);
  state = a ^ (stream * 0xD1B54A32D192ED03ULL);
  return splitmix64(state);
}

FbmSampler::FbmSampler(double h, const std::vector<double>& grid) : h_(h), grid_(grid) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("simulate_fbm: need 0 < h < 1");
  require_uniform(grid_);
  const auto n = static_cast<Eigen::Index>(grid_.size() - 1);
  const double dt = grid_.back() / static_cast<double>(n);
  const double scale = std::pow(dt, 2.0 * h);
  Eigen::MatrixXd cov(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cov(i, j) = cov(j, i) = scale * fgn_autocov(h, static_cast<std::size_t>(i - j));
    }
  }
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericError("simulate_fbm: covariance not numerically positive definite for h = " +
                       std::to_string(h) + "; add a small diagonal jitter or coarsen the grid");
  }
  lower_ = llt.matrixL();
}

Eigen::VectorXd FbmSampler::increments(std::mt19937_64& rng) const {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(lower_.rows());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng);
  return lower_.triangularView<Eigen::Lower>() * z;
}

SampledPath FbmSampler::sample(std::mt19937_64& rng) const {
  const Eigen::VectorXd inc = increments(rng);
  SampledPath p;
  p.kind = PathKind::kFbm;
  p.times = grid_;
  p.values.assign(grid_.size(), 0.0);
  for (Eigen::Index i = 0; i < inc.size(); ++i) {
    p.values[static_cast<std::size_t>(i) + 1] = p.values[static_cast<std::size_t>(i)] + inc[i];
  }
  return p;
}

std::shared_ptr<const FbmSampler> fbm_sampler(double h, const std::vector<double>& grid) {
  static std::map<GridKey, std::shared_ptr<const FbmSampler>> cache;
  static std::mutex mu;
  return cached(cache, mu, h, grid);
}

SampledPath simulate_fbm(double h, const std::vector<double>& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return fbm_sampler(h, grid)->sample(rng);
}

SampledPath simulate_X(const ModelParams& params, const std::vector<double>& grid,
                       std::uint64_t replication) {
  if (!(params.sigma1 >= 0.0) || !(params.sigma2 >= 0.0)) {
    throw DomainError("simulate_X: sigma1 and sigma2 must be non-negative");
  }
  require_uniform(grid);
  SampledPath x;
  x.kind = PathKind::kX;
  x.times = grid;
  x.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) x.values[k] = params.theta * grid[k];
  const std::array<std::pair<double, double>, 2> parts{
      {{params.hurst.h1, params.sigma1}, {params.hurst.h2, params.sigma2}}};
  for (std::size_t c = 0; c < parts.size(); ++c) {
    if (parts[c].second == 0.0) continue;
    std::mt19937_64 rng(derive_seed(params.seed, 2 * replication + c));
    const SampledPath b = fbm_sampler(parts[c].first, grid)->sample(rng);
    for (std::size_t k = 0; k < grid.size(); ++k) x.values[k] += parts[c].second * b.values[k];
  }
  return x;
}

YTransform::YTransform(double h, const std::vector<double>& grid) : h_(h), grid_(grid) {
  if (!(h >= 0.5 && h < 1.0)) throw DomainError("transform_Y: need 1/2 <= h1 < 1");
  require_uniform(grid_);
  const std::size_t n = grid_.size() - 1;
  const double dt = grid_.back() / static_cast<double>(n);
  const double a = h - 0.5;
  // W[j][k] = dt^{2-2H} w(j, k) with w(j, k) = int_k^{k+1} (j - x)^{-a} x^{-a} dx,
  // and the slope of X on a cell is its increment over dt.
  const double scale = std::pow(dt, 1.0 - 2.0 * h);
  const quad::Rule jac = quad::jacobi_unit(kJacobiPoints, -a, 0.0);
  const quad::Rule& gl = quad::gauss_legendre(kCellPoints);
  const double corner = beta_fn(1.0 - a, 1.0 - a);
  weights_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t j = 1; j <= n; ++j) {
    const double jd = static_cast<double>(j);
    for (std::size_t k = 0; k < j; ++k) {
      const double kd = static_cast<double>(k);
      double w;
      if (a == 0.0) {
        w = 1.0;
      } else if (j == 1) {
        w = corner;
      } else if (k == 0) {
        w = jac.apply([&](double x) { return std::pow(jd - x, -a); });
      } else if (k + 1 == j) {
        w = jac.apply([&](double tau) { return std::pow(jd - tau, -a); });
      } else {
        w = 0.0;
        for (std::size_t q = 0; q < gl.size(); ++q) {
          const double x = kd + 0.5 * (1.0 + gl.nodes[q]);
          w += 0.5 * gl.weights[q] * std::pow((jd - x) * x, -a);
        }
      }
      weights_(static_cast<Eigen::Index>(j - 1), static_cast<Eigen::Index>(k)) = scale * w;
    }
  }
}

Eigen::VectorXd YTransform::row(std::size_t j) const {
  if (j == 0 || j >= grid_.size()) throw DomainError("YTransform::row: index out of range");
  return weights_.row(static_cast<Eigen::Index>(j - 1)).transpose();
}

SampledPath YTransform::apply(const SampledPath& x) const {
  if (x.times.size() != grid_.size() || x.times.back() != grid_.back()) {
    throw DomainError("transform_Y: path grid does not match the transform grid");
  }
  const auto n = static_cast<Eigen::Index>(grid_.size() - 1);
  Eigen::VectorXd inc(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    inc[k] = x.values[static_cast<std::size_t>(k) + 1] - x.values[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd y = weights_.triangularView<Eigen::Lower>() * inc;
  SampledPath out;
  out.kind = PathKind::kY;
  out.times = grid_;
  out.values.assign(grid_.size(), 0.0);
  for (Eigen::Index k = 0; k < n; ++k) out.values[static_cast<std::size_t>(k) + 1] = y[k];
  return out;
}

std::shared_ptr<const YTransform> y_transform(double h, const std::vector<double>& grid) {
  static std::map<GridKey, std::shared_ptr<const YTransform>> cache;
  static std::mutex mu;
  return cached(cache, mu, h, grid);
}

SampledPath transform_Y(const SampledPath& x, const HurstPair& pair) {
  require_uniform(x.times);
  return y_transform(pair.h1, x.times)->apply(x);
}

MolchanReport molchan_check(const HurstPair& pair, const std::vector<double>& grid,
                            std::size_t replications, std::uint64_t seed, unsigned threads) {
  require_uniform(grid);
  const std::size_t n = grid.size() - 1;
  if (n % 2 != 0) throw DomainError("molchan_check: need an even number of cells");
  if (replications < 2) throw DomainError("molchan_check: need at least 2 replications");
  const auto sampler = fbm_sampler(pair.h1, grid);
  const auto transform = y_transform(pair.h1, grid);
  std::vector<double> y_end(replications), y_mid(replications);
  parallel_for(replications, threads, [&](std::size_t r) {
    std::mt19937_64 rng(derive_seed(seed, r));
    const SampledPath y = transform->apply(sampler->sample(rng));
    y_end[r] = y.values[n];
    y_mid[r] = y.values[n / 2];
  });
  const double reps = static_cast<double>(replications);
  double m_end = 0.0, m_mid = 0.0;
  for (std::size_t r = 0; r < replications; ++r) {
    m_end += y_end[r] / reps;
    m_mid += y_mid[r] / reps;
  }
  double v_end = 0.0, v_mid = 0.0, v_inc = 0.0, c_inc = 0.0;
  for (std::size_t r = 0; r < replications; ++r) {
    const double de = y_end[r] - m_end, dm = y_mid[r] - m_mid;
    v_end += de * de;
    v_mid += dm * dm;
    v_inc += (de - dm) * (de - dm);
    c_inc += (de - dm) * dm;
  }
  MolchanReport rep;
  rep.t = grid.back();
  rep.replications = replications;
  rep.var_empirical = v_end / (reps - 1.0);
  const double gamma = molchan_gamma(pair.h1);
  rep.var_theory = gamma * gamma * std::pow(rep.t, 2.0 - 2.0 * pair.h1) / (2.0 - 2.0 * pair.h1);
  const Eigen::VectorXd a = transform->row(n);
  // Exact variance of Y(t_n) = a . increments under the Toeplitz fGn covariance.
  {
    const double dt = grid.back() / static_cast<double>(n);
    const double scale = std::pow(dt, 2.0 * pair.h1);
    std::vector<double> acov(n);
    for (std::size_t k = 0; k < n; ++k) acov[k] = scale * fgn_autocov(pair.h1, k);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) row += acov[i > j ? i - j : j - i] * a[static_cast<Eigen::Index>(j)];
      rep.var_discrete += a[static_cast<Eigen::Index>(i)] * row;
    }
  }
  rep.rel_error = std::abs(rep.var_empirical / rep.var_theory - 1.0);
  rep.increment_corr = c_inc / std::sqrt(v_inc * v_mid);
  return rep;
}

}  // namespace mfbm
