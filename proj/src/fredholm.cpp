#include "mfbm/fredholm.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mfbm/errors.hpp"
#include "mfbm/parallel.hpp"

namespace mfbm {

namespace {

constexpr int kGradedLevels = 30;
constexpr std::size_t kGradedInner = 12;
constexpr std::size_t kPiecePoints = 8;
constexpr std::size_t kMinCells = 16;
constexpr std::size_t kCheckLobatto = 5;
constexpr std::size_t kMomentPoints = 16;
constexpr double kZone = 0.25;
constexpr double kMaxGrading = 6.0;
constexpr double kMinCellRatio = 1e-12;

enum class Weight { kNone, kDiagonal, kOrigin };

quad::Rule unit_legendre(std::size_t m) {
  quad::Rule r = quad::gauss_legendre(m);
  for (std::size_t k = 0; k < r.size(); ++k) {
    r.nodes[k] = 0.5 * (1.0 + r.nodes[k]);
    r.weights[k] *= 0.5;
  }
  return r;
}

// Visits the quadrature points of int_0^T kappa(s, u) f(s) ds cell by cell.
// Pieces touching s = u carry the weight |s - u|^{2d-1}; pieces touching s = 0
// left of u carry s^{1-2H1} (both from Gauss-Jacobi on the innermost graded
// piece); pieces closer to a singular point than their own length are bisected.
class RowIntegrator {
 public:
  explicit RowIntegrator(const KernelContext& ctx) : ctx_(ctx) {
    const auto& p = ctx.kernel.pair();
    p_diag_ = 2.0 * p.gap() - 1.0;
    p_origin_ = 1.0 - 2.0 * p.h1;
    diag_ = quad::graded_endpoint_rule(p_diag_, kGradedLevels, kGradedInner, kPiecePoints);
    origin_ = quad::graded_endpoint_rule(p_origin_, kGradedLevels, kGradedInner, kPiecePoints);
    plain_ = unit_legendre(kPiecePoints);
  }

  // visit(k, s, wt): wt is the quadrature weight times kappa(s, u).
  template <class Visit>
  void run(const std::vector<double>& nodes, double u, Visit&& visit) const {
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) piece(k, nodes[k], nodes[k + 1], u, visit);
  }

 private:
  double factor(double s, double u, Weight w) const {
    const double k0 = ctx_.kappa0(s, u);
    const auto& p = ctx_.kernel.pair();
    switch (w) {
      case Weight::kDiagonal:
        return s < u ? k0 * std::pow(s / u, p_origin_) : k0;
      case Weight::kOrigin:
        return k0 * std::pow(u, 2.0 * p.h1 - 1.0) * std::pow(u - s, p_diag_);
      case Weight::kNone:
        break;
    }
    return k0 * phi_singular(p, s, u);
  }

  template <class Visit>
  void piece(std::size_t k, double a, double b, double u, Visit& visit) const {
    if (u > a && u < b) {
      piece(k, a, u, u, visit);
      piece(k, u, b, u, visit);
      return;
    }
    const double len = b - a;
    const bool left_diag = a == u;
    const bool right_diag = b == u;
    const bool origin_active = u > 0.0 && b <= u;
    const bool left_origin = origin_active && a == 0.0;
    double dist = std::numeric_limits<double>::infinity();
    if (!left_diag && !right_diag) dist = std::min(std::abs(u - a), std::abs(u - b));
    if (origin_active && a > 0.0) dist = std::min(dist, a);
    const bool left_sing = left_diag || left_origin;
    if (dist < len || (left_sing && right_diag)) {
      const double mid = 0.5 * (a + b);
      piece(k, a, mid, u, visit);
      piece(k, mid, b, u, visit);
      return;
    }
    if (left_sing) {
      const Weight w = left_diag ? Weight::kDiagonal : Weight::kOrigin;
      const quad::Rule& r = left_diag ? diag_ : origin_;
      const double scale = std::pow(len, (left_diag ? p_diag_ : p_origin_) + 1.0);
      for (std::size_t j = 0; j < r.size(); ++j) {
        const double s = a + len * r.nodes[j];
        visit(k, s, scale * r.weights[j] * factor(s, u, w));
      }
      return;
    }
    if (right_diag) {
      const double scale = std::pow(len, p_diag_ + 1.0);
      for (std::size_t j = 0; j < diag_.size(); ++j) {
        const double s = b - len * diag_.nodes[j];
        visit(k, s, scale * diag_.weights[j] * factor(s, u, Weight::kDiagonal));
      }
      return;
    }
    for (std::size_t j = 0; j < plain_.size(); ++j) {
      const double s = a + len * plain_.nodes[j];
      visit(k, s, len * plain_.weights[j] * factor(s, u, Weight::kNone));
    }
  }

  const KernelContext& ctx_;
  double p_diag_ = 0.0;
  double p_origin_ = 0.0;
  quad::Rule diag_, origin_, plain_;
};

// Quadratic Lagrange basis on a cell at tau = 0, 1/2, 1.
std::array<double, 3> lagrange3(double tau) {
  return {2.0 * (tau - 0.5) * (tau - 1.0), -4.0 * tau * (tau - 1.0), 2.0 * tau * (tau - 0.5)};
}

std::vector<double> row_weights(const RowIntegrator& integ, const Mesh& mesh, double u) {
  const auto& x = mesh.nodes;
  std::vector<double> w(2 * mesh.cells() + 1, 0.0);
  integ.run(x, u, [&](std::size_t k, double s, double wt) {
    const auto b = lagrange3((s - x[k]) / (x[k + 1] - x[k]));
    w[2 * k] += wt * b[0];
    w[2 * k + 1] += wt * b[1];
    w[2 * k + 2] += wt * b[2];
  });
  return w;
}

double local_value(const std::vector<double>& x, const std::vector<double>& y, std::size_t k,
                   double s) {
  const auto b = lagrange3((s - x[k]) / (x[k + 1] - x[k]));
  return b[0] * y[2 * k] + b[1] * y[2 * k + 1] + b[2] * y[2 * k + 2];
}

FredholmSolution solve_once(std::shared_ptr<const KernelContext> ctx, double T,
                            const SolverOptions& opts) {
  const auto& pair = ctx->kernel.pair();
  const double q = opts.grading > 0.0 ? opts.grading : default_grading(pair, opts.n);
  FredholmSolution sol;
  sol.mesh = Mesh::graded(T, opts.n, q);
  sol.points = sol.mesh.points();
  sol.kernel_scale = opts.kernel_scale;
  const DenseSystem sys = assemble(*ctx, sol.mesh, opts.kernel_scale, opts.threads);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(sys.A);
  const double rcond = lu.rcond();
  sol.cond_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
  const Eigen::VectorXd h = lu.solve(sys.b);
  sol.h_values.assign(h.data(), h.data() + h.size());
  for (double v : sol.h_values) {
    if (!std::isfinite(v)) throw NumericError("solve_hT: non-finite solution value");
  }
  const double gamma = ctx->kernel.constants().gamma_h1;
  const double lam = -gamma * gamma * std::pow(T, -2.0 * pair.gap());
  sol.lambda_probe = opts.kernel_scale > 0.0 ? lam / opts.kernel_scale : lam;
  sol.min_h = *std::min_element(sol.h_values.begin(), sol.h_values.end());
  sol.positive = sol.min_h > 0.0;
  sol.context = std::move(ctx);
  return sol;
}

}  // namespace

KernelContext::KernelContext(const HurstPair& pair) : kernel(pair), kappa0(kernel) {}

double KernelContext::kappa(double s, double u) const {
  if (s == u) return 0.0;
  return kappa0(s, u) * phi_singular(kernel.pair(), s, u);
}

std::shared_ptr<const KernelContext> make_context(const HurstPair& pair) {
  return std::make_shared<const KernelContext>(pair);
}

Mesh Mesh::graded(double T, std::size_t cells, double grading) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("Mesh: horizon must be positive");
  if (cells < 2) throw DomainError("Mesh: need at least 2 cells");
  if (!(grading >= 1.0)) throw DomainError("Mesh: grading exponent must be >= 1");
  Mesh m;
  m.T = T;
  m.grading = grading;
  m.nodes.resize(cells + 1);
  // End zones of fraction kZone of the cells and length `zone` of T, joined C1
  // to a uniform middle section.
  const double zone = kZone / (grading * (1.0 - 2.0 * kZone) + 2.0 * kZone);
  const double slope = (1.0 - 2.0 * zone) / (1.0 - 2.0 * kZone);
  for (std::size_t k = 0; k <= cells; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(cells);
    if (t <= kZone) {
      m.nodes[k] = T * zone * std::pow(t / kZone, grading);
    } else if (t >= 1.0 - kZone) {
      m.nodes[k] = T - T * zone * std::pow((1.0 - t) / kZone, grading);
    } else {
      m.nodes[k] = T * (zone + (t - kZone) * slope);
    }
  }
  m.nodes.front() = 0.0;
  m.nodes.back() = T;
  for (std::size_t k = 1; k <= cells; ++k) {
    if (!(m.nodes[k] > m.nodes[k - 1])) throw DomainError("Mesh: grading too strong for this size");
  }
  return m;
}

std::vector<double> Mesh::points() const {
  std::vector<double> p(2 * cells() + 1);
  for (std::size_t k = 0; k < cells(); ++k) {
    p[2 * k] = nodes[k];
    p[2 * k + 1] = 0.5 * (nodes[k] + nodes[k + 1]);
  }
  p.back() = nodes.back();
  return p;
}

std::size_t Mesh::cell_of(double u) const {
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), u);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - nodes.begin() - 1, 0));
  return std::min(idx, cells() - 1);
}

double default_grading(const HurstPair& pair, std::size_t cells) {
  // h behaves like a power 2(H2-H1) of the distance to either endpoint.
  double q = std::max({2.0, 1.0 / (2.0 - 2.0 * pair.h1), 1.0 / pair.gap()});
  q = std::min(q, kMaxGrading);
  // Keep the smallest cell above kMinCellRatio * T.
  const double zone_cells = kZone * static_cast<double>(cells);
  if (zone_cells > 1.0) q = std::min(q, std::log(kMinCellRatio) / -std::log(zone_cells));
  return std::max(q, 1.0);
}

std::vector<double> product_weights(const KernelContext& ctx, const Mesh& mesh, double u) {
  if (!(u >= 0.0 && u <= mesh.T)) throw DomainError("product_weights: u outside [0, T]");
  return row_weights(RowIntegrator(ctx), mesh, u);
}

DenseSystem assemble(const KernelContext& ctx, const Mesh& mesh, double kernel_scale,
                     unsigned threads) {
  const std::vector<double> pts = mesh.points();
  const std::size_t m = pts.size();
  const double gamma = ctx.kernel.constants().gamma_h1;
  const double lam = kernel_scale / (gamma * gamma);
  DenseSystem sys;
  sys.A = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  sys.b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  if (kernel_scale == 0.0) return sys;
  const RowIntegrator integ(ctx);
  parallel_for(m, threads, [&](std::size_t i) {
    const std::vector<double> w = row_weights(integ, mesh, pts[i]);
    for (std::size_t j = 0; j < m; ++j) {
      if (!std::isfinite(w[j])) {
        throw NumericError("assemble: non-finite product weight at (i, j) = (" + std::to_string(i) +
                           ", " + std::to_string(j) + ")");
      }
      sys.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += lam * w[j];
    }
  });
  return sys;
}

double FredholmSolution::interpolate(double u) const {
  if (!(u >= 0.0 && u <= mesh.T)) throw DomainError("interpolate: u outside [0, T]");
  return local_value(mesh.nodes, h_values, mesh.cell_of(u), u);
}

double FredholmSolution::evaluate(double u) const {
  if (kernel_scale == 0.0) return 1.0;
  const std::vector<double> w = product_weights(*context, mesh, u);
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * h_values[j];
  const double gamma = context->kernel.constants().gamma_h1;
  return 1.0 - kernel_scale / (gamma * gamma) * acc;
}

FredholmSolution solve_hT(std::shared_ptr<const KernelContext> ctx, double T,
                          const SolverOptions& opts) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("solve_hT: horizon must be positive");
  if (opts.n < kMinCells) throw DomainError("solve_hT: need n >= 16 mesh cells");
  double worst = 0.0;
  for (int attempt = 0; attempt <= opts.max_retries; ++attempt) {
    const double T_try = T * std::pow(1.0 + 1e-3, attempt);
    FredholmSolution sol = solve_once(ctx, T_try, opts);
    if (sol.cond_estimate <= opts.cond_limit) {
      sol.requested_T = T;
      sol.retries = attempt;
      if (opts.compute_residual) sol.residual_sup = residual_sup(sol, opts.threads);
      return sol;
    }
    worst = sol.cond_estimate;
  }
  throw ExceptionalHorizonError("solve_hT: exceptional horizon, condition estimate " + std::to_string(worst) +
                                " above limit after " + std::to_string(opts.max_retries) +
                                " perturbations of T = " + std::to_string(T));
}

FredholmSolution solve_hT(const HurstPair& pair, double T, const SolverOptions& opts) {
  return solve_hT(make_context(pair), T, opts);
}

std::vector<ResidualPoint> residual_profile(const FredholmSolution& sol, unsigned threads) {
  const auto& x = sol.mesh.nodes;
  const std::size_t cells = sol.mesh.cells();
  const RowIntegrator integ(*sol.context);
  const double gamma = sol.context->kernel.constants().gamma_h1;
  const double lam = sol.kernel_scale / (gamma * gamma);

  // Lobatto samples of the Nystrom interpolant in every cell; the residual
  // integral runs over its piecewise polynomial interpolant.
  std::array<double, kCheckLobatto> t{}, bary{};
  for (std::size_t j = 0; j < kCheckLobatto; ++j) {
    t[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                 static_cast<double>(kCheckLobatto - 1)));
    bary[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j + 1 == kCheckLobatto) ? 0.5 : 1.0);
  }
  t.front() = 0.0;
  t.back() = 1.0;
  std::vector<std::array<double, kCheckLobatto>> samples(cells);
  const auto nystrom = [&](double u) {
    const std::vector<double> w = row_weights(integ, sol.mesh, u);
    double acc = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * sol.h_values[j];
    return 1.0 - lam * acc;
  };
  parallel_for(cells, threads, [&](std::size_t k) {
    const double h = x[k + 1] - x[k];
    for (std::size_t j = 0; j < kCheckLobatto; ++j) {
      // Cell ends and midpoint carry the nodal values.
      if (2 * j % (kCheckLobatto - 1) == 0) {
        samples[k][j] = sol.h_values[2 * k + 2 * j / (kCheckLobatto - 1)];
      } else {
        samples[k][j] = nystrom(x[k] + h * t[j]);
      }
    }
  });
  const auto smooth = [&](std::size_t k, double s) {
    const double tau = (s - x[k]) / (x[k + 1] - x[k]);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < kCheckLobatto; ++j) {
      const double diff = tau - t[j];
      if (diff == 0.0) return samples[k][j];
      const double c = bary[j] / diff;
      num += c * samples[k][j];
      den += c;
    }
    return num / den;
  };

  constexpr std::array<double, 3> kFractions{0.25, 0.5, 0.75};
  std::vector<ResidualPoint> out(3 * cells);
  parallel_for(cells, threads, [&](std::size_t c) {
    for (std::size_t m = 0; m < kFractions.size(); ++m) {
      const double u = x[c] + kFractions[m] * (x[c + 1] - x[c]);
      // h_N(u) = 1 - lam int kappa Q h, so the residual is lam int kappa (H - Q h).
      double diff = 0.0;
      integ.run(x, u, [&](std::size_t k, double s, double wt) {
        diff += wt * (smooth(k, s) - local_value(x, sol.h_values, k, s));
      });
      out[3 * c + m] = ResidualPoint{u, lam * diff};
    }
  });
  return out;
}

double residual_sup(const FredholmSolution& sol, unsigned threads) {
  if (sol.kernel_scale == 0.0) return 0.0;
  double worst = 0.0;
  for (const auto& p : residual_profile(sol, threads)) worst = std::max(worst, std::abs(p.value));
  return worst;
}

double weighted_integral(const FredholmSolution& sol) {
  const double p = 1.0 - 2.0 * sol.context->kernel.pair().h1;
  const auto& x = sol.mesh.nodes;
  const auto& y = sol.h_values;
  const quad::Rule gl = unit_legendre(kMomentPoints);
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    const double a = x[k], h = x[k + 1] - x[k];
    if (a < h) {
      // Exact power moments int_0^1 (a + h tau)^p tau^m dtau, m = 0..2, from
      // those of t^{p+m}; a < h keeps the differences well conditioned.
      std::array<double, 3> mt{};
      for (int m = 0; m < 3; ++m) {
        const double e = p + 1.0 + m;
        mt[static_cast<std::size_t>(m)] = (std::pow(a + h, e) - std::pow(a, e)) / e;
      }
      const double t0 = mt[0] / h;
      const double t1 = (mt[1] - a * mt[0]) / (h * h);
      const double t2 = (mt[2] - 2.0 * a * mt[1] + a * a * mt[0]) / (h * h * h);
      // L0 = 2 tau^2 - 3 tau + 1, L1 = 4 tau - 4 tau^2, L2 = 2 tau^2 - tau.
      const double i0 = 2.0 * t2 - 3.0 * t1 + t0;
      const double i1 = 4.0 * t1 - 4.0 * t2;
      const double i2 = 2.0 * t2 - t1;
      acc += h * (i0 * y[2 * k] + i1 * y[2 * k + 1] + i2 * y[2 * k + 2]);
    } else {
      // The weight is analytic on the cell with its singularity at least one
      // cell length away; Gauss-Legendre is exact to rounding.
      acc += h * gl.apply([&](double tau) {
        return std::pow(a + h * tau, p) * local_value(x, y, k, a + h * tau);
      });
    }
  }
  return acc;
}

double quadratic_char(const FredholmSolution& sol) {
  const double gamma = sol.context->kernel.constants().gamma_h1;
  return gamma * gamma * weighted_integral(sol);
}

VarianceProbe asymptotic_variance_probe(const HurstPair& pair, const std::vector<double>& horizons,
                                        const SolverOptions& opts) {
  for (std::size_t k = 1; k < horizons.size(); ++k) {
    if (!(horizons[k] > horizons[k - 1])) {
      throw DomainError("asymptotic_variance_probe: horizons must increase");
    }
  }
  const auto ctx = make_context(pair);
  const double delta = ctx->kernel.constants().delta_h1;
  VarianceProbe probe;
  for (double T : horizons) {
    const FredholmSolution sol = solve_hT(ctx, T, opts);
    VarianceProbePoint pt;
    pt.T = sol.horizon();
    pt.varproxy = 1.0 / (delta * delta * weighted_integral(sol));
    pt.scaled = std::pow(pt.T, 2.0 - 2.0 * pair.h2) * pt.varproxy;
    probe.points.push_back(pt);
  }
  if (probe.points.size() >= 2) {
    const double a = probe.points[probe.points.size() - 2].scaled;
    const double b = probe.points.back().scaled;
    probe.last_spread = std::abs(b - a) / std::max(std::abs(a), std::abs(b));
    probe.stabilized = probe.last_spread <= 0.05;
  }
  return probe;
}

}  // namespace mfbm
