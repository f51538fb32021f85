#include "mfbm/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include "mfbm/errors.hpp"

namespace mfbm::quad {

Rule gauss_jacobi(std::size_t m, double alpha, double beta) {
  if (m == 0) throw DomainError("gauss_jacobi: empty rule requested");
  if (!(alpha > -1.0) || !(beta > -1.0)) {
    throw DomainError("gauss_jacobi: exponents must exceed -1 (alpha=" + std::to_string(alpha) +
                      ", beta=" + std::to_string(beta) + ")");
  }
  const double ab = alpha + beta;
  Eigen::VectorXd diag(static_cast<Eigen::Index>(m));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(m > 1 ? m - 1 : 1));
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (std::size_t k = 1; k < m; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + ab;
    diag[static_cast<Eigen::Index>(k)] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    double b2;
    if (k == 1) {
      b2 = 4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      b2 = 4.0 * kk * (kk + alpha) * (kk + beta) * (kk + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    sub[static_cast<Eigen::Index>(k - 1)] = std::sqrt(b2);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(alpha + 1.0) +
                              std::lgamma(beta + 1.0) - std::lgamma(ab + 2.0));
  Rule rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = diag[0];
    rule.weights[0] = mu0;
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(static_cast<Eigen::Index>(m - 1)),
                             Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw NumericError("gauss_jacobi: eigen solver failed");
  for (std::size_t k = 0; k < m; ++k) {
    const auto kk = static_cast<Eigen::Index>(k);
    rule.nodes[k] = eig.eigenvalues()[kk];
    const double v0 = eig.eigenvectors()(0, kk);
    rule.weights[k] = mu0 * v0 * v0;
  }
  return rule;
}

const Rule& gauss_legendre(std::size_t m) {
  constexpr std::size_t kMaxCached = 64;
  if (m == 0 || m > kMaxCached) {
    throw DomainError("gauss_legendre: supported sizes are 1.." + std::to_string(kMaxCached));
  }
  static std::array<Rule, kMaxCached + 1> cache;
  static std::array<std::once_flag, kMaxCached + 1> flags;
  std::call_once(flags[m], [m] { cache[m] = gauss_jacobi(m, 0.0, 0.0); });
  return cache[m];
}

Rule jacobi_unit(std::size_t m, double p, double q) {
  // t = (1+x)/2: (1-x)^q (1+x)^p = 2^{p+q} (1-t)^q t^p, dx = 2 dt.
  Rule r = gauss_jacobi(m, q, p);
  const double scale = std::pow(2.0, -(p + q + 1.0));
  for (std::size_t k = 0; k < r.size(); ++k) {
    r.nodes[k] = 0.5 * (1.0 + r.nodes[k]);
    r.weights[k] *= scale;
  }
  return r;
}

Rule graded_endpoint_rule(double p, int levels, std::size_t m_inner, std::size_t m_gl) {
  if (levels < 0) throw DomainError("graded_endpoint_rule: negative level count");
  Rule out;
  const double inner_len = std::ldexp(1.0, -levels);
  const Rule inner = scale_unit_rule(jacobi_unit(m_inner, p, 0.0), p, inner_len);
  out.nodes = inner.nodes;
  out.weights = inner.weights;
  const Rule& gl = gauss_legendre(m_gl);
  for (int k = levels - 1; k >= 0; --k) {
    const double lo = std::ldexp(1.0, -(k + 1));
    const double hi = 2.0 * lo;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t j = 0; j < gl.size(); ++j) {
      const double w = mid + half * gl.nodes[j];
      out.nodes.push_back(w);
      out.weights.push_back(half * gl.weights[j] * std::pow(w, p));
    }
  }
  return out;
}

Rule scale_unit_rule(const Rule& unit, double p, double len) {
  Rule r = unit;
  const double f = std::pow(len, p + 1.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    r.nodes[k] *= len;
    r.weights[k] *= f;
  }
  return r;
}

}  // namespace mfbm::quad
