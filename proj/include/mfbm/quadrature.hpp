#pragma once

#include <cstddef>
#include <vector>

namespace mfbm::quad {

/// Nodes and weights of a quadrature rule: integral ~ sum_k weights[k] f(nodes[k]).
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double apply(F&& f) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) acc += weights[k] * f(nodes[k]);
    return acc;
  }
};

/// Gauss-Jacobi rule on [-1,1] for the weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1. Golub-Welsch on the Jacobi matrix.
Rule gauss_jacobi(std::size_t m, double alpha, double beta);

/// Gauss-Legendre rule on [-1,1]. Rules up to 64 points are cached.
const Rule& gauss_legendre(std::size_t m);

/// Rule on [0,1] for the weight t^p (1-t)^q, i.e.
/// int_0^1 t^p (1-t)^q f(t) dt ~ sum w_k f(t_k).
Rule jacobi_unit(std::size_t m, double p, double q);

/// Rule on [0,1] for int_0^1 w^p f(w) dw where f is smooth on (0,1] but may
/// be non-smooth (power-like) at w = 0 or have a singularity just left of 0.
/// Geometric pieces [2^-(k+1), 2^-k], k < levels, use m_gl-point Gauss-Legendre
/// with w^p folded into the weights; the innermost piece [0, 2^-levels] uses an
/// m_inner-point Gauss-Jacobi rule for w^p.
Rule graded_endpoint_rule(double p, int levels, std::size_t m_inner, std::size_t m_gl);

/// Map a reference rule on [0,1] for weight w^p to [0,len]: int_0^len w^p f(w) dw.
/// Returned rule includes the len^{p+1} factor.
Rule scale_unit_rule(const Rule& unit, double p, double len);

}  // namespace mfbm::quad
