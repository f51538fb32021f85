#pragma once

#include "mfbm/interp.hpp"
#include "mfbm/quadrature.hpp"
#include "mfbm/specfun.hpp"

namespace mfbm {

/// Hurst indices of the two fractional components, 1/2 <= h1 < h2 < 1.
struct HurstPair {
  double h1 = 0.5;
  double h2 = 0.75;
  double alpha1 = 0.0;   // h1 - 1/2
  double alpha2 = 0.25;  // h2 - 1/2

  /// Validating constructor; throws DomainError unless 1/2 <= h1 < h2 < 1.
  static HurstPair make(double h1, double h2);

  /// h2 - h1, the exponent gap that controls every singularity of the kernel.
  double gap() const { return h2 - h1; }
};

/// Closed-form and quadrature-derived constants of the model.
struct ModelConstants {
  double gamma_h1 = 0.0;  // Molchan constant: M^H = gamma_H int s^{1/2-H} dW
  double beta_h2 = 0.0;   // Molchan-Golosov normalisation of K_H
  double eps_h1 = 0.0;    // gamma^2 / (2 - 2H1), so <M>(t) = eps t^{2-2H1}
  double bfun_h1 = 0.0;   // B(3/2 - H1, 3/2 - H1)
  double delta_h1 = 0.0;  // (2 - 2H1) bfun / gamma
  double c_diag = 0.0;    // kappa0(s, s), s > 0
  double c_edge = 0.0;    // kappa0(s, 0) = kappa0(0, u), s, u > 0
  double c_bound = 0.0;   // explicit upper bound for kappa0 on [0,T]^2
  double phi_unit_max = 0.0;  // upper bound for Phi(1, rho), rho in [0,1]
};

/// Molchan constant gamma_H > 0, so that <M^H>(t) = gamma_H^2 t^{2-2H}/(2-2H).
double molchan_gamma(double h);

/// l_H(t, s) = (t - s)^{1/2 - H} s^{1/2 - H}, 0 < s < t.
double l_weight(double h, double t, double s);

/// phi(s, u) = (s ^ u)^{1-2H1} u^{2H1-1} |s - u|^{2H2-2H1-1}, s != u.
double phi_singular(const HurstPair& pair, double s, double u);

/// int_0^T phi(s, u) ds in closed form.
double phi_singular_integral(const HurstPair& pair, double u, double horizon);

/// Two-exponent kernel of the mixed model and all of its factors.
///
/// Holds the hypergeometric evaluators and quadrature rules for one Hurst pair.
/// All member functions are const and may be called concurrently.
class MixedKernel {
 public:
  explicit MixedKernel(const HurstPair& pair);

  const HurstPair& pair() const { return pair_; }
  const ModelConstants& constants() const { return constants_; }

  /// K_{H1,H2}(t, s) for 0 < s < t.
  double kernel_K(double t, double s) const;
  /// d/dt K_{H1,H2}(t, s) for 0 < s < t.
  double dK_dt(double t, double s) const;

  double psi1(double t, double s) const;
  double psi2(double t, double s) const;
  /// Phi(t, s) = t^{H2-H1} Psi1 + (t-s)^{H2-H1} Psi2, 0 <= s <= t, t > 0.
  double phi_big(double t, double s) const;
  /// Phi(1, rho) from the hypergeometric representation (no tabulation).
  double phi_unit(double rho) const;
  /// Phi(1, rho) from the precomputed interpolant used inside kappa0.
  double phi_unit_fast(double rho) const { return phi_table_(rho); }

  /// kappa0(s, u); symmetric, homogeneous of degree 0 and kappa0(0,0) = 0.
  double kappa0(double s, double u) const;
  /// kappa0 as a function of r = (s ^ u)/(s v u) in [0,1], by quadrature.
  double kappa0_ratio(double r) const;
  /// kappa(s, u) = kappa0(s, u) phi(s, u), and 0 on the diagonal.
  double kappa(double s, double u) const;

  /// Oracle: k(s, u) = int_0^{s ^ u} dK_dt(s, v) dK_dt(u, v) dv by adaptive
  /// quadrature with splitting at the endpoint singularities. s != u, s ^ u > 0.
  double brute_force_k(double s, double u) const;

 private:
  double kappa0_integral(double r) const;

  HurstPair pair_;
  Hyp2F1 f1_;  // F(H1-H2, 1-alpha1, 1-H1+H2; x)
  Hyp2F1 f2_;  // F(H1-H2+1, 1-alpha1, 2-H1+H2; x)
  double b1_ = 0.0;  // B(1-alpha1, alpha2)
  double b2_ = 0.0;  // B(1-alpha1, alpha2+1)
  double prefactor_sq_ = 0.0;  // (beta_H2 (H2-H1))^2
  quad::Rule rule_y_;  // y^{H2-H1-1} on [0,1/2]
  quad::Rule rule_w_;  // w^{1-2H2} on [0,1/2], graded toward w = 0
  quad::Rule rule_diag_;  // w^{-2(H2-H1)} on [0,1/2], for the diagonal
  GradedChebyshev phi_table_;
  ModelConstants constants_;
};

/// Fast evaluation of kappa0 through an interpolant of kappa0_ratio on [0,1].
/// Building costs about a thousand kappa0 quadratures.
class Kappa0Table {
 public:
  explicit Kappa0Table(const MixedKernel& kernel);

  double operator()(double s, double u) const;
  double ratio(double r) const { return table_(r); }

 private:
  GradedChebyshev table_;
};

}  // namespace mfbm
