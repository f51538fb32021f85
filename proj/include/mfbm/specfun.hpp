#pragma once

#include <vector>

#include "mfbm/quadrature.hpp"

namespace mfbm {

/// Gamma function for x > 0. Throws DomainError otherwise.
double gamma_fn(double x);

/// Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b), a, b > 0.
double beta_fn(double a, double b);

struct HypergeometricArgs {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double x = 0.0;
};

/// Gauss hypergeometric function 2F1(a, b; c; x) for c > b > 0 and x <= 1,
/// evaluated from the Euler integral
///
///   F = 1/B(b, c-b) * int_0^1 t^{b-1} (1-t)^{c-b-1} (1-xt)^{-a} dt.
///
/// The integral is split at t = 1/2. Each half uses a Gauss-Jacobi rule for its
/// endpoint power, and when 1 - xt nearly vanishes at an endpoint the half is
/// broken into geometric pieces toward that endpoint. Negative arguments are
/// mapped into (0,1) with the Pfaff transformation. At x = 1 the integral
/// converges for c - a - b > 0.
///
/// Construction precomputes the quadrature rules for one parameter triple;
/// evaluation is const and thread-safe.
class Hyp2F1 {
 public:
  Hyp2F1(double a, double b, double c);

  double operator()(double x) const;

  /// Direct Euler-integral value without the Pfaff transformation (any x <= 1).
  double euler(double x) const;

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }

 private:
  struct EulerIntegral {
    EulerIntegral(double a, double b, double c);
    double value(double x) const;

    double a, b, c;
    double inv_norm;        // 1 / B(b, c-b)
    quad::Rule left;        // t^{b-1} on [0,1]
    quad::Rule right;       // w^{c-b-1} on [0,1]
    quad::Rule right_unit;  // w^{c-b-1-a} on [0,1], only when c-a-b > 0
    bool has_unit_rule = false;
  };

  double a_, b_, c_;
  EulerIntegral direct_;
  EulerIntegral pfaff_;  // parameters (a, c-b, c)
};

/// One-shot evaluation. Throws DomainError for c <= b or b <= 0 or x > 1 and
/// NumericError when x = 1 and c - a - b <= 0 (divergent integral).
double hyp2f1(const HypergeometricArgs& args);

/// Upper bounds for 2F1 used to show the kernel factors are bounded.
enum class BoundCase {
  kNegativeArgument,  // F(a,b,c;-x) < (1 + x(b-1)/(c-1))^{-a}; c > b > 1, x >= 0, 0 < a <= 1
  kPositiveArgument,  // F(a,b,c; x) < (1 - b x/(c-1))^{-a};    0 < a <= 1, b > 0, c-b > 1, 0 <= x < 1
};

struct BoundReport {
  double value = 0.0;
  double bound = 0.0;
  bool holds = false;
};

/// For kNegativeArgument, args.x is the magnitude of the (negative) argument.
/// Equality is accepted at x = 0, where both sides equal 1.
BoundReport check_hyp_bounds(const HypergeometricArgs& args, BoundCase which);

}  // namespace mfbm
