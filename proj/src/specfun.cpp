#include "mfbm/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "mfbm/errors.hpp"

namespace mfbm {

namespace {

constexpr std::size_t kJacobiPoints = 20;
constexpr std::size_t kPiecePoints = 12;

std::string describe(double a, double b, double c) {
  std::ostringstream os;
  os.precision(17);
  os << "(a=" << a << ", b=" << b << ", c=" << c << ")";
  return os.str();
}

// int_0^{1/2} v^p g(v) dv, where g is smooth on [0, 1/2] apart from a possible
// singularity at v = -eps (eps > 0, +inf when absent). `unit` is the
// Gauss-Jacobi rule for v^p on [0,1].
template <class G>
double endpoint_half(const quad::Rule& unit, double p, double eps, G&& g) {
  constexpr double kHalf = 0.5;
  const double first = std::min(eps, kHalf);
  double acc = 0.0;
  const double scale = std::pow(first, p + 1.0);
  for (std::size_t k = 0; k < unit.size(); ++k) acc += unit.weights[k] * g(first * unit.nodes[k]);
  acc *= scale;
  const quad::Rule& gl = quad::gauss_legendre(kPiecePoints);
  double lo = first;
  while (lo < kHalf) {
    const double hi = std::min(2.0 * lo, kHalf);
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    for (std::size_t k = 0; k < gl.size(); ++k) {
      const double v = mid + half * gl.nodes[k];
      acc += half * gl.weights[k] * std::pow(v, p) * g(v);
    }
    lo = hi;
  }
  return acc;
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("gamma_fn: argument must be positive and finite, got " + std::to_string(x));
  }
  return std::tgamma(x);
}

double beta_fn(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("beta_fn: arguments must be positive, got " + std::to_string(a) + ", " +
                      std::to_string(b));
  }
  if (a + b < 170.0) return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b);
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

Hyp2F1::EulerIntegral::EulerIntegral(double a_, double b_, double c_)
    : a(a_), b(b_), c(c_) {
  if (!(b > 0.0 && c > b) || !std::isfinite(a) || !std::isfinite(c)) {
    throw DomainError("hyp2f1: need c > b > 0 " + describe(a, b, c));
  }
  inv_norm = 1.0 / beta_fn(b, c - b);
  left = quad::jacobi_unit(kJacobiPoints, b - 1.0, 0.0);
  right = quad::jacobi_unit(kJacobiPoints, c - b - 1.0, 0.0);
  if (c - a - b > 0.0) {
    right_unit = quad::jacobi_unit(kJacobiPoints, c - b - 1.0 - a, 0.0);
    has_unit_rule = true;
  }
}

double Hyp2F1::EulerIntegral::value(double x) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double p_left = b - 1.0;
  const double p_right = c - b - 1.0;
  // Left half, t in [0, 1/2]; 1 - xt vanishes at t = 1/x, which lies left of
  // the origin only for x < 0.
  const double eps_left = x < 0.0 ? -1.0 / x : kInf;
  const double lhs = endpoint_half(left, p_left, eps_left, [&](double t) {
    return std::pow(1.0 - t, p_right) * std::pow(1.0 - x * t, -a);
  });
  // Right half, w = 1 - t in [0, 1/2]; 1 - xt = (1 - x) + x w.
  double rhs;
  if (x == 1.0) {
    rhs = endpoint_half(right_unit, p_right - a, kInf,
                        [&](double w) { return std::pow(1.0 - w, p_left); });
  } else {
    const double eps_right = x > 0.0 ? (1.0 - x) / x : kInf;
    rhs = endpoint_half(right, p_right, eps_right, [&](double w) {
      return std::pow(1.0 - w, p_left) * std::pow((1.0 - x) + x * w, -a);
    });
  }
  return inv_norm * (lhs + rhs);
}

Hyp2F1::Hyp2F1(double a, double b, double c)
    : a_(a),
      b_(b),
      c_(c),
      direct_(a, b, c),
      pfaff_(a, c - b, c) {}

double Hyp2F1::euler(double x) const {
  if (!(x <= 1.0)) throw DomainError("hyp2f1: argument must satisfy x <= 1, got " + std::to_string(x));
  if (a_ == 0.0 || x == 0.0) return 1.0;
  if (x == 1.0 && !direct_.has_unit_rule) {
    throw NumericError("hyp2f1: divergent at x = 1 since c - a - b <= 0 " + describe(a_, b_, c_));
  }
  return direct_.value(x);
}

double Hyp2F1::operator()(double x) const {
  if (!(x <= 1.0)) throw DomainError("hyp2f1: argument must satisfy x <= 1, got " + std::to_string(x));
  if (a_ == 0.0 || x == 0.0) return 1.0;
  if (x < 0.0) {
    const double z = x / (x - 1.0);
    return std::pow(1.0 - x, -a_) * pfaff_.value(z);
  }
  return euler(x);
}

double hyp2f1(const HypergeometricArgs& args) {
  return Hyp2F1(args.a, args.b, args.c)(args.x);
}

BoundReport check_hyp_bounds(const HypergeometricArgs& args, BoundCase which) {
  const double a = args.a, b = args.b, c = args.c, x = args.x;
  BoundReport rep;
  switch (which) {
    case BoundCase::kNegativeArgument:
      if (!(c > b && b > 1.0 && x >= 0.0 && a > 0.0 && a <= 1.0)) {
        throw DomainError("check_hyp_bounds: case (i) needs c > b > 1, x >= 0, 0 < a <= 1 " +
                          describe(a, b, c));
      }
      rep.value = Hyp2F1(a, b, c)(-x);
      rep.bound = std::pow(1.0 + x * (b - 1.0) / (c - 1.0), -a);
      break;
    case BoundCase::kPositiveArgument:
      if (!(a > 0.0 && a <= 1.0 && b > 0.0 && c - b > 1.0 && x >= 0.0 && x < 1.0)) {
        throw DomainError("check_hyp_bounds: case (ii) needs 0 < a <= 1, b > 0, c - b > 1, "
                          "0 <= x < 1 " + describe(a, b, c));
      }
      rep.value = Hyp2F1(a, b, c)(x);
      rep.bound = std::pow(1.0 - b * x / (c - 1.0), -a);
      break;
  }
  // Rounding slack of a few ulps; at x = 0 both sides are exactly 1.
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * std::abs(rep.bound);
  rep.holds = x == 0.0 ? rep.value <= rep.bound : rep.value < rep.bound + slack;
  return rep;
}

}  // namespace mfbm
