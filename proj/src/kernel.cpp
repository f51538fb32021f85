#include "mfbm/kernel.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mfbm/errors.hpp"

namespace mfbm {

namespace {

constexpr std::size_t kJacobiPoints = 24;
constexpr int kGradedLevels = 50;
constexpr std::size_t kGradedInner = 16;
constexpr std::size_t kGradedPoints = 12;

std::string show(double s, double u) {
  return "(" + std::to_string(s) + ", " + std::to_string(u) + ")";
}

void require_open_triangle(double t, double s, const char* what) {
  if (!(s > 0.0) || !(s < t) || !std::isfinite(t)) {
    throw DomainError(std::string(what) + ": need 0 < s < t, got (t, s) = " + show(t, s));
  }
}

void require_closed_triangle(double t, double s, const char* what) {
  if (!(s > 0.0) || !(s <= t) || !std::isfinite(t)) {
    throw DomainError(std::string(what) + ": need 0 < s <= t, got (t, s) = " + show(t, s));
  }
}

}  // namespace

HurstPair HurstPair::make(double h1, double h2) {
  if (!(h1 >= 0.5 && h1 < h2 && h2 < 1.0)) {
    throw DomainError("HurstPair: need 1/2 <= h1 < h2 < 1, got h1=" + std::to_string(h1) +
                      ", h2=" + std::to_string(h2));
  }
  HurstPair p;
  p.h1 = h1;
  p.h2 = h2;
  p.alpha1 = h1 - 0.5;
  p.alpha2 = h2 - 0.5;
  return p;
}

double molchan_gamma(double h) {
  if (!(h > 0.0 && h < 1.0)) throw DomainError("molchan_gamma: need 0 < h < 1");
  const double g = gamma_fn(1.5 - h);
  const double sq = 2.0 * h * (2.0 - 2.0 * h) * g * g * g * gamma_fn(h + 0.5) / gamma_fn(3.0 - 2.0 * h);
  return std::sqrt(sq);
}

double l_weight(double h, double t, double s) {
  require_open_triangle(t, s, "l_weight");
  return std::pow(t - s, 0.5 - h) * std::pow(s, 0.5 - h);
}

double phi_singular(const HurstPair& pair, double s, double u) {
  if (s == u) throw DomainError("phi_singular: singular on the diagonal s = u = " + std::to_string(s));
  if (!(s >= 0.0) || !(u >= 0.0)) throw DomainError("phi_singular: negative time " + show(s, u));
  const double d = pair.gap();
  const double diag = std::pow(std::abs(s - u), 2.0 * d - 1.0);
  if (s > u) return diag;
  return std::pow(s / u, 1.0 - 2.0 * pair.h1) * diag;
}

double phi_singular_integral(const HurstPair& pair, double u, double horizon) {
  if (!(u >= 0.0 && u <= horizon)) throw DomainError("phi_singular_integral: need 0 <= u <= T");
  const double d2 = 2.0 * pair.gap();
  return std::pow(u, d2) * beta_fn(2.0 - 2.0 * pair.h1, d2) + std::pow(horizon - u, d2) / d2;
}

MixedKernel::MixedKernel(const HurstPair& pair)
    : pair_(pair),
      f1_(pair.h1 - pair.h2, 1.0 - pair.alpha1, 1.0 - pair.h1 + pair.h2),
      f2_(pair.h1 - pair.h2 + 1.0, 1.0 - pair.alpha1, 2.0 - pair.h1 + pair.h2) {
  const double d = pair.gap();
  auto& c = constants_;
  b1_ = beta_fn(1.0 - pair.alpha1, pair.alpha2);
  b2_ = beta_fn(1.0 - pair.alpha1, pair.alpha2 + 1.0);
  c.gamma_h1 = molchan_gamma(pair.h1);
  c.beta_h2 = std::sqrt(pair.h2 * (2.0 * pair.h2 - 1.0) / beta_fn(pair.alpha2, 2.0 - 2.0 * pair.h2));
  c.eps_h1 = c.gamma_h1 * c.gamma_h1 / (2.0 - 2.0 * pair.h1);
  c.bfun_h1 = beta_fn(1.5 - pair.h1, 1.5 - pair.h1);
  c.delta_h1 = (2.0 - 2.0 * pair.h1) * c.bfun_h1 / c.gamma_h1;
  prefactor_sq_ = std::pow(c.beta_h2 * d, 2);
  c.phi_unit_max = b1_ + b2_ * std::pow((1.0 + d) / pair.alpha2, 1.0 - d);
  c.c_bound = prefactor_sq_ * c.phi_unit_max * c.phi_unit_max * beta_fn(2.0 - 2.0 * pair.h2, d);

  rule_y_ = quad::scale_unit_rule(quad::jacobi_unit(kJacobiPoints, d - 1.0, 0.0), d - 1.0, 0.5);
  const double pw = 1.0 - 2.0 * pair.h2;
  rule_w_ = quad::scale_unit_rule(
      quad::graded_endpoint_rule(pw, kGradedLevels, kGradedInner, kGradedPoints), pw, 0.5);
  rule_diag_ = quad::scale_unit_rule(quad::jacobi_unit(kJacobiPoints, -2.0 * d, 0.0), -2.0 * d, 0.5);

  GradedChebyshev::Options opts;
  opts.singular_at_zero = true;
  opts.singular_at_one = false;
  opts.levels = 50;
  opts.points = 16;
  phi_table_ = GradedChebyshev([this](double rho) { return phi_unit(rho); }, phi_unit(0.0),
                               phi_unit(1.0), opts);

  c.c_diag = kappa0_integral(1.0);
  c.c_edge = kappa0_integral(0.0);
}

double MixedKernel::psi1(double t, double s) const {
  require_closed_triangle(t, s, "psi1");
  return b1_ * f1_((t - s) / t);
}

double MixedKernel::psi2(double t, double s) const {
  require_closed_triangle(t, s, "psi2");
  const double x = (t - s) / t;
  if (x == 0.0) return 0.0;
  return std::pow(x, 1.0 - pair_.gap()) * b2_ * f2_(x);
}

double MixedKernel::phi_unit(double rho) const {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("phi_unit: need 0 <= rho <= 1");
  const double x = 1.0 - rho;
  // t^d Psi1 + (t-s)^d Psi2 at t = 1 collapses to B1 F1(x) + x B2 F2(x).
  return b1_ * f1_(x) + (x == 0.0 ? 0.0 : x * b2_ * f2_(x));
}

double MixedKernel::phi_big(double t, double s) const {
  if (!(t > 0.0) || !(s >= 0.0 && s <= t)) {
    throw DomainError("phi_big: need 0 <= s <= t, t > 0, got (t, s) = " + show(t, s));
  }
  return std::pow(t, pair_.gap()) * phi_unit(s / t);
}

double MixedKernel::kernel_K(double t, double s) const {
  require_open_triangle(t, s, "kernel_K");
  const double d = pair_.gap();
  return constants_.beta_h2 * std::pow(s, 0.5 - pair_.h2) * std::pow((t - s) * t, d) * psi1(t, s);
}

double MixedKernel::dK_dt(double t, double s) const {
  require_open_triangle(t, s, "dK_dt");
  const double d = pair_.gap();
  return constants_.beta_h2 * d * std::pow(s, 0.5 - pair_.h2) * std::pow(t - s, d - 1.0) *
         phi_big(t, s);
}

double MixedKernel::kappa0_integral(double r) const {
  const double a2 = 2.0 * pair_.alpha1;
  const double eps = 1.0 - r;
  const auto& phi = phi_table_;
  // y in [0, 1/2] against y^{d-1}.
  const double left = rule_y_.apply([&](double y) {
    const double den = 1.0 - r * y;
    return std::pow(1.0 - y, 1.0 - 2.0 * pair_.h2) * std::pow(den, a2) *
           phi(r * (1.0 - y) / den) * phi((1.0 - y) / den);
  });
  // w = 1 - y in [0, 1/2]; 1 - r y = w + eps (1 - w).
  double right;
  if (eps == 0.0) {
    const double p1 = phi(1.0);
    right = rule_diag_.apply([&](double w) { return std::pow(1.0 - w, pair_.gap() - 1.0) * p1 * p1; });
  } else {
    right = rule_w_.apply([&](double w) {
      const double den = w + eps * (1.0 - w);
      return std::pow(1.0 - w, pair_.gap() - 1.0) * std::pow(den, a2) * phi(r * w / den) *
             phi(std::min(1.0, w / den));
    });
  }
  return prefactor_sq_ * (left + right);
}

double MixedKernel::kappa0_ratio(double r) const {
  if (!(r >= 0.0 && r <= 1.0)) throw DomainError("kappa0_ratio: need 0 <= r <= 1");
  if (r == 1.0) return constants_.c_diag;
  if (r == 0.0) return constants_.c_edge;
  return kappa0_integral(r);
}

double MixedKernel::kappa0(double s, double u) const {
  if (!(s >= 0.0) || !(u >= 0.0)) throw DomainError("kappa0: negative time " + show(s, u));
  const double hi = std::max(s, u);
  if (hi == 0.0) return 0.0;
  return kappa0_ratio(std::min(s, u) / hi);
}

double MixedKernel::kappa(double s, double u) const {
  if (s == u) return 0.0;
  return kappa0(s, u) * phi_singular(pair_, s, u);
}

double MixedKernel::brute_force_k(double s, double u) const {
  const double lo = std::min(s, u);
  const double hi = std::max(s, u);
  if (!(lo > 0.0) || s == u) {
    throw DomainError("brute_force_k: need s != u and min(s, u) > 0, got " + show(s, u));
  }
  boost::math::quadrature::tanh_sinh<double> integrator;
  constexpr double kTol = 1e-11;
  const double gap = hi - lo;
  // The dK_dt(hi, v) factor is nearly singular at v = lo when hi - lo is small,
  // so the range is cut geometrically toward v = lo down to that scale.
  std::vector<double> cuts{0.0};
  double len = 0.5 * lo;
  while (len > gap && len > 1e-14 * lo) {
    cuts.push_back(lo - len);
    len *= 0.5;
  }
  cuts.push_back(lo);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    // xc is the signed distance to the nearer endpoint; it keeps lo - v exact.
    auto f = [&](double v, double xc) {
      const double to_lo = (xc > 0.0 && b == lo) ? xc : lo - v;
      const double d = pair_.gap();
      const double base = constants_.beta_h2 * d * std::pow(v, 0.5 - pair_.h2);
      const double fs = base * std::pow(to_lo, d - 1.0) * phi_big(lo, std::min(v, lo));
      const double fu =
          base * std::pow(gap + to_lo, d - 1.0) * phi_big(hi, std::min(v, hi));
      return fs * fu;
    };
    double err = 0.0, l1 = 0.0;
    const double piece = integrator.integrate(f, a, b, kTol, &err, &l1);
    if (!std::isfinite(piece) || err > 1e-8 * std::max(l1, std::numeric_limits<double>::min())) {
      throw NumericError("brute_force_k: quadrature did not converge on [" + std::to_string(a) +
                         ", " + std::to_string(b) + "] at " + show(s, u) +
                         ", error estimate " + std::to_string(err));
    }
    total += piece;
  }
  return total;
}

Kappa0Table::Kappa0Table(const MixedKernel& kernel) {
  const auto& c = kernel.constants();
  GradedChebyshev::Options opts;
  opts.levels = 40;
  opts.points = 16;
  table_ = GradedChebyshev([&kernel](double r) { return kernel.kappa0_ratio(r); }, c.c_edge,
                           c.c_diag, opts);
}

double Kappa0Table::operator()(double s, double u) const {
  const double hi = std::max(s, u);
  if (hi == 0.0) return 0.0;
  return table_(std::min(s, u) / hi);
}

}  // namespace mfbm
