#include "mfbm/interp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mfbm/errors.hpp"

namespace mfbm {

GradedChebyshev::GradedChebyshev(const std::function<double(double)>& f, double value_at_zero,
                                 double value_at_one, const Options& opts)
    : opts_(opts), zero_value_(value_at_zero), one_value_(value_at_one) {
  if (opts_.points < 2) throw DomainError("GradedChebyshev: need at least 2 points per panel");
  if (opts_.levels < 1 || opts_.levels > 50) throw DomainError("GradedChebyshev: levels in 1..50");
  const std::size_t n = opts_.points;
  nodes_.resize(n);
  bary_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    nodes_[j] = 0.5 * (1.0 - std::cos(std::numbers::pi * static_cast<double>(j) /
                                      static_cast<double>(n - 1)));
    bary_[j] = (j % 2 == 0 ? 1.0 : -1.0) * ((j == 0 || j == n - 1) ? 0.5 : 1.0);
  }
  nodes_.front() = 0.0;
  nodes_.back() = 1.0;

  if (opts_.singular_at_zero) {
    for (int k = 1; k <= opts_.levels; ++k) {
      lower_.push_back(make_panel(f, std::ldexp(1.0, -(k + 1)), std::ldexp(1.0, -k)));
    }
  } else {
    lower_.push_back(make_panel(f, 0.0, 0.5));
  }
  if (opts_.singular_at_one) {
    for (int k = 1; k <= opts_.levels; ++k) {
      upper_.push_back(make_panel(f, 1.0 - std::ldexp(1.0, -k), 1.0 - std::ldexp(1.0, -(k + 1))));
    }
  } else {
    upper_.push_back(make_panel(f, 0.5, 1.0));
  }
}

GradedChebyshev::Panel GradedChebyshev::make_panel(const std::function<double(double)>& f,
                                                   double lo, double hi) const {
  Panel p{lo, hi, {}};
  p.values.resize(nodes_.size());
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    double x = lo + (hi - lo) * nodes_[j];
    if (j == 0) x = lo;
    if (j + 1 == nodes_.size()) x = hi;
    p.values[j] = f(x);
  }
  return p;
}

double GradedChebyshev::eval_panel(const Panel& p, double x) const {
  const double t = (x - p.lo) / (p.hi - p.lo);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double diff = t - nodes_[j];
    if (diff == 0.0) return p.values[j];
    const double q = bary_[j] / diff;
    num += q * p.values[j];
    den += q;
  }
  return num / den;
}

double GradedChebyshev::eval_half(const std::vector<Panel>& half, bool singular, double end_value,
                                  double x, double v) const {
  if (!singular) return eval_panel(half.front(), x);
  if (v >= 0.5) return eval_panel(half.front(), x);
  int e = 0;
  std::frexp(v, &e);  // v in [2^(e-1), 2^e)
  const int k = -e;   // v in [2^-(k+1), 2^-k)
  if (v == 0.0 || k > opts_.levels) {
    // Innermost piece: linear between the end value and the last panel edge.
    const Panel& last = half.back();
    const double edge = std::ldexp(1.0, -(opts_.levels + 1));
    const double edge_value = (&half == &lower_) ? last.values.front() : last.values.back();
    return end_value + (edge_value - end_value) * (v / edge);
  }
  return eval_panel(half[static_cast<std::size_t>(k - 1)], x);
}

double GradedChebyshev::operator()(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("GradedChebyshev: argument outside [0,1]");
  if (x < 0.5) return eval_half(lower_, opts_.singular_at_zero, zero_value_, x, x);
  return eval_half(upper_, opts_.singular_at_one, one_value_, x, 1.0 - x);
}

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw DomainError("Pchip: need matching knots and values, n >= 2");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw DomainError("Pchip: knots must be strictly increasing");
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  if (n == 2) {
    d_[0] = d_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] > 0.0) {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  // One-sided three-point end slopes, limited to preserve monotonicity.
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > 3.0 * std::abs(d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double Pchip::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t, t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

}  // namespace mfbm
