#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfbm {

/// Piecewise Chebyshev interpolant of a function on [0,1] that is smooth in
/// the interior but only Hölder-continuous at one or both endpoints.
///
/// Panels are dyadic toward each singular end: [2^-(k+1), 2^-k] for
/// k = 1..levels near 0 and the mirror image near 1. The innermost panel
/// at a singular end interpolates linearly between the supplied endpoint
/// value and the adjacent panel edge. When an end is not singular, the
/// corresponding half is a single panel.
class GradedChebyshev {
 public:
  struct Options {
    bool singular_at_zero = true;
    bool singular_at_one = true;
    int levels = 40;
    std::size_t points = 12;  // Chebyshev-Lobatto points per panel
  };

  GradedChebyshev() = default;
  GradedChebyshev(const std::function<double(double)>& f, double value_at_zero,
                  double value_at_one, const Options& opts);

  double operator()(double x) const;

  std::size_t panel_count() const { return lower_.size() + upper_.size(); }

 private:
  struct Panel {
    double lo, hi;
    std::vector<double> values;  // at Chebyshev-Lobatto points, ordered lo -> hi
  };

  double eval_panel(const Panel& p, double x) const;
  Panel make_panel(const std::function<double(double)>& f, double lo, double hi) const;
  // Evaluate one half; `v` is the distance from the half's outer end (0 or 1).
  double eval_half(const std::vector<Panel>& half, bool singular, double end_value, double x,
                   double v) const;

  Options opts_{};
  std::vector<Panel> lower_;  // panel k-1 covers [2^-(k+1), 2^-k], or one panel [0, 1/2]
  std::vector<Panel> upper_;  // mirror image in 1 - x
  std::vector<double> nodes_;  // reference Lobatto nodes on [0,1], ascending
  std::vector<double> bary_;   // barycentric weights
  double zero_value_ = 0.0;
  double one_value_ = 0.0;
};

/// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
class Pchip {
 public:
  Pchip() = default;
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;

  std::span<const double> knots() const { return x_; }

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace mfbm
