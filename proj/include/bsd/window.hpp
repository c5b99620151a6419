#pragma once

#include <utility>

namespace bsd {

/// Littlewood-Paley window. `a` is the C-infinity cutoff (1 on [-1/2, 1/2],
/// 0 outside [-1, 1], decreasing on the half-line); b^2(x) = a(x/2) - a(x), so
/// that sum_{j>=0} b^2(x / 2^j) = 1 for |x| >= 1.
class WindowFunction {
 public:
  double a(double x) const;
  double b(double x) const;
  std::pair<double, double> eval(double x) const { return {a(x), b(x)}; }

  /// Smooth step s(u) = int_{-1}^{2u-1} phi / int_{-1}^{1} phi for the bump
  /// phi(t) = exp(-1 / (1 - t^2)); s(0) = 0, s(1) = 1.
  static double smooth_step(double u);
};

}  // namespace bsd
