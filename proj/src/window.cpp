#include "bsd/window.hpp"

#include <algorithm>
#include <cmath>

#include "bsd/cubature.hpp"

namespace bsd {

namespace {

double bump(double t) { return (std::abs(t) < 1.0) ? std::exp(-1.0 / ((1.0 - t) * (1.0 + t))) : 0.0; }

constexpr int kBumpNodes = 160;

// Integral of the bump over [-1, v] with a fixed Gauss-Legendre rule.
double bump_integral(double v) {
  static const auto rule = gauss_legendre(kBumpNodes);
  const auto& [x, w] = rule;
  const double half = 0.5 * (v + 1.0);
  double s = 0.0;
  for (int i = 0; i < kBumpNodes; ++i) s += w[i] * bump(-1.0 + half * (x[i] + 1.0));
  return s * half;
}

}  // namespace

double WindowFunction::smooth_step(double u) {
  if (u <= 0.0) return 0.0;
  if (u >= 1.0) return 1.0;
  static const double total = bump_integral(1.0);
  // Integrate the shorter tail for accuracy near the ends.
  const double v = 2.0 * u - 1.0;
  if (v <= 0.0) return bump_integral(v) / total;
  return 1.0 - bump_integral(-v) / total;
}

double WindowFunction::a(double x) const {
  const double ax = std::abs(x);
  if (ax <= 0.5) return 1.0;
  if (ax >= 1.0) return 0.0;
  return 1.0 - smooth_step(2.0 * ax - 1.0);
}

double WindowFunction::b(double x) const { return std::sqrt(std::max(0.0, a(0.5 * x) - a(x))); }

}  // namespace bsd
