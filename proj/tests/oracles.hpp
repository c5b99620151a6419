#pragma once

// Reference computations for the tests. Each one takes a different route from
// the library code it checks: explicit series instead of recurrences, an
// eigenvalue Gauss rule instead of Newton iteration, Simpson instead of
// Gauss-Legendre.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bsd/harmonics.hpp"

namespace oracle {

inline long double binomial(int n, int k) {
  long double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline long double factorial(int n) {
  long double r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// P_l^m(t) = (-1)^m (1 - t^2)^{m/2} d^m/dt^m P_l(t), with P_l expanded as
// 2^{-l} sum_k (-1)^k C(l,k) C(2l-2k,l) t^{l-2k}.
inline double legendre_series(int l, int m, double t) {
  long double deriv = 0;
  for (int k = 0; 2 * k <= l; ++k) {
    const int power = l - 2 * k;
    if (power < m) continue;
    long double c = ((k % 2) ? -1.0L : 1.0L) * binomial(l, k) * binomial(2 * l - 2 * k, l);
    for (int i = 0; i < m; ++i) c *= power - i;
    deriv += c * std::pow(static_cast<long double>(t), power - m);
  }
  deriv /= std::pow(2.0L, l);
  const long double sign = (m % 2) ? -1.0L : 1.0L;
  return static_cast<double>(sign * std::pow(1.0L - static_cast<long double>(t) * t, m / 2.0L) * deriv);
}

inline double real_sh(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const long double norm =
      std::sqrt((2 * l + 1) / (4 * std::numbers::pi_v<long double>) * factorial(l - am) / factorial(l + am));
  const double p = static_cast<double>(norm) * legendre_series(l, am, std::cos(theta));
  if (m == 0) return p;
  return std::sqrt(2.0) * p * (m > 0 ? std::cos(am * phi) : std::sin(am * phi));
}

// Golub-Welsch: Gauss-Legendre nodes and weights from the Jacobi matrix.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre_eig(int n) {
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jac(k, k - 1) = jac(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = 2.0 * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

// Integral over the sphere of f(theta, phi): Gauss in cos(theta) times the
// trapezoid rule in phi; exact for polynomials of degree < min(2n, m).
inline double sphere_integral(const std::function<double(double, double)>& f, int n, int m) {
  const auto [x, w] = gauss_legendre_eig(n);
  double s = 0;
  for (int i = 0; i < n; ++i) {
    const double theta = std::acos(x[i]);
    for (int k = 0; k < m; ++k) s += w[i] * (2 * std::numbers::pi / m) * f(theta, 2 * std::numbers::pi * k / m);
  }
  return s;
}

// Same integral split at theta = pi/2 and at phi = pi/2, 3pi/2, Gauss in theta
// (with the sin(theta) Jacobian) and in phi on every patch; spectrally
// accurate for integrands smooth on each patch.
inline double sphere_integral_split(const std::function<double(double, double)>& f, int n) {
  const auto [x, w] = gauss_legendre_eig(n);
  const double pi = std::numbers::pi;
  double s = 0;
  for (double t0 : {0.0, pi / 2}) {
    for (int i = 0; i < n; ++i) {
      const double theta = t0 + pi / 4 * (x[i] + 1);
      const double wt = pi / 4 * w[i] * std::sin(theta);
      for (double p0 : {-pi / 2, pi / 2}) {
        for (int k = 0; k < n; ++k) s += wt * pi / 2 * w[k] * f(theta, p0 + pi / 2 * (x[k] + 1));
      }
    }
  }
  return s;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * ((i % 2) ? 4 : 2);
  return s * h / 3;
}

// The bump-integral cutoff on (1/2, 1): a(x) = 1 - s(2x - 1) with
// s(u) = int_{-1}^{2u-1} phi / int_{-1}^{1} phi, so the upper limit is 4x - 3.
inline double cutoff(double x) {
  x = std::abs(x);
  if (x <= 0.5) return 1.0;
  if (x >= 1.0) return 0.0;
  auto phi = [](double t) { return std::abs(t) < 1 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; };
  return 1.0 - simpson(phi, -1.0, 4 * x - 3) / simpson(phi, -1.0, 1.0);
}

inline bsd::HarmonicCoeffs random_coeffs(int lmax, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  bsd::HarmonicCoeffs c(lmax);
  for (double& v : c.data()) v = normal(rng);
  return c;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace oracle
