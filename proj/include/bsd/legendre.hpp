#pragma once

#include <span>
#include <vector>

#include "bsd/sphere.hpp"

namespace bsd {

/// Associated Legendre function P_l^m(t), Condon-Shortley phase included,
/// unnormalized. Computed by the upward recurrence in l from P_m^m.
/// Throws std::domain_error unless 0 <= m <= l and |t| <= 1.
double eval_legendre(int l, int m, double t);

/// Legendre polynomial P_l(t).
double legendre_polynomial(int l, double t);

/// Real orthonormal spherical harmonic of degree l and order m (|m| <= l):
///   m > 0 : sqrt(2) N_lm P_l^m(cos theta) cos(m phi)
///   m = 0 : N_l0 P_l(cos theta)
///   m < 0 : sqrt(2) N_l|m| P_l^|m|(cos theta) sin(|m| phi)
/// with N_lm = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!).
double eval_sh(int l, int m, const SphPoint& p);

/// Zonal projection kernel L_l(t) = (2l+1)/(4pi) P_l(t), so that
/// L_l(<x,y>) = sum_m Y_l^m(x) Y_l^m(y).
double legendre_kernel(int l, double t);

/// Index of (l, m) in the flat degree-major layout used for harmonic data.
constexpr int sh_index(int l, int m) { return l * l + l + m; }
constexpr int sh_count(int lmax) { return (lmax + 1) * (lmax + 1); }

/// Recurrence coefficients for the fully normalized functions
///   Pbar_l^m = N_lm P_l^m,
///   Pbar_l^m = a_lm (t Pbar_{l-1}^m - Pbar_{l-2}^m / a_{l-1,m}).
/// Shared by the pointwise and ring transforms.
class NormalizedLegendre {
 public:
  explicit NormalizedLegendre(int lmax);

  int lmax() const { return lmax_; }

  /// Fills table[l(l+1)/2 + m] = Pbar_l^m(cos theta) for 0 <= m <= l <= lmax.
  void table(double cos_theta, double sin_theta, std::span<double> out) const;

  /// Pbar_m^m(cos theta) from the running diagonal value Pbar_{m-1}^{m-1}.
  double diagonal_step(int m, double sin_theta, double previous) const {
    return -diag_[m] * sin_theta * previous;
  }
  double a(int l, int m) const { return a_[offset(l, m)]; }

  static constexpr int table_size(int lmax) { return (lmax + 1) * (lmax + 2) / 2; }
  static constexpr int offset(int l, int m) { return l * (l + 1) / 2 + m; }

 private:
  int lmax_;
  std::vector<double> a_;
  std::vector<double> diag_;
};

/// All real harmonics Y_l^m(p), l <= lmax, in sh_index layout.
std::vector<double> sh_values(int lmax, const SphPoint& p);

}  // namespace bsd
