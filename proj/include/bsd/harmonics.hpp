#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bsd/cubature.hpp"
#include "bsd/legendre.hpp"
#include "bsd/sphere.hpp"

namespace bsd {

/// Coefficients of a band-limited function in the real orthonormal harmonic
/// basis: block l holds (<f, Y_l^m>)_{m=-l..l}.
class HarmonicCoeffs {
 public:
  HarmonicCoeffs() = default;
  explicit HarmonicCoeffs(int lmax);

  int lmax() const { return lmax_; }
  bool empty() const { return lmax_ < 0; }

  std::span<double> block(int l) { return {data_.data() + l * l, static_cast<std::size_t>(2 * l + 1)}; }
  std::span<const double> block(int l) const {
    return {data_.data() + l * l, static_cast<std::size_t>(2 * l + 1)};
  }
  double& at(int l, int m) { return data_[sh_index(l, m)]; }
  double at(int l, int m) const { return data_[sh_index(l, m)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Squared L2 norm of the represented function (Parseval).
  double squared_norm() const;
  double block_squared_norm(int l) const;

  /// Copy at a different bandwidth: truncates, or pads with zero blocks.
  HarmonicCoeffs resized(int lmax) const;
  /// Highest degree with a nonzero coefficient, -1 for the zero function.
  int effective_lmax() const;

  HarmonicCoeffs& operator+=(const HarmonicCoeffs& other);

 private:
  int lmax_ = -1;
  std::vector<double> data_;
};

/// Values of sum_l sum_m c_l^m Y_l^m at every node of q. Product rules use the
/// ring/FFT path; other rules are evaluated point by point.
std::vector<double> evaluate_on(const HarmonicCoeffs& c, const CubatureSet& q);

/// Adjoint of evaluate_on: the coefficients sum_k v_k Y_l^m(x_k), l <= lmax.
HarmonicCoeffs adjoint_on(std::span<const double> values, const CubatureSet& q, int lmax);

/// Projection onto degrees <= lmax by quadrature. The rule must be exact to
/// degree 2 lmax (std::invalid_argument otherwise).
HarmonicCoeffs analyze(std::span<const double> samples, int lmax, const CubatureSet& q);
HarmonicCoeffs analyze(const std::function<double(const SphPoint&)>& f, int lmax, const CubatureSet& q);

/// Projection onto degrees <= lmax by Gauss rules on the patches cut out by
/// the colatitude breaks (in (0, pi)) and longitude breaks (in [0, 2pi)).
/// Integration runs in theta with the sin(theta) Jacobian, so functions that
/// are smooth on each patch converge spectrally even with kinks along the
/// breaks. `nodes` is the Gauss order per patch and direction (0: lmax + 32).
HarmonicCoeffs analyze_piecewise(const std::function<double(const SphPoint&)>& f, int lmax,
                                 std::span<const double> theta_breaks, std::span<const double> phi_breaks,
                                 int nodes = 0);

/// Pointwise synthesis sum_l sum_m c_l^m Y_l^m(p).
double synthesize(const HarmonicCoeffs& c, const SphPoint& p);
std::vector<double> synthesize(const HarmonicCoeffs& c, std::span<const SphPoint> points);

}  // namespace bsd
