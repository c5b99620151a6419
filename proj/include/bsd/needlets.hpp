#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "bsd/cubature.hpp"
#include "bsd/harmonics.hpp"
#include "bsd/window.hpp"

namespace bsd {

using CubatureProvider = std::function<CubatureSet(int level)>;

/// Tight needlet frame over levels -1..J. Level -1 is the constant (P_0)
/// channel; level j >= 0 uses degrees L_j = [2^{j-1}, 2^{j+1} - 1] and the
/// cubature Z_j exact to degree 2^{j+2} - 2.
///
/// psi_{j,eta} = sqrt(lambda_eta) sum_{l in L_j} b(l / 2^j) L_l(<., eta>), hence
///   <psi_{j,eta}, Y_l^m> = sqrt(lambda_eta) b(l / 2^j) Y_l^m(eta).
///
/// Needlets are kept spectrally and never tabulated. The cubature of a level is
/// built on first use (thread-safe), so high levels that an estimate never
/// touches cost nothing.
class NeedletFrame {
 public:
  explicit NeedletFrame(int max_level, CubatureProvider provider = level_cubature);

  int max_level() const { return max_level_; }
  /// Degree band of level j; level 0 is {1}.
  int lowest_degree(int j) const { return j == 0 ? 1 : 1 << (j - 1); }
  int highest_degree(int j) const { return (1 << (j + 1)) - 1; }
  /// b(l / 2^j); zero outside L_j.
  double window(int j, int l) const;

  const CubatureSet& centers(int j) const;
  std::size_t size(int j) const { return centers(j).size(); }

  /// Harmonic expansion of psi_{j,eta}.
  HarmonicCoeffs needlet_harmonics(int j, std::size_t eta) const;
  /// psi_{j,eta}(x), through the zonal form.
  double needlet_value(int j, std::size_t eta, const SphPoint& x) const;
  /// psi_{j,eta} as a function of the geodesic distance from its centre.
  double needlet_profile(int j, std::size_t eta, double distance) const;
  /// ||psi_{j,eta}||_2 from Parseval.
  double needlet_norm(int j, std::size_t eta) const;

  const WindowFunction& window_function() const { return window_; }

 private:
  int max_level_;
  CubatureProvider provider_;
  WindowFunction window_;
  std::vector<std::vector<double>> windows_;  // windows_[j][l - lowest_degree(j)]
  mutable std::mutex mutex_;
  mutable std::vector<std::unique_ptr<const CubatureSet>> centers_;
};

/// Needlet coefficients beta_{j,eta} for levels -1..J. An empty level vector
/// stands for a level that is identically zero (not materialized).
class NeedletCoeffs {
 public:
  NeedletCoeffs() = default;
  explicit NeedletCoeffs(int max_level) : levels_(max_level + 1) {}

  int max_level() const { return static_cast<int>(levels_.size()) - 1; }
  double constant() const { return constant_; }
  void set_constant(double v) { constant_ = v; }

  std::vector<double>& level(int j) { return levels_[j]; }
  const std::vector<double>& level(int j) const { return levels_[j]; }
  bool is_zero_level(int j) const { return levels_[j].empty(); }

  double squared_norm() const;

 private:
  double constant_ = 0.0;
  std::vector<std::vector<double>> levels_;
};

/// beta_{j,eta} = sum_{l in L_j} sum_m sqrt(lambda_eta) b(l/2^j) Y_l^m(eta) f_l^m
/// for a single level; blocks beyond f.lmax() count as zero.
std::vector<double> needlet_analyze_level(const HarmonicCoeffs& f, const NeedletFrame& frame, int j);

/// Full analysis; requires f.lmax() >= 2^{J+1} - 1.
NeedletCoeffs needlet_analyze(const HarmonicCoeffs& f, const NeedletFrame& frame);

/// sum_j sum_eta beta_{j,eta} psi_{j,eta} plus the constant channel, as
/// harmonic coefficients up to degree 2^{J+1} - 1.
HarmonicCoeffs needlet_synthesize(const NeedletCoeffs& c, const NeedletFrame& frame);
/// Contribution of one level; adds into `out` (which must reach the level's band).
void needlet_synthesize_level(std::span<const double> beta, const NeedletFrame& frame, int j, HarmonicCoeffs& out);

/// |psi_{j,eta}| at the given geodesic distances from eta.
std::vector<double> localization_profile(const NeedletFrame& frame, int j, std::size_t eta,
                                         std::span<const double> distances);

/// Least-squares slope M of -log(envelope) against log(1 + 2^j d) over
/// d in [d_lo, d_hi], where the envelope is the running maximum of |psi| over
/// [d, d_hi]. Fits the decay bound C 2^j / (1 + 2^j d)^M.
double fitted_decay_exponent(const NeedletFrame& frame, int j, std::size_t eta, double d_lo, double d_hi,
                             int samples = 400);

/// ||psi_{j,eta}||_p by Gauss-Legendre quadrature of the zonal profile.
double needlet_lp_norm(const NeedletFrame& frame, int j, std::size_t eta, double p);

/// || 2^{j(s + 2(1/2 - 1/pi))} (sum_eta |beta_{j,eta}|^pi)^{1/pi} ||_{l^r} over
/// levels 0..J. Pass r = infinity for the sup norm.
double besov_norm(const NeedletCoeffs& c, double s, double pi_exponent, double r);

}  // namespace bsd
