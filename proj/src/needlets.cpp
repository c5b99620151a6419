#include "bsd/needlets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace bsd {

NeedletFrame::NeedletFrame(int max_level, CubatureProvider provider)
    : max_level_(max_level), provider_(std::move(provider)), windows_(max_level + 1), centers_(max_level + 1) {
  if (max_level < 0) throw std::invalid_argument("NeedletFrame: max level must be >= 0");
  for (int j = 0; j <= max_level; ++j) {
    const double scale = std::ldexp(1.0, -j);
    for (int l = lowest_degree(j); l <= highest_degree(j); ++l) windows_[j].push_back(window_.b(l * scale));
  }
}

double NeedletFrame::window(int j, int l) const {
  if (j < 0 || j > max_level_ || l < lowest_degree(j) || l > highest_degree(j)) return 0.0;
  return windows_[j][l - lowest_degree(j)];
}

const CubatureSet& NeedletFrame::centers(int j) const {
  if (j < 0 || j > max_level_) throw std::out_of_range("NeedletFrame: level out of range");
  std::lock_guard lock(mutex_);
  if (!centers_[j]) {
    auto rule = std::make_unique<const CubatureSet>(provider_(j));
    if (rule->degree() < level_cubature_degree(j)) {
      throw std::invalid_argument("NeedletFrame: cubature for level " + std::to_string(j) +
                                  " is not exact to degree " + std::to_string(level_cubature_degree(j)));
    }
    centers_[j] = std::move(rule);
  }
  return *centers_[j];
}

HarmonicCoeffs NeedletFrame::needlet_harmonics(int j, std::size_t eta) const {
  const CubatureSet& z = centers(j);
  const double root_weight = std::sqrt(z.weights().at(eta));
  const int hi = highest_degree(j);
  const auto y = sh_values(hi, z.nodes()[eta]);
  HarmonicCoeffs out(hi);
  for (int l = lowest_degree(j); l <= hi; ++l) {
    const double bl = window(j, l);
    for (int m = -l; m <= l; ++m) out.at(l, m) = root_weight * bl * y[sh_index(l, m)];
  }
  return out;
}

double NeedletFrame::needlet_profile(int j, std::size_t eta, double distance) const {
  const double t = std::clamp(std::cos(distance), -1.0, 1.0);
  const int hi = highest_degree(j);
  double p0 = 1.0, p1 = t, sum = 0.0;
  for (int l = 1; l <= hi; ++l) {
    if (l >= 2) {
      const double p2 = ((2 * l - 1) * t * p1 - (l - 1) * p0) / l;
      p0 = p1;
      p1 = p2;
    }
    sum += window(j, l) * (2 * l + 1) * p1;
  }
  return std::sqrt(centers(j).weights().at(eta)) * sum / kFourPi;
}

double NeedletFrame::needlet_value(int j, std::size_t eta, const SphPoint& x) const {
  return needlet_profile(j, eta, geodesic_distance(x, centers(j).nodes().at(eta)));
}

double NeedletFrame::needlet_norm(int j, std::size_t eta) const {
  double s = 0.0;
  for (int l = lowest_degree(j); l <= highest_degree(j); ++l) {
    const double bl = window(j, l);
    s += bl * bl * (2 * l + 1);
  }
  return std::sqrt(centers(j).weights().at(eta) * s / kFourPi);
}

double NeedletCoeffs::squared_norm() const {
  double s = constant_ * constant_;
  for (const auto& level : levels_) {
    for (double v : level) s += v * v;
  }
  return s;
}

std::vector<double> needlet_analyze_level(const HarmonicCoeffs& f, const NeedletFrame& frame, int j) {
  const CubatureSet& z = frame.centers(j);
  const int lo = frame.lowest_degree(j);
  const int top = std::min(frame.highest_degree(j), f.lmax());
  if (top < lo) return std::vector<double>(z.size(), 0.0);
  HarmonicCoeffs band(top);
  for (int l = lo; l <= top; ++l) {
    const double bl = frame.window(j, l);
    if (bl == 0.0) continue;
    const auto src = f.block(l);
    auto dst = band.block(l);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = bl * src[i];
  }
  std::vector<double> beta = evaluate_on(band, z);
  for (std::size_t k = 0; k < beta.size(); ++k) beta[k] *= std::sqrt(z.weights()[k]);
  return beta;
}

NeedletCoeffs needlet_analyze(const HarmonicCoeffs& f, const NeedletFrame& frame) {
  const int J = frame.max_level();
  if (f.lmax() < frame.highest_degree(J)) {
    throw std::invalid_argument("needlet_analyze: coefficients must reach degree " +
                                std::to_string(frame.highest_degree(J)));
  }
  NeedletCoeffs out(J);
  out.set_constant(f.at(0, 0));
  for (int j = 0; j <= J; ++j) out.level(j) = needlet_analyze_level(f, frame, j);
  return out;
}

void needlet_synthesize_level(std::span<const double> beta, const NeedletFrame& frame, int j, HarmonicCoeffs& out) {
  const CubatureSet& z = frame.centers(j);
  if (beta.size() != z.size()) throw std::invalid_argument("needlet_synthesize_level: coefficient count mismatch");
  if (std::all_of(beta.begin(), beta.end(), [](double v) { return v == 0.0; })) return;
  const int hi = frame.highest_degree(j);
  if (out.lmax() < hi) throw std::invalid_argument("needlet_synthesize_level: output bandwidth too small");
  std::vector<double> scaled(beta.size());
  for (std::size_t k = 0; k < beta.size(); ++k) scaled[k] = beta[k] * std::sqrt(z.weights()[k]);
  const HarmonicCoeffs projected = adjoint_on(scaled, z, hi);
  for (int l = frame.lowest_degree(j); l <= hi; ++l) {
    const double bl = frame.window(j, l);
    if (bl == 0.0) continue;
    const auto src = projected.block(l);
    auto dst = out.block(l);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] += bl * src[i];
  }
}

HarmonicCoeffs needlet_synthesize(const NeedletCoeffs& c, const NeedletFrame& frame) {
  const int J = std::min(c.max_level(), frame.max_level());
  HarmonicCoeffs out(frame.highest_degree(std::max(J, 0)));
  out.at(0, 0) = c.constant();
  for (int j = 0; j <= J; ++j) {
    if (!c.is_zero_level(j)) needlet_synthesize_level(c.level(j), frame, j, out);
  }
  return out;
}

std::vector<double> localization_profile(const NeedletFrame& frame, int j, std::size_t eta,
                                         std::span<const double> distances) {
  std::vector<double> out;
  out.reserve(distances.size());
  for (double d : distances) {
    if (d < 0.0 || d > kPi) throw std::domain_error("localization_profile: distance outside [0, pi]");
    out.push_back(std::abs(frame.needlet_profile(j, eta, d)));
  }
  return out;
}

double fitted_decay_exponent(const NeedletFrame& frame, int j, std::size_t eta, double d_lo, double d_hi,
                             int samples) {
  if (!(d_lo > 0.0 && d_hi > d_lo && samples >= 2)) throw std::invalid_argument("fitted_decay_exponent: bad range");
  std::vector<double> d(samples);
  for (int k = 0; k < samples; ++k) d[k] = d_lo * std::pow(d_hi / d_lo, static_cast<double>(k) / (samples - 1));
  std::vector<double> envelope = localization_profile(frame, j, eta, d);
  for (int k = samples - 2; k >= 0; --k) envelope[k] = std::max(envelope[k], envelope[k + 1]);
  const double scale = std::ldexp(1.0, j);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int k = 0; k < samples; ++k) {
    const double x = std::log1p(scale * d[k]);
    const double y = std::log(envelope[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
  return -slope;
}

double needlet_lp_norm(const NeedletFrame& frame, int j, std::size_t eta, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("needlet_lp_norm: p must be >= 1");
  const int n = 8 * frame.highest_degree(j) + 64;
  const auto [t, w] = gauss_legendre(n);
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += w[i] * std::pow(std::abs(frame.needlet_profile(j, eta, std::acos(t[i]))), p);
  return std::pow(2.0 * kPi * s, 1.0 / p);
}

double besov_norm(const NeedletCoeffs& c, double s, double pi_exponent, double r) {
  if (!(pi_exponent >= 1.0)) throw std::invalid_argument("besov_norm: pi must be >= 1");
  if (!(r >= 1.0)) throw std::invalid_argument("besov_norm: r must be >= 1");
  const bool sup = std::isinf(r);
  double acc = 0.0;
  for (int j = 0; j <= c.max_level(); ++j) {
    double level = 0.0;
    for (double v : c.level(j)) level += std::pow(std::abs(v), pi_exponent);
    level = std::pow(level, 1.0 / pi_exponent) * std::exp2(j * (s + 2.0 * (0.5 - 1.0 / pi_exponent)));
    acc = sup ? std::max(acc, level) : acc + std::pow(level, r);
  }
  return sup ? acc : std::pow(acc, 1.0 / r);
}

}  // namespace bsd
