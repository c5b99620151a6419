#pragma once

#include <cstdint>
#include <istream>
#include <memory>
#include <optional>
#include <string>

#include "bsd/harmonics.hpp"
#include "bsd/operators.hpp"
#include "bsd/sphere.hpp"

namespace bsd {

inline constexpr double kSpikeNormalizer = 0.6729;

enum class TargetKind { exp_spike, uniform, custom };

/// Density on the sphere used as the unknown f.
///   exp_spike: exp(-2 ||x - center||_1) / normalizer, l1 distance in R^3
///   uniform:   1 / (4 pi)
///   custom:    the band-limited function with the given coefficients
struct TargetDensity {
  TargetKind kind = TargetKind::exp_spike;
  SphPoint center = SphPoint::from_cartesian(0.0, 1.0, 0.0);
  double normalizer = kSpikeNormalizer;
  HarmonicCoeffs coeffs;

  static TargetDensity exp_spike();
  static TargetDensity uniform();
  static TargetDensity custom(HarmonicCoeffs c);

  double operator()(const SphPoint& p) const;
  std::string name() const;
};

double target_density(const TargetDensity& target, const SphPoint& p);

/// Integral of exp(-2 ||x - (0,1,0)||_1) over the sphere (Gauss order `nodes`
/// per patch); the value the spike normalizer approximates.
double spike_mass(int nodes = 64);

/// Projection of the target onto degrees <= lmax. For centres on a coordinate
/// axis the spike is integrated patchwise between its kinks; other centres
/// fall back to a product rule of degree 4 lmax + 8.
HarmonicCoeffs project_target(const TargetDensity& target, int lmax);

/// g^l = K^l f^l + eps W^l with W^l iid N(0, 1), drawn block by block from the
/// stream of `seed`.
struct Observation {
  HarmonicCoeffs g;
  double eps = 0.0;
  std::uint64_t seed = 0;
};

Observation observe_signal(const HarmonicCoeffs& f, const BlockSource& k, double eps, std::uint64_t seed);

/// Text configuration of an experiment: one `key = value` per line, `#`
/// starts a comment. Keys: delta, eps, seed, alpha, nu, lmax, target
/// (exp_spike | uniform), kappa, tau_sig, tau_op, lambda, j_max, level.
struct FixtureConfig {
  double delta = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  double alpha = kPi;
  double nu = 1.0;
  std::optional<int> lmax;   // observation bandwidth; default 2^{J+1}
  TargetKind target = TargetKind::exp_spike;
  double kappa = 0.8;
  double tau_sig = 0.9;
  double tau_op = 0.2;
  double lambda = 1.0;
  int j_max = 8;             // cap on the level from the noise levels
  std::optional<int> level;  // explicit J; required when eps = delta = 0
};

FixtureConfig parse_fixture_config(std::istream& in);

/// J of an experiment: the explicit level, or min(max_level(eps, delta,
/// lambda), j_max).
int fixture_level(const FixtureConfig& cfg);

/// Full experiment: target, operator, noisy observation and noisy operator.
/// Signal and operator noises use disjoint seeds derived from cfg.seed.
struct Fixture {
  FixtureConfig config;
  int level = 0;
  TargetDensity target;
  HarmonicCoeffs f;  // target projected at 2^{J+1} - 1
  std::shared_ptr<const ScalarBlockOperator> k;
  std::shared_ptr<const PerturbedOperator> kd;
  Observation obs;
};

/// `projected` may hold a cached projection of the target at 2^{J+1} - 1.
Fixture make_fixture(const FixtureConfig& cfg, const HarmonicCoeffs* projected = nullptr);

}  // namespace bsd
