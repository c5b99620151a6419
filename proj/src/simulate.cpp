#include "bsd/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "bsd/cubature.hpp"
#include "bsd/estimators.hpp"
#include "bsd/seeding.hpp"

namespace bsd {

TargetDensity TargetDensity::exp_spike() { return TargetDensity{}; }

TargetDensity TargetDensity::uniform() {
  TargetDensity t;
  t.kind = TargetKind::uniform;
  return t;
}

TargetDensity TargetDensity::custom(HarmonicCoeffs c) {
  TargetDensity t;
  t.kind = TargetKind::custom;
  t.coeffs = std::move(c);
  return t;
}

double TargetDensity::operator()(const SphPoint& p) const {
  switch (kind) {
    case TargetKind::exp_spike: {
      const double l1 = std::abs(p.x - center.x) + std::abs(p.y - center.y) + std::abs(p.z - center.z);
      return std::exp(-2.0 * l1) / normalizer;
    }
    case TargetKind::uniform:
      return 1.0 / kFourPi;
    case TargetKind::custom:
      return synthesize(coeffs, p);
  }
  return 0.0;
}

std::string TargetDensity::name() const {
  switch (kind) {
    case TargetKind::exp_spike:
      return "exp_spike";
    case TargetKind::uniform:
      return "uniform";
    case TargetKind::custom:
      return "custom";
  }
  return "?";
}

double target_density(const TargetDensity& target, const SphPoint& p) { return target(p); }

namespace {

// The spike is smooth away from the planes x = center.x, y = center.y and
// z = center.z. A plane through the origin meets the sphere on coordinate
// lines (x = 0: phi = pi/2, 3pi/2; y = 0: phi = 0, pi; z = 0: theta = pi/2),
// and a plane at +-1 only touches it at a point where |x_i - c_i| is smooth.
// Any other offset gives a kink off the coordinate lines.
bool kink_breaks(const TargetDensity& t, std::vector<double>& theta_breaks, std::vector<double>& phi_breaks) {
  const double c[] = {t.center.x, t.center.y, t.center.z};
  for (double v : c) {
    if (v != 0.0 && std::abs(v) != 1.0) return false;
  }
  if (c[0] == 0.0) phi_breaks.insert(phi_breaks.end(), {kPi / 2, 3 * kPi / 2});
  if (c[1] == 0.0) phi_breaks.insert(phi_breaks.end(), {0.0, kPi});
  if (c[2] == 0.0) theta_breaks.push_back(kPi / 2);
  return true;
}

HarmonicCoeffs project_spike(const TargetDensity& t, int lmax, int nodes) {
  const auto f = [&](const SphPoint& p) { return t(p); };
  std::vector<double> theta_breaks, phi_breaks;
  if (kink_breaks(t, theta_breaks, phi_breaks)) return analyze_piecewise(f, lmax, theta_breaks, phi_breaks, nodes);
  return analyze(f, lmax, product_rule(4 * lmax + 8));
}

}  // namespace

double spike_mass(int nodes) {
  TargetDensity t = TargetDensity::exp_spike();
  t.normalizer = 1.0;
  return project_spike(t, 0, nodes).at(0, 0) * std::sqrt(kFourPi);
}

HarmonicCoeffs project_target(const TargetDensity& target, int lmax) {
  if (target.kind == TargetKind::uniform) {
    HarmonicCoeffs c(lmax);
    c.at(0, 0) = std::sqrt(kFourPi) / kFourPi;
    return c;
  }
  if (target.kind == TargetKind::custom) return target.coeffs.resized(lmax);
  return project_spike(target, lmax, 0);
}

Observation observe_signal(const HarmonicCoeffs& f, const BlockSource& k, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw std::invalid_argument("observe_signal: eps must be >= 0");
  if (k.lmax() < f.lmax()) throw std::invalid_argument("observe_signal: operator bandwidth below signal bandwidth");
  Observation obs{apply(k, f), eps, seed};
  if (eps == 0.0) return obs;
  std::normal_distribution<double> normal;
  for (int l = 0; l <= f.lmax(); ++l) {
    auto engine = make_engine(seed, 0, static_cast<std::uint64_t>(l));
    for (double& v : obs.g.block(l)) v += eps * normal(engine);
  }
  return obs;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_value(const std::string& key, const std::string& text, int lineno) {
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) {
    throw std::runtime_error("fixture config line " + std::to_string(lineno) + ": bad value for " + key);
  }
  return v;
}

}  // namespace

FixtureConfig parse_fixture_config(std::istream& in) {
  FixtureConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("fixture config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "delta") cfg.delta = parse_value<double>(key, value, lineno);
    else if (key == "eps") cfg.eps = parse_value<double>(key, value, lineno);
    else if (key == "seed") cfg.seed = parse_value<std::uint64_t>(key, value, lineno);
    else if (key == "alpha") cfg.alpha = parse_value<double>(key, value, lineno);
    else if (key == "nu") cfg.nu = parse_value<double>(key, value, lineno);
    else if (key == "lmax") cfg.lmax = parse_value<int>(key, value, lineno);
    else if (key == "kappa") cfg.kappa = parse_value<double>(key, value, lineno);
    else if (key == "tau_sig") cfg.tau_sig = parse_value<double>(key, value, lineno);
    else if (key == "tau_op") cfg.tau_op = parse_value<double>(key, value, lineno);
    else if (key == "lambda") cfg.lambda = parse_value<double>(key, value, lineno);
    else if (key == "j_max") cfg.j_max = parse_value<int>(key, value, lineno);
    else if (key == "level") cfg.level = parse_value<int>(key, value, lineno);
    else if (key == "target") {
      if (value == "exp_spike") cfg.target = TargetKind::exp_spike;
      else if (value == "uniform") cfg.target = TargetKind::uniform;
      else throw std::runtime_error("fixture config line " + std::to_string(lineno) + ": unknown target " + value);
    } else {
      throw std::runtime_error("fixture config line " + std::to_string(lineno) + ": unknown key " + key);
    }
  }
  if (cfg.delta < 0 || cfg.eps < 0) throw std::runtime_error("fixture config: noise levels must be >= 0");
  if (cfg.delta >= 1 || cfg.eps >= 1) throw std::runtime_error("fixture config: noise levels must be < 1");
  return cfg;
}

int fixture_level(const FixtureConfig& cfg) {
  if (cfg.level) {
    if (*cfg.level < 0) throw std::invalid_argument("fixture: level must be >= 0");
    return *cfg.level;
  }
  return std::min(max_level(cfg.eps, cfg.delta, cfg.lambda), cfg.j_max);
}

Fixture make_fixture(const FixtureConfig& cfg, const HarmonicCoeffs* projected) {
  Fixture fx;
  fx.config = cfg;
  fx.level = fixture_level(cfg);
  const int band = (1 << (fx.level + 1)) - 1;
  const int obs_lmax = cfg.lmax.value_or(band + 1);
  if (obs_lmax < band) throw std::invalid_argument("fixture: lmax below 2^{J+1} - 1");

  fx.target = cfg.target == TargetKind::uniform ? TargetDensity::uniform() : TargetDensity::exp_spike();
  if (projected && projected->lmax() == band) {
    fx.f = projected->resized(obs_lmax);
  } else {
    fx.f = project_target(fx.target, band).resized(obs_lmax);
  }

  fx.k = std::make_shared<ScalarBlockOperator>(rosenthal_spectrum(cfg.alpha, cfg.nu, obs_lmax));
  fx.kd = std::make_shared<PerturbedOperator>(fx.k, cfg.delta, derive_seed(cfg.seed, kOperatorNoiseStream));
  fx.obs = observe_signal(fx.f, *fx.k, cfg.eps, derive_seed(cfg.seed, kSignalNoiseStream));
  return fx;
}

}  // namespace bsd
