#include "bsd/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "bsd/estimators.hpp"
#include "bsd/needlets.hpp"
#include "bsd/operators.hpp"
#include "bsd/seeding.hpp"
#include "bsd/simulate.hpp"

namespace bsd {

namespace {

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("calibrate: empty grid");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("calibrate: grid must be ascending");
}

std::vector<double> null_noise_norms(double delta, std::uint64_t seed, int lmax) {
  std::vector<double> norms;
  for (int l = 1; l <= lmax; ++l) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(noise_block(seed, l));
    norms.push_back(delta * svd.singularValues()(0));
  }
  return norms;
}

int remaining(const std::vector<double>& norms, double delta, double kappa) {
  int n = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    n += norms[i] >= operator_threshold(static_cast<int>(i) + 1, delta, kappa) ? 1 : 0;
  }
  return n;
}

}  // namespace

int null_operator_remaining(double delta, double kappa, std::uint64_t seed, int lmax) {
  return remaining(null_noise_norms(delta, seed, lmax), delta, kappa);
}

KappaCalibration calibrate_kappa(double delta, int n_runs, const std::vector<double>& kappa_grid,
                                 std::uint64_t seed) {
  if (!(delta > 0.0)) throw std::invalid_argument("calibrate_kappa: delta must be > 0");
  if (n_runs < 1) throw std::invalid_argument("calibrate_kappa: n_runs must be >= 1");
  check_grid(kappa_grid);
  KappaCalibration c;
  c.delta = delta;
  c.grid = kappa_grid;
  c.mean_remaining.assign(kappa_grid.size(), 0.0);
  for (int run = 0; run < n_runs; ++run) {
    const auto norms = null_noise_norms(delta, derive_seed(seed, static_cast<std::uint64_t>(run)), 10);
    for (std::size_t g = 0; g < kappa_grid.size(); ++g) c.mean_remaining[g] += remaining(norms, delta, kappa_grid[g]);
  }
  c.exhausted = true;
  c.kappa = kappa_grid.back();
  for (std::size_t g = 0; g < kappa_grid.size(); ++g) {
    c.mean_remaining[g] /= n_runs;
    if (c.exhausted && std::lround(c.mean_remaining[g]) == 0) {
      c.kappa = kappa_grid[g];
      c.exhausted = false;
    }
  }
  return c;
}

TauCalibration calibrate_tau(TauKind which, double eps, double delta, double kappa, const std::vector<double>& tau_grid,
                             int n_runs, std::uint64_t seed, int levels) {
  if (n_runs < 1) throw std::invalid_argument("calibrate_tau: n_runs must be >= 1");
  if (levels < 0) throw std::invalid_argument("calibrate_tau: levels must be >= 0");
  check_grid(tau_grid);
  TauCalibration c;
  c.which = which;
  c.eps = eps;
  c.delta = delta;
  c.grid = tau_grid;
  c.mean_survivors = Eigen::MatrixXd::Zero(levels + 1, static_cast<Eigen::Index>(tau_grid.size()));

  const NeedletFrame frame(levels);
  FixtureConfig fc;
  fc.eps = eps;
  fc.delta = delta;
  fc.kappa = kappa;
  fc.target = TargetKind::uniform;
  fc.level = levels;
  for (int run = 0; run < n_runs; ++run) {
    fc.seed = derive_seed(seed, static_cast<std::uint64_t>(run));
    const Fixture fx = make_fixture(fc);
    const ThresholdConfig cfg = threshold_config(fc);
    const NeedletStage st = needlet_stage(fx.obs, *fx.kd, cfg, frame);
    for (std::size_t g = 0; g < tau_grid.size(); ++g) {
      const double ts = which == TauKind::sig ? tau_grid[g] : 0.0;
      const double to = which == TauKind::op ? tau_grid[g] : 0.0;
      for (int j = 0; j <= levels; ++j) {
        const double s = signal_threshold(j, st.top, eps, delta, ts, to);
        c.mean_survivors(j, static_cast<Eigen::Index>(g)) += static_cast<double>(count_above(st.beta.level(j), s));
      }
    }
  }
  c.mean_survivors /= n_runs;
  c.exhausted = true;
  c.tau = tau_grid.back();
  for (std::size_t g = 0; g < tau_grid.size(); ++g) {
    bool zero = true;
    for (int j = 0; j <= levels; ++j) zero = zero && std::lround(c.mean_survivors(j, static_cast<Eigen::Index>(g))) == 0;
    if (zero) {
      c.tau = tau_grid[g];
      c.exhausted = false;
      break;
    }
  }
  return c;
}

void write_kappa_csv(std::ostream& out, const KappaCalibration& c) {
  out << "kappa";
  for (double k : c.grid) out << ',' << k;
  out << "\nremaining";
  for (double m : c.mean_remaining) out << ',' << m;
  out << '\n';
}

void write_tau_csv(std::ostream& out, const TauCalibration& c) {
  out << "j";
  for (double t : c.grid) out << ',' << t;
  out << '\n';
  for (Eigen::Index j = 0; j < c.mean_survivors.rows(); ++j) {
    out << j;
    for (Eigen::Index g = 0; g < c.mean_survivors.cols(); ++g) out << ',' << c.mean_survivors(j, g);
    out << '\n';
  }
}

}  // namespace bsd
