#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

namespace bsd {

/// Null-operator benchmark for kappa: with K = 0 the observed blocks are pure
/// noise delta B^l, and a block l in [1, 10] "remains" when that noise reaches
/// the operator threshold, ||delta B^l|| >= O_{l,delta}.
struct KappaCalibration {
  double delta = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_remaining;  // per grid value, averaged over runs
  double kappa = 0.0;                  // smallest grid value whose rounded mean is 0
  bool exhausted = false;              // no grid value reached 0; kappa is the grid max
};

/// Blocks l in [1, lmax] of delta B (stream `seed`) with ||delta B^l|| >= O_{l,delta}.
int null_operator_remaining(double delta, double kappa, std::uint64_t seed, int lmax = 10);

KappaCalibration calibrate_kappa(double delta, int n_runs, const std::vector<double>& kappa_grid,
                                 std::uint64_t seed);

enum class TauKind { sig, op };

/// Uniform-density benchmark for tau: all needlet coefficients of the true
/// function vanish for j >= 1, so survivors at j <= levels are false alarms.
/// The other tau is set to zero so that only the calibrated term acts.
struct TauCalibration {
  TauKind which = TauKind::sig;
  double eps = 0.0;
  double delta = 0.0;
  std::vector<double> grid;
  Eigen::MatrixXd mean_survivors;  // (levels + 1) x grid, averaged over runs
  double tau = 0.0;
  bool exhausted = false;
};

TauCalibration calibrate_tau(TauKind which, double eps, double delta, double kappa, const std::vector<double>& tau_grid,
                             int n_runs, std::uint64_t seed, int levels = 3);

/// "kappa,<grid>" then "remaining,<means>".
void write_kappa_csv(std::ostream& out, const KappaCalibration& c);
/// "j,<grid>" then one row per level.
void write_tau_csv(std::ostream& out, const TauCalibration& c);

}  // namespace bsd
