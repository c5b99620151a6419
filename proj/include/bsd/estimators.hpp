#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bsd/harmonics.hpp"
#include "bsd/needlets.hpp"
#include "bsd/operators.hpp"
#include "bsd/simulate.hpp"

namespace bsd {

/// x sqrt(|ln x|), or 0 for x = 0.
double noise_scale(double x);

/// J = floor(log2(lambda floor(min((eps sqrt|ln eps|)^{-1}, (delta sqrt|ln delta|)^{-2})))),
/// at least 0. A zero noise level drops out of the minimum; both zero throws.
int max_level(double eps, double delta, double lambda = 1.0);

struct ThresholdConfig {
  double kappa = 0.8;
  double tau_sig = 0.9;
  double tau_op = 0.2;
  double lambda = 1.0;
  double eps = 0.0;
  double delta = 0.0;
  std::optional<int> level;  // explicit J

  int max_level() const;
};

ThresholdConfig threshold_config(const FixtureConfig& fx);

/// l_j: smallest kept degree of level j's band, or -1 when the band is empty.
int smallest_kept_degree(const ThresholdedOperator& top, int j);

/// S_j = ||(K^{l_j})^{-1}|| max(tau_sig eps sqrt|ln eps|, tau_op 2^{-j/2} delta sqrt|ln delta|),
/// +infinity when no block of level j survived the operator thresholding.
double signal_threshold(int j, const ThresholdedOperator& top, double eps, double delta, double tau_sig,
                        double tau_op);

/// The unthresholded part of the needlet estimator: kept blocks solved, then
/// needlet coefficients per level. Levels whose band lost every block are
/// left empty.
struct NeedletStage {
  int level = 0;
  ThresholdedOperator top;
  HarmonicCoeffs solution;
  NeedletCoeffs beta;
  std::vector<int> l_j;
};

NeedletStage needlet_stage(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg,
                           const NeedletFrame& frame);

/// Number of |beta_{j,eta}| > s.
std::size_t count_above(const std::vector<double>& beta, double s);

struct EstimateResult {
  std::string method;
  int level = 0;
  ThresholdConfig config;
  HarmonicCoeffs f_hat;
  std::vector<bool> kept_blocks;
  NeedletCoeffs beta_hat;                  // before thresholding; empty for bbd
  std::vector<std::vector<bool>> survived;  // per level
  std::vector<double> s_j;                 // +infinity for killed levels
  std::vector<int> l_j;                    // -1 for killed levels

  std::size_t survived_count(int j) const;
};

/// Needlet estimator: operator thresholding, blockwise solve, needlet
/// analysis, hard thresholding |beta| > S_j, synthesis. The constant
/// channel is passed through unthresholded.
EstimateResult bnd_estimate(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg,
                            const NeedletFrame& frame);

/// Blockwise baseline: f^l = (K_delta^l)^{-1} g^l on kept blocks l <= 2^{J+1}.
EstimateResult bbd_estimate(const Observation& obs, const BlockSource& kd, const ThresholdConfig& cfg);

/// JSON export. Infinite thresholds are written as null.
void write_estimate(std::ostream& out, const EstimateResult& r);
EstimateResult read_estimate(std::istream& in);

}  // namespace bsd
