#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bsd/harmonics.hpp"
#include "bsd/simulate.hpp"
#include "bsd/sphere.hpp"

namespace bsd {

/// Fibonacci spiral grid with equal weights 4 pi / n.
struct EvalGrid {
  std::vector<SphPoint> points;
  std::vector<double> weights;
};

EvalGrid eval_grid(int n);

enum class ErrorNorm { l2, linf };

/// Discrete error normalized by the same norm of the truth: weighted
/// root-sum-square for l2, max absolute value for linf.
double lp_error(std::span<const double> estimate, std::span<const double> truth, std::span<const double> weights,
                ErrorNorm p);
double lp_error(const HarmonicCoeffs& f_hat, const TargetDensity& f_true, const EvalGrid& grid, ErrorNorm p);

struct StudyConfig {
  std::vector<std::pair<double, double>> pairs;  // (delta, eps)
  int replicates = 20;
  std::vector<std::string> methods{"bbd", "bnd"};
  std::uint64_t seed = 0;
  double kappa = 0.8;
  double tau_sig = 0.9;
  double tau_op = 0.2;
  double lambda = 1.0;
  int j_max = 8;
  int grid_points = 4096;
};

/// delta in {3e-3, 1e-3, 1e-4} crossed with eps in {1e-3, 1e-4}.
StudyConfig table3_config();

struct ErrorRow {
  double delta = 0.0;
  double eps = 0.0;
  std::string method;
  int replicate = 0;
  double l2 = 0.0;
  double linf = 0.0;
  std::string failure;  // non-empty when the replicate threw; errors are then NaN
};

struct ErrorAggregate {
  double delta = 0.0;
  double eps = 0.0;
  std::string method;
  int n = 0;  // successful replicates
  double mean_l2 = 0.0;
  double se_l2 = 0.0;
  double mean_linf = 0.0;
  double se_linf = 0.0;
};

struct ErrorReport {
  std::vector<ErrorRow> rows;
  /// Means and standard errors per (delta, eps, method), in row order.
  std::vector<ErrorAggregate> aggregate() const;
};

/// Replicate r of every cell uses the fixture seed derive_seed(seed, r), so
/// cells and methods share their noise draws.
ErrorReport run_study(const StudyConfig& cfg, const std::function<void(const ErrorRow&)>& progress = {});

/// Header delta,eps,method,replicate,l2,linf.
void write_results_csv(std::ostream& out, const ErrorReport& report);
void write_summary_csv(std::ostream& out, const ErrorReport& report);

struct FieldSample {
  SphPoint point;
  double value = 0.0;
};

std::vector<FieldSample> export_field(const HarmonicCoeffs& f, const EvalGrid& grid);
/// Header x,y,z,value.
void write_field_csv(std::ostream& out, const std::vector<FieldSample>& field);

/// Writes through a temporary sibling file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body);

}  // namespace bsd
