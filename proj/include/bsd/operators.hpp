#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bsd/harmonics.hpp"

namespace bsd {

/// A convolution operator on the sphere seen through its harmonic blocks:
/// (K f)^l = K^l f^l with K^l a (2l+1) x (2l+1) matrix.
class BlockSource {
 public:
  virtual ~BlockSource() = default;
  virtual int lmax() const = 0;
  virtual Eigen::MatrixXd block(int l) const = 0;
  /// Column c of block l; overridden where cheaper than forming the block.
  virtual Eigen::VectorXd column(int l, int c) const { return block(l).col(c); }
  /// out = K^l in.
  virtual void apply_block(int l, std::span<const double> in, std::span<double> out) const;
};

/// Dense, fully materialized blocks.
class BlockOperator final : public BlockSource {
 public:
  BlockOperator() = default;
  explicit BlockOperator(std::vector<Eigen::MatrixXd> blocks);
  static BlockOperator identity(int lmax);
  static BlockOperator zero(int lmax);

  int lmax() const override { return static_cast<int>(blocks_.size()) - 1; }
  Eigen::MatrixXd block(int l) const override { return blocks_.at(l); }
  Eigen::VectorXd column(int l, int c) const override { return blocks_.at(l).col(c); }
  void apply_block(int l, std::span<const double> in, std::span<double> out) const override;
  const Eigen::MatrixXd& operator[](int l) const { return blocks_.at(l); }

  /// The whole block-diagonal matrix acting on sh_index-ordered coefficients.
  Eigen::MatrixXd dense() const;

 private:
  std::vector<Eigen::MatrixXd> blocks_;
};

/// Blocks of the form c_l I (zonal kernels, Rosenthal laws).
class ScalarBlockOperator final : public BlockSource {
 public:
  explicit ScalarBlockOperator(std::vector<double> values) : values_(std::move(values)) {}
  int lmax() const override { return static_cast<int>(values_.size()) - 1; }
  double value(int l) const { return values_.at(l); }
  Eigen::MatrixXd block(int l) const override;
  Eigen::VectorXd column(int l, int c) const override;
  void apply_block(int l, std::span<const double> in, std::span<double> out) const override;

 private:
  std::vector<double> values_;
};

/// Noisy observation K_delta^l = K^l + delta B^l with B^l iid N(0,1). Block l
/// draws its entries column-major from its own stream of `seed`, so any block
/// or column is reproducible on demand and never stored.
class PerturbedOperator final : public BlockSource {
 public:
  PerturbedOperator(std::shared_ptr<const BlockSource> base, double delta, std::uint64_t seed);

  int lmax() const override { return base_->lmax(); }
  Eigen::MatrixXd block(int l) const override;
  Eigen::VectorXd column(int l, int c) const override;
  double delta() const { return delta_; }

  BlockOperator materialize() const;

 private:
  std::shared_ptr<const BlockSource> base_;
  double delta_;
  std::uint64_t seed_;
};

/// The standard-normal matrix B^l of `seed`, drawn column-major.
Eigen::MatrixXd noise_block(std::uint64_t seed, int l);

HarmonicCoeffs apply(const BlockSource& k, const HarmonicCoeffs& f);

/// ((sin((l + 1/2) alpha)) / ((2l + 1) sin(alpha / 2)))^nu; for a negative
/// base and non-integer nu the sign is kept and the magnitude raised to nu.
double rosenthal_value(double alpha, double nu, int l);
BlockOperator rosenthal(double alpha, double nu, int lmax);
ScalarBlockOperator rosenthal_spectrum(double alpha, double nu, int lmax);

BlockOperator perturb(const BlockOperator& k, double delta, std::uint64_t seed);

/// 1 / sigma_min, or +infinity for a numerically singular block
/// (sigma_min <= 1e-14 sigma_max, or the zero block).
double block_inverse_norm(const Eigen::MatrixXd& block);
double block_inverse_norm(const BlockSource& k, int l);

/// O_{l,delta} = kappa sqrt(2l + 1) delta sqrt(|ln delta|).
double operator_threshold(int l, double delta, double kappa);

/// Result of the operator thresholding: blocks l <= lmax() either kept (with a
/// factorization for solves) or removed.
class ThresholdedOperator {
 public:
  int lmax() const { return static_cast<int>(keep_.size()) - 1; }
  bool kept(int l) const { return l <= lmax() && keep_[l] != 0; }
  /// ||(K^l)^{-1}|| for kept blocks, +infinity for removed ones.
  double inverse_norm(int l) const { return kept(l) ? inverse_norm_[l] : std::numeric_limits<double>::infinity(); }
  /// Solves K^l x = rhs with partial-pivoting LU; throws for removed or singular blocks.
  Eigen::VectorXd solve(int l, std::span<const double> rhs) const;
  std::vector<bool> keep_mask() const { return {keep_.begin(), keep_.end()}; }
  /// Number of kept blocks with degree in [lo, hi].
  int kept_count(int lo, int hi) const;
  /// Smallest kept degree in [lo, hi], or -1.
  int first_kept(int lo, int hi) const;

 private:
  friend ThresholdedOperator t_op(const BlockSource&, double, double, int, bool);
  std::vector<char> keep_;
  std::vector<double> inverse_norm_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

/// Keeps block l (0 <= l <= min(2^{J+1}, K.lmax())) iff
/// ||(K^l)^{-1}|| <= 1 / O_{l,delta}; delta = 0 keeps everything.
/// With `use_certificate`, a block is removed without an SVD as soon as some
/// column satisfies ||K^l e_c|| < O_{l,delta} (which bounds sigma_min); the
/// outcome is identical, only cheaper.
ThresholdedOperator t_op(const BlockSource& kd, double delta, double kappa, int max_level,
                         bool use_certificate = true);

struct DipEstimate {
  double nu = 0.0;
  double q1 = 0.0;  // min_l ||(K^l)^{-1}|| / l^nu over the fit range
  double q2 = 0.0;  // max_l ||(K^l)^{-1}|| / l^nu
};

/// Least-squares fit of log ||(K^l)^{-1}|| against log l for l in [lmin, lmax].
DipEstimate estimate_dip(const BlockSource& k, int lmin, int lmax);

/// Text container: "bsd-block-operator 1", "lmax L", then the rows of each
/// block, one row per line, in shortest round-trip decimal form.
void write_operator(std::ostream& out, const BlockSource& k);
BlockOperator read_operator(std::istream& in);

}  // namespace bsd
