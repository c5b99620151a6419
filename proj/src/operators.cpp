#include "bsd/operators.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "bsd/seeding.hpp"

namespace bsd {

namespace {

using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

int block_dim(int l) { return 2 * l + 1; }

}  // namespace

void BlockSource::apply_block(int l, std::span<const double> in, std::span<double> out) const {
  VecMap(out.data(), block_dim(l)) = block(l) * ConstVecMap(in.data(), block_dim(l));
}

BlockOperator::BlockOperator(std::vector<Eigen::MatrixXd> blocks) : blocks_(std::move(blocks)) {
  for (std::size_t l = 0; l < blocks_.size(); ++l) {
    const auto n = static_cast<Eigen::Index>(2 * l + 1);
    if (blocks_[l].rows() != n || blocks_[l].cols() != n) {
      throw std::invalid_argument("BlockOperator: block " + std::to_string(l) + " must be " + std::to_string(n) +
                                  "x" + std::to_string(n));
    }
  }
}

BlockOperator BlockOperator::identity(int lmax) {
  std::vector<Eigen::MatrixXd> blocks;
  for (int l = 0; l <= lmax; ++l) blocks.push_back(Eigen::MatrixXd::Identity(block_dim(l), block_dim(l)));
  return BlockOperator(std::move(blocks));
}

BlockOperator BlockOperator::zero(int lmax) {
  std::vector<Eigen::MatrixXd> blocks;
  for (int l = 0; l <= lmax; ++l) blocks.push_back(Eigen::MatrixXd::Zero(block_dim(l), block_dim(l)));
  return BlockOperator(std::move(blocks));
}

void BlockOperator::apply_block(int l, std::span<const double> in, std::span<double> out) const {
  VecMap(out.data(), block_dim(l)) = blocks_.at(l) * ConstVecMap(in.data(), block_dim(l));
}

Eigen::MatrixXd BlockOperator::dense() const {
  const int total = sh_count(lmax());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(total, total);
  for (int l = 0; l <= lmax(); ++l) out.block(l * l, l * l, block_dim(l), block_dim(l)) = blocks_[l];
  return out;
}

Eigen::MatrixXd ScalarBlockOperator::block(int l) const {
  return value(l) * Eigen::MatrixXd::Identity(block_dim(l), block_dim(l));
}

Eigen::VectorXd ScalarBlockOperator::column(int l, int c) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(block_dim(l));
  v[c] = value(l);
  return v;
}

void ScalarBlockOperator::apply_block(int l, std::span<const double> in, std::span<double> out) const {
  const double c = value(l);
  for (int i = 0; i < block_dim(l); ++i) out[i] = c * in[i];
}

Eigen::MatrixXd noise_block(std::uint64_t seed, int l) {
  const int n = block_dim(l);
  auto engine = make_engine(seed, 0, static_cast<std::uint64_t>(l));
  std::normal_distribution<double> normal;
  Eigen::MatrixXd b(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) b(r, c) = normal(engine);
  }
  return b;
}

PerturbedOperator::PerturbedOperator(std::shared_ptr<const BlockSource> base, double delta, std::uint64_t seed)
    : base_(std::move(base)), delta_(delta), seed_(seed) {
  if (!base_) throw std::invalid_argument("PerturbedOperator: null base operator");
  if (!(delta >= 0.0)) throw std::invalid_argument("PerturbedOperator: delta must be >= 0");
}

Eigen::MatrixXd PerturbedOperator::block(int l) const {
  if (delta_ == 0.0) return base_->block(l);
  return base_->block(l) + delta_ * noise_block(seed_, l);
}

Eigen::VectorXd PerturbedOperator::column(int l, int c) const {
  Eigen::VectorXd v = base_->column(l, c);
  if (delta_ == 0.0) return v;
  const int n = block_dim(l);
  auto engine = make_engine(seed_, 0, static_cast<std::uint64_t>(l));
  std::normal_distribution<double> normal;
  // Skip the preceding columns of the same stream.
  for (long k = 0; k < static_cast<long>(c) * n; ++k) normal(engine);
  for (int r = 0; r < n; ++r) v[r] += delta_ * normal(engine);
  return v;
}

BlockOperator PerturbedOperator::materialize() const {
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(lmax() + 1);
  for (int l = 0; l <= lmax(); ++l) blocks.push_back(block(l));
  return BlockOperator(std::move(blocks));
}

HarmonicCoeffs apply(const BlockSource& k, const HarmonicCoeffs& f) {
  if (k.lmax() < f.lmax()) {
    throw std::invalid_argument("apply: operator has blocks up to " + std::to_string(k.lmax()) +
                                " but coefficients reach " + std::to_string(f.lmax()));
  }
  HarmonicCoeffs out(f.lmax());
  for (int l = 0; l <= f.lmax(); ++l) k.apply_block(l, f.block(l), out.block(l));
  return out;
}

double rosenthal_value(double alpha, double nu, int l) {
  if (!(alpha > 0.0 && alpha <= kPi)) throw std::domain_error("rosenthal: alpha must lie in (0, pi]");
  if (!(nu > 0.0)) throw std::domain_error("rosenthal: nu must be > 0");
  const double base = std::sin((l + 0.5) * alpha) / ((2 * l + 1) * std::sin(0.5 * alpha));
  if (nu == std::round(nu)) return std::pow(base, nu);
  return std::copysign(std::pow(std::abs(base), nu), base);
}

ScalarBlockOperator rosenthal_spectrum(double alpha, double nu, int lmax) {
  std::vector<double> values;
  for (int l = 0; l <= lmax; ++l) values.push_back(rosenthal_value(alpha, nu, l));
  return ScalarBlockOperator(std::move(values));
}

BlockOperator rosenthal(double alpha, double nu, int lmax) {
  const ScalarBlockOperator spectrum = rosenthal_spectrum(alpha, nu, lmax);
  std::vector<Eigen::MatrixXd> blocks;
  for (int l = 0; l <= lmax; ++l) blocks.push_back(spectrum.block(l));
  return BlockOperator(std::move(blocks));
}

BlockOperator perturb(const BlockOperator& k, double delta, std::uint64_t seed) {
  return PerturbedOperator(std::make_shared<BlockOperator>(k), delta, seed).materialize();
}

double block_inverse_norm(const Eigen::MatrixXd& block) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(block);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double smin = sv.size() ? sv(sv.size() - 1) : 0.0;
  if (smax == 0.0 || smin <= 1e-14 * smax) return std::numeric_limits<double>::infinity();
  return 1.0 / smin;
}

double block_inverse_norm(const BlockSource& k, int l) {
  if (l < 0 || l > k.lmax()) throw std::out_of_range("block_inverse_norm: degree out of range");
  return block_inverse_norm(k.block(l));
}

double operator_threshold(int l, double delta, double kappa) {
  if (delta <= 0.0) return 0.0;
  return kappa * std::sqrt(2.0 * l + 1.0) * delta * std::sqrt(std::abs(std::log(delta)));
}

Eigen::VectorXd ThresholdedOperator::solve(int l, std::span<const double> rhs) const {
  if (!kept(l)) throw std::logic_error("ThresholdedOperator::solve: block " + std::to_string(l) + " was removed");
  if (std::isinf(inverse_norm_[l])) {
    throw std::runtime_error("ThresholdedOperator::solve: kept block " + std::to_string(l) + " is singular");
  }
  return lu_[l].solve(ConstVecMap(rhs.data(), block_dim(l)));
}

int ThresholdedOperator::kept_count(int lo, int hi) const {
  int count = 0;
  for (int l = std::max(lo, 0); l <= std::min(hi, lmax()); ++l) count += kept(l) ? 1 : 0;
  return count;
}

int ThresholdedOperator::first_kept(int lo, int hi) const {
  for (int l = std::max(lo, 0); l <= std::min(hi, lmax()); ++l) {
    if (kept(l)) return l;
  }
  return -1;
}

ThresholdedOperator t_op(const BlockSource& kd, double delta, double kappa, int max_level, bool use_certificate) {
  if (!(delta >= 0.0)) throw std::invalid_argument("t_op: delta must be >= 0");
  const int top = std::min((1 << (max_level + 1)), kd.lmax());
  ThresholdedOperator out;
  out.keep_.assign(top + 1, 0);
  out.inverse_norm_.assign(top + 1, std::numeric_limits<double>::infinity());
  out.lu_.resize(top + 1);
  for (int l = 0; l <= top; ++l) {
    const double threshold = operator_threshold(l, delta, kappa);
    if (delta > 0.0 && use_certificate && kd.column(l, 0).norm() < threshold) continue;
    Eigen::MatrixXd block = kd.block(l);
    const double inv = block_inverse_norm(block);
    const bool keep = (delta == 0.0) || (std::isfinite(inv) && inv * threshold <= 1.0);
    if (!keep) continue;
    out.keep_[l] = 1;
    out.inverse_norm_[l] = inv;
    out.lu_[l].compute(block);
  }
  return out;
}

DipEstimate estimate_dip(const BlockSource& k, int lmin, int lmax) {
  if (!(lmin >= 1 && lmax > lmin)) throw std::invalid_argument("estimate_dip: need lmax > lmin >= 1");
  if (lmax > k.lmax()) throw std::invalid_argument("estimate_dip: range exceeds operator bandwidth");
  std::vector<double> x, y;
  for (int l = lmin; l <= lmax; ++l) {
    const double inv = block_inverse_norm(k, l);
    if (std::isinf(inv)) throw std::runtime_error("estimate_dip: block " + std::to_string(l) + " is singular");
    x.push_back(std::log(static_cast<double>(l)));
    y.push_back(std::log(inv));
  }
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  DipEstimate est;
  est.nu = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  est.q1 = std::numeric_limits<double>::infinity();
  est.q2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ratio = std::exp(y[i] - est.nu * x[i]);
    est.q1 = std::min(est.q1, ratio);
    est.q2 = std::max(est.q2, ratio);
  }
  return est;
}

void write_operator(std::ostream& out, const BlockSource& k) {
  out << "bsd-block-operator 1\n";
  out << "lmax " << k.lmax() << "\n";
  char buf[64];
  for (int l = 0; l <= k.lmax(); ++l) {
    const Eigen::MatrixXd b = k.block(l);
    for (int r = 0; r < b.rows(); ++r) {
      for (int c = 0; c < b.cols(); ++c) {
        const auto res = std::to_chars(buf, buf + sizeof(buf), b(r, c));
        if (c) out << ' ';
        out.write(buf, res.ptr - buf);
      }
      out << '\n';
    }
  }
}

BlockOperator read_operator(std::istream& in) {
  std::string line;
  int lineno = 0;
  auto next_line = [&]() {
    if (!std::getline(in, line)) throw std::runtime_error("read_operator: unexpected end of input");
    ++lineno;
  };
  next_line();
  if (line != "bsd-block-operator 1") throw std::runtime_error("read_operator: bad magic line");
  next_line();
  int lmax = -1;
  if (std::sscanf(line.c_str(), "lmax %d", &lmax) != 1 || lmax < 0) {
    throw std::runtime_error("read_operator: bad lmax line");
  }
  std::vector<Eigen::MatrixXd> blocks;
  for (int l = 0; l <= lmax; ++l) {
    const int n = block_dim(l);
    Eigen::MatrixXd b(n, n);
    for (int r = 0; r < n; ++r) {
      next_line();
      const char* p = line.data();
      const char* end = line.data() + line.size();
      for (int c = 0; c < n; ++c) {
        while (p < end && *p == ' ') ++p;
        double v = 0.0;
        const auto res = std::from_chars(p, end, v);
        if (res.ec != std::errc()) {
          throw std::runtime_error("read_operator: bad value on line " + std::to_string(lineno));
        }
        b(r, c) = v;
        p = res.ptr;
      }
      while (p < end && *p == ' ') ++p;
      if (p != end) throw std::runtime_error("read_operator: extra values on line " + std::to_string(lineno));
    }
    blocks.push_back(std::move(b));
  }
  return BlockOperator(std::move(blocks));
}

}  // namespace bsd
