#include "bsd/cubature.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "bsd/harmonics.hpp"

namespace bsd {

CubatureSet::CubatureSet(int degree, std::vector<SphPoint> nodes, std::vector<double> weights,
                         std::optional<RingLayout> rings)
    : degree_(degree), nodes_(std::move(nodes)), weights_(std::move(weights)), rings_(std::move(rings)) {
  if (nodes_.size() != weights_.size()) throw std::invalid_argument("CubatureSet: node/weight count mismatch");
  if (nodes_.empty()) throw std::invalid_argument("CubatureSet: empty rule");
  if (degree_ < 0) throw std::invalid_argument("CubatureSet: negative degree");
  for (double w : weights_) {
    if (!(w > 0.0)) throw std::invalid_argument("CubatureSet: weights must be positive");
  }
  if (rings_ && rings_->cos_theta.size() * static_cast<std::size_t>(rings_->n_phi) != nodes_.size()) {
    throw std::invalid_argument("CubatureSet: ring layout does not match node count");
  }
}

namespace {

// (P_n(z), P_{n-1}(z)) by the three-term recurrence.
std::pair<double, double> legendre_pair(int n, double z) {
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, p0};
}

}  // namespace

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, pnm1] = legendre_pair(n, z);
      const double dz = pn / (n * (z * pn - pnm1) / (z * z - 1.0));
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const auto [pn, pnm1] = legendre_pair(n, z);
    const double dp = n * (z * pn - pnm1) / (z * z - 1.0);
    const double wi = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  return {x, w};
}

CubatureSet product_rule(int t) {
  if (t < 0) throw std::invalid_argument("product_rule: negative degree");
  const int n_theta = (t + 2) / 2;  // ceil((t+1)/2)
  const int n_phi = t + 1;
  auto [x, w] = gauss_legendre(n_theta);
  // Ring-major, north to south.
  std::reverse(x.begin(), x.end());
  std::reverse(w.begin(), w.end());
  std::vector<SphPoint> nodes;
  std::vector<double> weights;
  nodes.reserve(static_cast<std::size_t>(n_theta) * n_phi);
  weights.reserve(nodes.capacity());
  const double dphi = 2.0 * kPi / n_phi;
  for (int r = 0; r < n_theta; ++r) {
    const double theta = std::acos(x[r]);
    for (int k = 0; k < n_phi; ++k) {
      nodes.push_back(SphPoint::from_angles(theta, k * dphi));
      weights.push_back(w[r] * dphi);
    }
  }
  return CubatureSet(t, std::move(nodes), std::move(weights), RingLayout{x, n_phi, 0.0});
}

CubatureSet level_cubature(int j) {
  if (j < 0) throw std::invalid_argument("level_cubature: negative level");
  return product_rule(level_cubature_degree(j));
}

double exactness_defect(const CubatureSet& q, int t) {
  const HarmonicCoeffs moments = adjoint_on(q.weights(), q, t);
  double worst = 0.0;
  for (int l = 0; l <= t; ++l) {
    const auto block = moments.block(l);
    for (int i = 0; i < 2 * l + 1; ++i) {
      const double expected = (l == 0) ? std::sqrt(kFourPi) : 0.0;
      worst = std::max(worst, std::abs(block[i] - expected));
    }
  }
  return worst;
}

bool is_exact(const CubatureSet& q, int t) { return exactness_defect(q, t) <= kExactnessTolerance; }

double weight_spread(const CubatureSet& q) {
  const auto [lo, hi] = std::minmax_element(q.weights().begin(), q.weights().end());
  return *hi / *lo;
}

CubatureSet load_pointset(std::istream& in, int max_scan_degree) {
  std::vector<SphPoint> nodes;
  std::vector<double> weights;
  std::optional<int> declared;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      const auto key = line.find("degree:");
      if (key != std::string::npos) {
        std::istringstream hs(line.substr(key + 7));
        int t = -1;
        if (!(hs >> t) || t < 0) throw PointSetError("malformed degree header on line " + std::to_string(lineno), lineno);
        declared = t;
      }
      continue;
    }
    std::istringstream ls(line);
    double x, y, z, w;
    std::string rest;
    if (!(ls >> x >> y >> z >> w) || (ls >> rest)) {
      throw PointSetError("expected 'x y z w' on line " + std::to_string(lineno), lineno);
    }
    const double r = std::sqrt(x * x + y * y + z * z);
    if (std::abs(r - 1.0) > 1e-8) throw PointSetError("node is not a unit vector on line " + std::to_string(lineno), lineno);
    if (!(w > 0.0)) throw PointSetError("non-positive weight on line " + std::to_string(lineno), lineno);
    nodes.push_back(SphPoint::from_cartesian(x, y, z));
    weights.push_back(w);
  }
  if (nodes.empty()) throw PointSetError("point set contains no nodes", lineno);

  CubatureSet probe(0, nodes, weights);
  if (declared) {
    if (!is_exact(probe, *declared)) {
      throw PointSetError("point set is not exact to its declared degree " + std::to_string(*declared), 0);
    }
    return CubatureSet(*declared, std::move(nodes), std::move(weights));
  }
  if (!is_exact(probe, 0)) throw PointSetError("weights do not integrate constants (sum != 4pi)", 0);
  int t = 0;
  while (t < max_scan_degree && is_exact(probe, t + 1)) ++t;
  return CubatureSet(t, std::move(nodes), std::move(weights));
}

}  // namespace bsd
