#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bsd/sphere.hpp"

namespace bsd {

/// Latitude-ring structure of a product rule; lets transforms run ring by ring
/// with an FFT along each ring. Nodes are stored ring-major.
struct RingLayout {
  std::vector<double> cos_theta;
  int n_phi = 0;
  double phi0 = 0.0;
};

/// Nodes and positive weights integrating spherical polynomials exactly up to
/// `degree`. Weights sum to 4pi.
class CubatureSet {
 public:
  CubatureSet(int degree, std::vector<SphPoint> nodes, std::vector<double> weights,
              std::optional<RingLayout> rings = std::nullopt);

  int degree() const { return degree_; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<SphPoint>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::optional<RingLayout>& rings() const { return rings_; }

 private:
  int degree_;
  std::vector<SphPoint> nodes_;
  std::vector<double> weights_;
  std::optional<RingLayout> rings_;
};

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

/// Gauss-Legendre in cos(theta) times t+1 equispaced longitudes; exact to degree t.
CubatureSet product_rule(int t);

/// Needlet centres for level j: a rule exact to degree 2^{j+2} - 2.
CubatureSet level_cubature(int j);
constexpr int level_cubature_degree(int j) { return (1 << (j + 2)) - 2; }
/// Node-count constant c with c^{-1} 4^j <= card <= c 4^j for level_cubature.
inline constexpr double kLevelCardinalityConstant = 8.0;

/// Largest deviation |sum_k w_k Y_l^m(x_k) - sqrt(4pi) delta_{l0} delta_{m0}| over l <= t.
double exactness_defect(const CubatureSet& q, int t);
inline constexpr double kExactnessTolerance = 1e-9;
bool is_exact(const CubatureSet& q, int t);

/// Ratio max(w) / min(w); the uniform-weight bound only holds for designs.
double weight_spread(const CubatureSet& q);

struct PointSetError : std::runtime_error {
  PointSetError(const std::string& what, int line) : std::runtime_error(what), line(line) {}
  int line;
};

/// Reads "x y z w" lines ('#' comments, optional "# degree: t" header). The
/// degree is verified when declared, otherwise found by scanning upward until
/// exactness fails (capped at `max_scan_degree`).
CubatureSet load_pointset(std::istream& in, int max_scan_degree = 64);

}  // namespace bsd
