#pragma once

#include <numbers>

namespace bsd {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kFourPi = 4.0 * std::numbers::pi;

/// A point on the unit sphere, stored both as (colatitude, longitude) and as a
/// unit vector. Use the factories; they keep the two representations in sync.
struct SphPoint {
  double theta = 0.0;  // colatitude in [0, pi]
  double phi = 0.0;    // longitude in [0, 2pi)
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;

  static SphPoint from_angles(double theta, double phi);
  /// Normalizes (x, y, z); throws std::domain_error for the zero vector.
  static SphPoint from_cartesian(double x, double y, double z);

  double dot(const SphPoint& other) const { return x * other.x + y * other.y + z * other.z; }
};

/// Great-circle distance in radians.
double geodesic_distance(const SphPoint& a, const SphPoint& b);

}  // namespace bsd
