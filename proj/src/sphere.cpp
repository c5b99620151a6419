#include "bsd/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bsd {

SphPoint SphPoint::from_angles(double theta, double phi) {
  SphPoint p;
  p.theta = theta;
  p.phi = std::fmod(phi, 2.0 * kPi);
  if (p.phi < 0.0) p.phi += 2.0 * kPi;
  const double s = std::sin(theta);
  p.x = s * std::cos(p.phi);
  p.y = s * std::sin(p.phi);
  p.z = std::cos(theta);
  return p;
}

SphPoint SphPoint::from_cartesian(double x, double y, double z) {
  const double r = std::sqrt(x * x + y * y + z * z);
  if (!(r > 0.0)) throw std::domain_error("SphPoint::from_cartesian: zero vector");
  SphPoint p;
  p.x = x / r;
  p.y = y / r;
  p.z = z / r;
  // atan2 keeps full precision near the poles where acos(z) loses digits.
  p.theta = std::atan2(std::hypot(p.x, p.y), p.z);
  p.phi = std::atan2(p.y, p.x);
  if (p.phi < 0.0) p.phi += 2.0 * kPi;
  return p;
}

double geodesic_distance(const SphPoint& a, const SphPoint& b) {
  // atan2 form is accurate for both tiny and near-antipodal separations.
  const double cx = a.y * b.z - a.z * b.y;
  const double cy = a.z * b.x - a.x * b.z;
  const double cz = a.x * b.y - a.y * b.x;
  return std::atan2(std::sqrt(cx * cx + cy * cy + cz * cz), std::clamp(a.dot(b), -1.0, 1.0));
}

}  // namespace bsd
