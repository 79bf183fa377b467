#pragma once

#include <cmath>

namespace qz {

inline constexpr double kDefaultSoundSpeed = 343.0; // m/s, dry air ~20 C
inline constexpr double kDefaultGainRatio = 3.0;    // far-field secondary/primary power

/// Cartesian position in meters. The secondary source sits at the origin;
/// planar field maps use z = 0.
struct Point {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Straight-line distance |p1 - p0| between two points.
inline double separation(const Point& p1, const Point& p0) {
  const double dx = p1.x - p0.x;
  const double dy = p1.y - p0.y;
  const double dz = p1.z - p0.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Signed difference |p1| - |p0| of the distances to the source at the
/// origin. Negative when p1 lies closer to the source than p0.
inline double radial_difference(const Point& p1, const Point& p0) {
  return p1.norm() - p0.norm();
}

enum class ControlMode { NearField, FarField };

/// Control arrangement: secondary source at the origin, cancellation point
/// at `cancellation_point`. `gain_ratio` is the secondary-to-primary power
/// ratio and only applies in far-field mode.
struct Scenario {
  Point cancellation_point;
  double c_mps = kDefaultSoundSpeed;
  ControlMode mode = ControlMode::NearField;
  double gain_ratio = kDefaultGainRatio;
};

/// Throws std::invalid_argument when the scenario violates its invariants
/// (cancellation point at the source, non-positive c, negative gain ratio).
void validate(const Scenario& scenario);

} // namespace qz
