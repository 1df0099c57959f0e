#pragma once

/**
 * @file angles.hpp
 * @brief Angle conventions shared across the library.
 *
 * Two kinds of angles appear throughout:
 *   - particle angles (angles of vectors), defined modulo 2π, stored in [-π, π)
 *   - line angles (orientations without polarity), defined modulo π,
 *     stored in [-π/2, π/2)
 */

#include <cmath>
#include <numbers>

namespace nemasoh {

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Normalize an angle of vectors into [-π, π).
inline double normalize_particle_angle(double theta) {
  double t = std::remainder(theta, 2.0 * pi);  // (-π, π]
  return t == pi ? -pi : t;
}

/// Normalize an angle of lines into [-π/2, π/2).
inline double normalize_line_angle(double theta) {
  double t = std::remainder(theta, pi);  // (-π/2, π/2]
  return t == half_pi ? -half_pi : t;
}

/// Difference of two line angles folded onto the nearest representative,
/// in (-π/2, π/2].
inline double fold_line_difference(double dtheta) {
  double t = std::remainder(dtheta, pi);  // [-π/2, π/2]
  return t == -half_pi ? half_pi : t;
}

}  // namespace nemasoh
