#pragma once

/**
 * @file cubic.hpp
 * @brief Real roots of cubic polynomials and the cubic discriminant.
 *
 * The solver splits on the sign of the discriminant: three real roots go
 * through the trigonometric formula, the single-real-root case through
 * Cardano. Roots are Newton-polished and clustered into multiplicities.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "nemasoh/angles.hpp"

namespace nemasoh {

struct CubicRoot {
  double value;
  int multiplicity;
};

/// Discriminant of a3 z^3 + a2 z^2 + a1 z + a0; positive iff three distinct
/// real roots, zero iff a repeated root.
inline double cubic_discriminant(double a3, double a2, double a1, double a0) {
  return -27.0 * a3 * a3 * a0 * a0 + 18.0 * a3 * a0 * a1 * a2 +
         a2 * a2 * a1 * a1 - 4.0 * a2 * a2 * a2 * a0 - 4.0 * a1 * a1 * a1 * a3;
}

namespace detail {

inline double eval_cubic(double a3, double a2, double a1, double a0, double z) {
  return ((a3 * z + a2) * z + a1) * z + a0;
}

inline double polish_root(double a3, double a2, double a1, double a0, double z) {
  for (int it = 0; it < 3; ++it) {
    const double p = eval_cubic(a3, a2, a1, a0, z);
    const double dp = (3.0 * a3 * z + 2.0 * a2) * z + a1;
    if (dp == 0.0) break;
    const double z2 = z - p / dp;
    if (!std::isfinite(z2) ||
        std::abs(eval_cubic(a3, a2, a1, a0, z2)) >= std::abs(p))
      break;  // near repeated roots Newton stops helping
    z = z2;
  }
  return z;
}

}  // namespace detail

/**
 * Real roots of a3 z^3 + a2 z^2 + a1 z + a0 in nondecreasing order with
 * multiplicities (multiplicities sum to 3 when all roots are real, to 1
 * when a complex pair exists). Rejects a3 = 0.
 */
inline std::vector<CubicRoot> solve_cubic_real(double a3, double a2, double a1,
                                               double a0) {
  if (a3 == 0.0)
    throw std::invalid_argument("solve_cubic_real: leading coefficient is zero");
  // monic z^3 + p z^2 + q z + r
  const double p = a2 / a3, q = a1 / a3, r = a0 / a3;
  const double Q = (p * p - 3.0 * q) / 9.0;
  const double R = (p * (2.0 * p * p - 9.0 * q) + 27.0 * r) / 54.0;
  const double R2 = R * R, Q3 = Q * Q * Q;

  std::vector<double> roots;
  if (R2 < Q3) {
    // three distinct real roots (trigonometric branch)
    const double t = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(Q);
    roots = {m * std::cos(t / 3.0) - p / 3.0,
             m * std::cos((t + 2.0 * pi) / 3.0) - p / 3.0,
             m * std::cos((t - 2.0 * pi) / 3.0) - p / 3.0};
  } else {
    // Cardano: one real root, plus a real pair when R2 == Q3
    const double A =
        -std::copysign(std::cbrt(std::abs(R) + std::sqrt(std::max(R2 - Q3, 0.0))), R);
    const double B = (A == 0.0) ? 0.0 : Q / A;
    roots = {A + B - p / 3.0};
    if (R2 == Q3 || std::abs(R2 - Q3) <=
                        1e-24 * std::max({std::abs(R2), std::abs(Q3), 1e-300})) {
      roots.push_back(-0.5 * (A + B) - p / 3.0);
      roots.push_back(roots.back());
    }
  }

  for (double& z : roots) z = detail::polish_root(a3, a2, a1, a0, z);
  std::sort(roots.begin(), roots.end());

  // cluster near-equal roots into multiplicities
  const double scale =
      std::max({std::abs(roots.front()), std::abs(roots.back()), 1.0});
  const double tol = 1e-12 * scale + 1e-300;
  std::vector<CubicRoot> out;
  for (double z : roots) {
    if (!out.empty() && std::abs(z - out.back().value) <= tol * 8.0)
      out.back().multiplicity += 1;
    else
      out.push_back({z, 1});
  }
  // represent a cluster by its mean (stabilizes the triple-root case)
  std::size_t i = 0;
  for (auto& cr : out) {
    double s = 0.0;
    for (int k = 0; k < cr.multiplicity; ++k) s += roots[i++];
    cr.value = s / cr.multiplicity;
  }
  return out;
}

/// All three roots as (real part, imaginary magnitude) triples, sorted by
/// real part; used where complex eigenvalue pairs must be reported.
inline std::array<std::array<double, 2>, 3> solve_cubic_complex(double a3,
                                                                double a2,
                                                                double a1,
                                                                double a0) {
  if (a3 == 0.0)
    throw std::invalid_argument("solve_cubic_complex: leading coefficient is zero");
  auto real_roots = solve_cubic_real(a3, a2, a1, a0);
  int count = 0;
  for (const auto& r : real_roots) count += r.multiplicity;
  std::array<std::array<double, 2>, 3> out{};
  if (count == 3) {
    int i = 0;
    for (const auto& r : real_roots)
      for (int k = 0; k < r.multiplicity; ++k) out[i++] = {r.value, 0.0};
    return out;
  }
  // one real root z0: deflate to z^2 + b z + c
  const double p = a2 / a3, q = a1 / a3;
  const double z0 = real_roots.front().value;
  const double b = p + z0;
  const double c = q + z0 * b;
  const double disc = b * b - 4.0 * c;
  const double re = -0.5 * b;
  const double im = 0.5 * std::sqrt(std::max(-disc, 0.0));
  out[0] = {z0, 0.0};
  out[1] = {re, im};
  out[2] = {re, im};
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return x[0] < y[0]; });
  return out;
}

}  // namespace nemasoh
