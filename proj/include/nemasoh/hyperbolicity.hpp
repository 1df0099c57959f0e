#pragma once

/**
 * @file hyperbolicity.hpp
 * @brief Flux matrices of the (ρ, δ, θ̄) system and the discriminant
 *        certificate Δ(X) = α(c) X² + β(c) X + γ(c).
 *
 * The system is rescaled by t → d1 t, so the matrices carry the reduced
 * coefficients d̂2 = d2/d1 and μ̂ = μ/d1, and the physical wave speeds are
 * d1 times the eigenvalues computed here. Δ is the discriminant of the
 * characteristic cubic of A expressed in c = cos²θ̄ and X = (δ/ρ)²;
 * Δ > 0 means three distinct real eigenvalues.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

#include "nemasoh/angles.hpp"
#include "nemasoh/cubic.hpp"

namespace nemasoh {

struct MacroPoint {
  double rho;        ///< total density ρ+ + ρ-, > 0
  double delta;      ///< signed difference ρ+ - ρ-, |δ| <= ρ
  double theta_bar;  ///< mean line angle

  MacroPoint(double rho_, double delta_, double theta_bar_)
      : rho(rho_), delta(delta_), theta_bar(normalize_line_angle(theta_bar_)) {
    if (!(rho > 0.0))
      throw std::invalid_argument("MacroPoint: rho must be > 0");
    if (std::abs(delta) > rho * (1.0 + 1e-12))
      throw std::invalid_argument("MacroPoint: |delta| must be <= rho");
  }
};

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Flux matrix A of the d1-rescaled system in the x1 direction.
inline Matrix3 flux_matrix_A(const MacroPoint& pt, double d2_hat,
                             double mu_hat) {
  const double ct = std::cos(pt.theta_bar);
  const double st = std::sin(pt.theta_bar);
  return Matrix3{{{0.0, ct, -pt.delta * st},
                  {ct, 0.0, -pt.rho * st},
                  {0.0, -mu_hat / pt.rho * st, d2_hat * pt.delta / pt.rho * ct}}};
}

/// Flux matrix in the x2 direction: B(ρ, δ, θ̄) = A(ρ, δ, θ̄ - π/2).
inline Matrix3 flux_matrix_B(const MacroPoint& pt, double d2_hat,
                             double mu_hat) {
  return flux_matrix_A(MacroPoint(pt.rho, pt.delta, pt.theta_bar - half_pi),
                       d2_hat, mu_hat);
}

/// Coefficients {a3, a2, a1, a0} of det(zI - A) for A at (c1 = cos θ̄,
/// q = δ/ρ). a3 = 1.
inline std::array<double, 4> characteristic_coefficients(double cos_theta,
                                                         double q,
                                                         double d2_hat,
                                                         double mu_hat) {
  const double c = cos_theta * cos_theta;
  const double s2 = 1.0 - c;
  return {1.0, -d2_hat * q * cos_theta, -(mu_hat * s2 + c),
          -q * cos_theta * (mu_hat * s2 - d2_hat * c)};
}

/**
 * Δ(X) via the α/β/γ decomposition, c = cos²θ̄ ∈ [0,1], X = (δ/ρ)² ∈ [0,1].
 */
inline double characteristic_discriminant(double c, double X, double d2_hat,
                                          double mu_hat) {
  if (c < 0.0 || c > 1.0 || X < 0.0 || X > 1.0)
    throw std::invalid_argument(
        "characteristic_discriminant: c and X must lie in [0, 1]");
  const double d2 = d2_hat, mu = mu_hat;
  const double alpha = 4.0 * d2 * d2 * d2 * c * c * (c * (d2 + mu) - mu);
  const double beta =
      c * ((d2 * d2 * mu * mu - 18.0 * d2 * mu * mu - 27.0 * mu * mu -
            36.0 * d2 * mu - 8.0 * d2 * d2 - 20.0 * d2 * d2 * mu) *
               c * c +
           2.0 * mu *
               (-d2 * d2 * mu + 18.0 * d2 + 10.0 * d2 * d2 + 27.0 * mu +
                18.0 * mu * d2) *
               c -
           mu * mu * (18.0 * d2 - d2 * d2 + 27.0));
  const double gamma = 4.0 * std::pow(c * (1.0 - mu) + mu, 3);
  return (alpha * X + beta) * X + gamma;
}

struct EigenSample {
  double c;
  double X;
  double discriminant;
  std::array<double, 3> real_parts;
  double max_imag;
};

struct HyperbolicityReport {
  double kappa = 0.0;
  double d2_hat = 0.0;
  double mu_hat = 0.0;
  std::size_t n_c = 0;
  std::size_t n_X = 0;
  double min_discriminant = 0.0;
  double argmin_c = 0.0;
  double argmin_X = 0.0;
  std::vector<EigenSample> eigen_samples;
  /// per-row minima over X, row index = c index (for NDJSON emission)
  std::vector<double> row_min;
};

/**
 * Evaluate Δ over an (n_c × n_X) grid on [0,1]² including the boundaries,
 * record the minimum, and sample eigenvalues of A at representative points
 * reconstructing (c, X) with ρ = 1, δ = √X, θ̄ = acos(√c).
 */
inline HyperbolicityReport hyperbolicity_scan(double kappa, double d2_hat,
                                              double mu_hat, std::size_t n_c,
                                              std::size_t n_X) {
  if (n_c < 2 || n_X < 2)
    throw std::invalid_argument("hyperbolicity_scan: need grids >= 2");
  HyperbolicityReport rep;
  rep.kappa = kappa;
  rep.d2_hat = d2_hat;
  rep.mu_hat = mu_hat;
  rep.n_c = n_c;
  rep.n_X = n_X;
  rep.min_discriminant = std::numeric_limits<double>::infinity();
  rep.row_min.assign(n_c, std::numeric_limits<double>::infinity());

  for (std::size_t i = 0; i < n_c; ++i) {
    const double c = static_cast<double>(i) / static_cast<double>(n_c - 1);
    for (std::size_t j = 0; j < n_X; ++j) {
      const double X = static_cast<double>(j) / static_cast<double>(n_X - 1);
      const double D = characteristic_discriminant(c, X, d2_hat, mu_hat);
      rep.row_min[i] = std::min(rep.row_min[i], D);
      if (D < rep.min_discriminant) {
        rep.min_discriminant = D;
        rep.argmin_c = c;
        rep.argmin_X = X;
      }
    }
  }

  // eigenvalue samples on a coarse sub-grid (at most 11 points per axis)
  const std::size_t stride_c = std::max<std::size_t>(1, (n_c - 1) / 10);
  const std::size_t stride_X = std::max<std::size_t>(1, (n_X - 1) / 10);
  for (std::size_t i = 0; i < n_c; i += stride_c) {
    const double c = static_cast<double>(i) / static_cast<double>(n_c - 1);
    for (std::size_t j = 0; j < n_X; j += stride_X) {
      const double X = static_cast<double>(j) / static_cast<double>(n_X - 1);
      const double cos_theta = std::sqrt(c);
      const double q = std::sqrt(X);
      auto cf = characteristic_coefficients(cos_theta, q, d2_hat, mu_hat);
      auto roots = solve_cubic_complex(cf[0], cf[1], cf[2], cf[3]);
      EigenSample es;
      es.c = c;
      es.X = X;
      es.discriminant = characteristic_discriminant(c, X, d2_hat, mu_hat);
      es.real_parts = {roots[0][0], roots[1][0], roots[2][0]};
      es.max_imag = std::max({roots[0][1], roots[1][1], roots[2][1]});
      rep.eigen_samples.push_back(es);
    }
  }
  return rep;
}

}  // namespace nemasoh
