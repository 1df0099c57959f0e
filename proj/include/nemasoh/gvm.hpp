#pragma once

/**
 * @file gvm.hpp
 * @brief Generalized von Mises distribution: density ∝ exp(-κ/|cos(θ-θ0)|).
 *
 * The distribution of line orientations with concentration κ > 0 and mean
 * line angle θ0. It is bimodal with peaks at θ0 and θ0+π and vanishes (to
 * all orders) at θ0 ± π/2, so each half-circle carries unit mass after
 * normalization by Z_κ.
 *
 * All internal integrals use the scaled weight
 *     w̃(θ) = exp(-κ (1/cos θ - 1)) = e^κ exp(-κ/cos θ) ∈ [0, 1],
 * which keeps integrands O(1) for κ up to the hundreds; the e^{-κ} factor
 * is reattached only where Z_κ itself is reported. Where the scaled
 * exponent exceeds 700 the weight evaluates to exactly 0 — the analytic
 * limit — so moment integrands with inverse powers of cos stay finite.
 */

#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>

#include "nemasoh/angles.hpp"
#include "nemasoh/quadrature.hpp"
#include "nemasoh/rng.hpp"

namespace nemasoh {

struct GvmParams {
  double kappa;   ///< concentration, > 0
  double theta0;  ///< mean line angle, normalized to [-π/2, π/2)

  GvmParams(double kappa_, double theta0_)
      : kappa(kappa_), theta0(normalize_line_angle(theta0_)) {
    if (!(kappa > 0.0) || !std::isfinite(kappa))
      throw std::invalid_argument("GvmParams: kappa must be positive");
  }
};

struct EquilibriumParams {
  double rho_plus;
  double rho_minus;
  double theta_bar;  ///< mean line angle, normalized to [-π/2, π/2)

  EquilibriumParams(double rp, double rm, double tb)
      : rho_plus(rp), rho_minus(rm), theta_bar(normalize_line_angle(tb)) {
    if (rho_plus < 0.0 || rho_minus < 0.0)
      throw std::invalid_argument("EquilibriumParams: densities must be >= 0");
  }
};

/// Scaled weight exp(-κ(1/c - 1)) for c = cos θ, exactly 0 for c <= 0 or
/// once the exponent passes 700.
inline double gvm_weight_scaled(double kappa, double cos_theta) {
  if (cos_theta <= 0.0) return 0.0;
  const double ex = kappa * (1.0 / cos_theta - 1.0);
  return ex > 700.0 ? 0.0 : std::exp(-ex);
}

/// Scaled partition function Z̃_κ = e^κ Z_κ = ∫_{cos θ > 0} w̃ dθ.
/// Memoized per κ.
inline double partition_function_scaled(double kappa) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("partition_function: kappa must be positive");
  static std::map<double, double> cache;
  static std::mutex mtx;
  {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(kappa);
    if (it != cache.end()) return it->second;
  }
  auto f = [kappa](double t) { return gvm_weight_scaled(kappa, std::cos(t)); };
  const double z =
      2.0 * integrate_adaptive(f, Interval(0.0, half_pi), 1e-12, 1e-15).value;
  std::lock_guard<std::mutex> lock(mtx);
  cache.emplace(kappa, z);
  return z;
}

/// Z_κ = ∫_{cos θ > 0} exp(-κ/cos θ) dθ.
inline double partition_function(double kappa) {
  return std::exp(-kappa) * partition_function_scaled(kappa);
}

/// M_{θ0}(θ) = (1/Z_κ) exp(-κ/|cos(θ-θ0)|); exactly 0 where cos(θ-θ0) = 0.
inline double density(const GvmParams& params, double theta) {
  const double c = std::abs(std::cos(theta - params.theta0));
  return gvm_weight_scaled(params.kappa, c) /
         partition_function_scaled(params.kappa);
}

/// ⟨φ⟩_M = (2/Z_κ) ∫_0^{π/2} φ(θ) e^{-κ/cos θ} dθ  (eqn:average convention).
inline double moment(double kappa, const std::function<double(double)>& phi) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("moment: kappa must be positive");
  auto f = [&](double t) {
    const double w = gvm_weight_scaled(kappa, std::cos(t));
    return w == 0.0 ? 0.0 : phi(t) * w;
  };
  const double raw = integrate_adaptive(f, Interval(0.0, half_pi)).value;
  return 2.0 * raw / partition_function_scaled(kappa);
}

/// Equilibrium mixture ρ± M_{θ̄}(θ) on the respective half-circles
/// (eq:def_fr+r-_2); integrates to ρ+ + ρ- over the full circle.
inline double equilibrium_density(const EquilibriumParams& eq, double kappa,
                                  double theta) {
  const double c = std::cos(theta - eq.theta_bar);
  const double m = gvm_weight_scaled(kappa, std::abs(c)) /
                   partition_function_scaled(kappa);
  return (c >= 0.0 ? eq.rho_plus : eq.rho_minus) * m;
}

enum class HalfCircle { plus, minus };

/**
 * n i.i.d. draws from M_{θ0} restricted to the given half-circle
 * (±cos(θ-θ0) > 0), by rejection against the uniform envelope on the
 * half-circle. Acceptance probability is Z̃_κ/π (~ √(2π/κ)/π for large κ).
 */
inline std::vector<double> sample(const GvmParams& params, HalfCircle side,
                                  std::size_t n, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  std::vector<double> out;
  out.reserve(n);
  const double offset = side == HalfCircle::plus ? 0.0 : pi;
  while (out.size() < n) {
    const double x = rng.uniform(-half_pi, half_pi);
    const double u = rng.uniform();
    if (u < gvm_weight_scaled(params.kappa, std::cos(x)))
      out.push_back(normalize_particle_angle(params.theta0 + offset + x));
  }
  return out;
}

}  // namespace nemasoh
