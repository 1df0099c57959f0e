#pragma once

/**
 * @file macro1d.hpp
 * @brief Finite-volume solver for the nematic SOH system restricted to one
 *        space dimension (fields vary along x1 only), with optional
 *        reversal reaction terms and the weakly non-local diffusion
 *        correction on the angle equation.
 *
 * System (periodic in x):
 *   ∂t ρ+ + ∂x( d1 ρ+ cos θ̄) = λ(ρ+)ρ- - λ(ρ-)ρ+
 *   ∂t ρ- - ∂x( d1 ρ- cos θ̄) = λ(ρ-)ρ+ - λ(ρ+)ρ-
 *   ρ ∂t θ̄ + d2 δ cos θ̄ ∂x θ̄ - μ sin θ̄ ∂x δ = 2k𝒟 ∂x(ρ ∂x θ̄)
 * with ρ = ρ+ + ρ-, δ = ρ+ - ρ-, λ(ρ) = λ1 ρ² + λ0.
 *
 * Scheme: first-order splitting hyperbolic → diffusion → reaction.
 *  - ρ± fluxes: local Lax-Friedrichs (Rusanov), telescoping so total mass
 *    is conserved to machine precision.
 *  - θ̄ transport: upwind by the sign of the advection coefficient;
 *    pressure term central-differenced; all θ̄ differences folded to the
 *    nearest line representative (θ̄ is defined modulo π).
 *  - diffusion: explicit conservative flux form.
 *  - reaction: Heun (2-stage) on δ per cell; ρ is reconstructed from the
 *    conserved per-cell sum, exactly.
 */

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nemasoh/angles.hpp"
#include "nemasoh/coefficients.hpp"
#include "nemasoh/cubic.hpp"
#include "nemasoh/hyperbolicity.hpp"

namespace nemasoh {

struct MacroState {
  std::size_t n_cells = 0;
  double dx = 0.0;
  std::vector<double> rho_plus;
  std::vector<double> rho_minus;
  std::vector<double> theta_bar;  ///< line angles in [-π/2, π/2)
  double time = 0.0;

  double mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_cells; ++i) s += rho_plus[i] + rho_minus[i];
    return s * dx;
  }
};

struct SolverParams {
  CoefficientSet coefficients;
  double k_nonlocal = 0.0;  ///< k = r²/8; 0 disables the diffusion step
  double lambda0 = 0.0;     ///< both λ = 0 disables the reaction step
  double lambda1 = 0.0;
  double cfl = 0.45;        ///< in (0, 1)
  double t_end = 0.0;

  bool diffusion_enabled() const {
    return k_nonlocal > 0.0 && coefficients.diffusion_D > 0.0;
  }
  bool reversals_enabled() const { return lambda0 > 0.0 || lambda1 > 0.0; }

  void validate() const {
    if (!(cfl > 0.0 && cfl < 1.0))
      throw std::invalid_argument("SolverParams: cfl must be in (0, 1)");
    if (k_nonlocal < 0.0 || lambda0 < 0.0 || lambda1 < 0.0)
      throw std::invalid_argument("SolverParams: rates must be >= 0");
  }
};

/// Reaction source S+ = λ(ρ+)ρ- - λ(ρ-)ρ+ with λ(ρ) = λ1 ρ² + λ0;
/// S- = -S+. Algebraically S+ = (ρ+ - ρ-)(λ1 ρ+ ρ- - λ0).
inline std::pair<double, double> reversal_source(double rho_plus,
                                                 double rho_minus,
                                                 double lambda0,
                                                 double lambda1) {
  if (rho_plus < 0.0 || rho_minus < 0.0)
    throw std::invalid_argument("reversal_source: densities must be >= 0");
  const double lp = lambda1 * rho_plus * rho_plus + lambda0;
  const double lm = lambda1 * rho_minus * rho_minus + lambda0;
  const double s_plus = lp * rho_minus - lm * rho_plus;
  return {s_plus, -s_plus};
}

struct ReversalFixedPoints {
  double threshold = 0.0;        ///< 2√(λ0/λ1); 0 when λ1 = 0
  bool delta_zero_stable = true;
  std::vector<double> stable_deltas;  ///< nonzero stable pair when present
};

/**
 * Classify the fixed points of dδ/dt = 2 S+ at fixed total density s:
 * below the threshold s = 2√(λ0/λ1) only δ = 0 (stable); above it δ = 0
 * turns unstable and the stable pair δ* = ±√(s² - 4λ0/λ1) appears.
 */
inline ReversalFixedPoints local_reversal_fixed_points(double s, double lambda0,
                                                       double lambda1) {
  if (!(s > 0.0))
    throw std::invalid_argument("local_reversal_fixed_points: s must be > 0");
  if (lambda0 < 0.0 || lambda1 < 0.0)
    throw std::invalid_argument("local_reversal_fixed_points: rates >= 0");
  ReversalFixedPoints out;
  if (lambda1 == 0.0) {
    out.threshold = 0.0;
    out.delta_zero_stable = true;   // dδ/dt = -2 λ0 δ
    return out;
  }
  out.threshold = 2.0 * std::sqrt(lambda0 / lambda1);
  if (s > out.threshold) {
    out.delta_zero_stable = false;
    const double dstar = std::sqrt(s * s - 4.0 * lambda0 / lambda1);
    out.stable_deltas = {-dstar, dstar};
  }
  return out;
}

namespace detail {

inline constexpr double vacuum_floor = 1e-12;

/// Cell-wise max wave speed |d1 λ(A)| for the CFL bound.
inline double max_wave_speed(const MacroState& st, const CoefficientSet& cs) {
  double vmax = 0.0;
  for (std::size_t i = 0; i < st.n_cells; ++i) {
    const double rho = st.rho_plus[i] + st.rho_minus[i];
    if (rho <= vacuum_floor) continue;
    const double q = (st.rho_plus[i] - st.rho_minus[i]) / rho;
    auto cf = characteristic_coefficients(std::cos(st.theta_bar[i]), q,
                                          cs.d2_hat(), cs.mu_hat());
    auto roots = solve_cubic_complex(cf[0], cf[1], cf[2], cf[3]);
    for (const auto& r : roots)
      vmax = std::max(vmax, std::hypot(r[0], r[1]) * cs.d1);
  }
  return vmax;
}

/// Fold a cell angle into [-π/2, π/2); a fold by an odd multiple of π swaps
/// the ρ± identities (the state (ρ+, ρ-, θ̄) ≡ (ρ-, ρ+, θ̄ ± π)).
inline void renormalize_cell(double& theta, double& rp, double& rm) {
  if (theta >= -half_pi && theta < half_pi) return;
  const double folded = normalize_line_angle(theta);
  const double k = std::round((theta - folded) / pi);
  if (std::llround(k) % 2 != 0) std::swap(rp, rm);
  theta = folded;
}

}  // namespace detail

/**
 * Conservative Rusanov update of ρ± plus the non-conservative θ̄ transport.
 * The caller guarantees dt satisfies the CFL bound.
 */
inline MacroState hyperbolic_step(const MacroState& st, const SolverParams& p,
                                  double dt) {
  const auto& cs = p.coefficients;
  const std::size_t n = st.n_cells;
  const double dx = st.dx;
  MacroState out = st;
  out.time = st.time + dt;

  std::vector<double> ct(n), speed(n), fp(n), fm(n);
  for (std::size_t i = 0; i < n; ++i) {
    ct[i] = std::cos(st.theta_bar[i]);
    speed[i] = cs.d1 * ct[i];
    fp[i] = speed[i] * st.rho_plus[i];
    fm[i] = -speed[i] * st.rho_minus[i];
  }
  // faces i+1/2 between cells i and i+1 (periodic)
  std::vector<double> Fp(n), Fm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double a = std::max(std::abs(speed[i]), std::abs(speed[j]));
    Fp[i] = 0.5 * (fp[i] + fp[j]) - 0.5 * a * (st.rho_plus[j] - st.rho_plus[i]);
    Fm[i] = 0.5 * (fm[i] + fm[j]) - 0.5 * a * (st.rho_minus[j] - st.rho_minus[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i + n - 1) % n;
    out.rho_plus[i] = st.rho_plus[i] - dt / dx * (Fp[i] - Fp[im]);
    out.rho_minus[i] = st.rho_minus[i] - dt / dx * (Fm[i] - Fm[im]);
  }
  // θ̄: ∂t θ̄ = -(d2 δ/ρ) cos θ̄ ∂x θ̄ + (μ/ρ) sin θ̄ ∂x δ
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = st.rho_plus[i] + st.rho_minus[i];
    if (rho <= detail::vacuum_floor) continue;  // vacuum: angle frozen
    const std::size_t ip = (i + 1) % n;
    const std::size_t im = (i + n - 1) % n;
    const double delta = st.rho_plus[i] - st.rho_minus[i];
    const double a = cs.d2 * delta / rho * ct[i];
    const double grad_th =
        a > 0.0 ? fold_line_difference(st.theta_bar[i] - st.theta_bar[im]) / dx
                : fold_line_difference(st.theta_bar[ip] - st.theta_bar[i]) / dx;
    const double grad_delta = ((st.rho_plus[ip] - st.rho_minus[ip]) -
                               (st.rho_plus[im] - st.rho_minus[im])) /
                              (2.0 * dx);
    const double dtheta =
        dt * (-a * grad_th +
              cs.mu / rho * std::sin(st.theta_bar[i]) * grad_delta);
    double theta = st.theta_bar[i] + dtheta;
    detail::renormalize_cell(theta, out.rho_plus[i], out.rho_minus[i]);
    out.theta_bar[i] = theta;
  }
  return out;
}

/**
 * Explicit diffusion of θ̄: θ̄ += dt (2k𝒟/ρ) ∂x(ρ ∂x θ̄), conservative flux
 * form on faces, θ̄ differences modulo π. Densities are untouched.
 */
inline MacroState diffusion_step(const MacroState& st, const SolverParams& p,
                                 double dt) {
  const double two_kD = 2.0 * p.k_nonlocal * p.coefficients.diffusion_D;
  const std::size_t n = st.n_cells;
  const double dx = st.dx;
  MacroState out = st;
  out.time = st.time + dt;
  if (two_kD == 0.0) return out;

  std::vector<double> flux(n);  // at face i+1/2
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double rho_face = 0.5 * (st.rho_plus[i] + st.rho_minus[i] +
                                   st.rho_plus[j] + st.rho_minus[j]);
    flux[i] = rho_face *
              fold_line_difference(st.theta_bar[j] - st.theta_bar[i]) / dx;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = st.rho_plus[i] + st.rho_minus[i];
    if (rho <= detail::vacuum_floor) continue;
    const std::size_t im = (i + n - 1) % n;
    double theta =
        st.theta_bar[i] + dt * two_kD / rho * (flux[i] - flux[im]) / dx;
    detail::renormalize_cell(theta, out.rho_plus[i], out.rho_minus[i]);
    out.theta_bar[i] = theta;
  }
  return out;
}

/**
 * Per-cell reaction integration with Heun's 2-stage scheme on δ; the cell
 * total s = ρ+ + ρ- is algebraically invariant (ρ± reconstructed from
 * (s ± δ)/2).
 */
inline MacroState reaction_step(const MacroState& st, const SolverParams& p,
                                double dt) {
  MacroState out = st;
  out.time = st.time + dt;
  if (!p.reversals_enabled()) return out;
  for (std::size_t i = 0; i < st.n_cells; ++i) {
    const double s = st.rho_plus[i] + st.rho_minus[i];
    const double d0 = st.rho_plus[i] - st.rho_minus[i];
    auto rhs = [&](double d) {
      auto [sp, sm] = reversal_source(0.5 * (s + d), 0.5 * (s - d), p.lambda0,
                                      p.lambda1);
      (void)sm;
      return 2.0 * sp;
    };
    const double k1 = rhs(d0);
    const double k2 = rhs(d0 + dt * k1);
    double d1 = d0 + 0.5 * dt * (k1 + k2);
    if (d1 > s) d1 = s;      // Heun overshoot clamp; |δ| <= s is invariant
    if (d1 < -s) d1 = -s;
    out.rho_plus[i] = 0.5 * (s + d1);
    out.rho_minus[i] = 0.5 * (s - d1);
  }
  return out;
}

struct RunResult {
  std::vector<MacroState> snapshots;
  std::vector<std::pair<double, double>> mass_log;  ///< (time, total mass)
  std::size_t steps_taken = 0;
};

/**
 * Splitting driver: hyperbolic → diffusion (if enabled) → reaction (if
 * enabled), shared dt from the tightest of the advective CFL, the explicit
 * diffusion bound and a reaction-rate bound. If a sub-step produces a
 * negative density the step is retried at half dt, at most 5 times.
 * Snapshots are recorded every snapshot_stride accepted steps (and at the
 * final time). Throws on CFL breakdown (wave speed explodes).
 */
inline RunResult run(const MacroState& initial, const SolverParams& params,
                     std::size_t snapshot_stride = 0,
                     std::size_t max_steps = 2000000) {
  params.validate();
  const auto& cs = params.coefficients;
  MacroState st = initial;
  RunResult res;
  res.snapshots.push_back(st);
  res.mass_log.emplace_back(st.time, st.mass());

  const double two_kD = 2.0 * params.k_nonlocal * cs.diffusion_D;
  std::size_t step_count = 0;
  while (st.time < params.t_end - 1e-14 && step_count < max_steps) {
    const double vmax = detail::max_wave_speed(st, cs);
    if (!std::isfinite(vmax) || vmax > 1e12)
      throw std::runtime_error("macro1d::run: wave speed exploded (CFL breakdown)");
    double dt = params.t_end - st.time;
    if (vmax > 0.0) dt = std::min(dt, params.cfl * st.dx / vmax);
    if (params.diffusion_enabled()) {
      double rho_max = 0.0;
      for (std::size_t i = 0; i < st.n_cells; ++i)
        rho_max = std::max(rho_max, st.rho_plus[i] + st.rho_minus[i]);
      double rho_min = rho_max;
      for (std::size_t i = 0; i < st.n_cells; ++i) {
        const double r = st.rho_plus[i] + st.rho_minus[i];
        if (r > detail::vacuum_floor) rho_min = std::min(rho_min, r);
      }
      if (rho_max > 0.0 && rho_min > 0.0) {
        const double nu_eff = two_kD * rho_max / rho_min;
        if (nu_eff > 0.0) dt = std::min(dt, st.dx * st.dx / (4.0 * nu_eff));
      }
    }
    if (params.reversals_enabled()) {
      double rate_max = params.lambda0;
      for (std::size_t i = 0; i < st.n_cells; ++i) {
        const double r = std::max(st.rho_plus[i], st.rho_minus[i]);
        rate_max = std::max(rate_max, params.lambda1 * r * r + params.lambda0);
      }
      if (rate_max > 0.0) dt = std::min(dt, 0.2 / rate_max);
    }

    MacroState next = st;
    bool accepted = false;
    for (int attempt = 0; attempt < 6 && !accepted; ++attempt) {
      next = hyperbolic_step(st, params, dt);
      if (params.diffusion_enabled()) {
        MacroState tmp = diffusion_step(next, params, dt);
        tmp.time = next.time;
        next = tmp;
      }
      if (params.reversals_enabled()) {
        MacroState tmp = reaction_step(next, params, dt);
        tmp.time = next.time;
        next = tmp;
      }
      accepted = true;
      for (std::size_t i = 0; i < next.n_cells && accepted; ++i)
        accepted = next.rho_plus[i] >= 0.0 && next.rho_minus[i] >= 0.0;
      if (!accepted) dt *= 0.5;
    }
    if (!accepted)
      throw std::runtime_error(
          "macro1d::run: positivity could not be restored by dt halving");
    st = next;
    ++step_count;
    res.mass_log.emplace_back(st.time, st.mass());
    if (snapshot_stride > 0 && step_count % snapshot_stride == 0)
      res.snapshots.push_back(st);
  }
  if (snapshot_stride == 0 || res.snapshots.back().time != st.time)
    res.snapshots.push_back(st);
  res.steps_taken = step_count;
  return res;
}

}  // namespace nemasoh
