#pragma once

/**
 * @file gci.hpp
 * @brief The non-trivial generalized collision invariant g(θ).
 *
 * g solves d/dθ( cos²θ e^{-κ/cos θ} g'(θ) ) = sin 2θ e^{-κ/cos θ} on
 * [0, π/2] with g(0) = 0, explicitly
 *
 *     g(θ) = -∫_0^θ  I(β) / ( cos²β e^{-κ/cos β} ) dβ,
 *     I(β) = ∫_β^{π/2} sin 2α e^{-κ/cos α} dα,
 *
 * extended to the circle by g(-θ) = -g(θ) and g(π-θ) = -g(θ) (which leave
 * jumps at ±π/2, exactly like the indicator invariants χ±).
 *
 * Construction notes:
 *  - The inner integral is tabulated once on a dense sub-grid and
 *    suffix-summed from π/2 downward, so its tail keeps full relative
 *    accuracy (a forward cumulative sum would cancel catastrophically once
 *    I(β)/I(0) < machine epsilon).
 *  - The outer integrand h(β) = I(β) e^{κ/cos β}/cos²β is evaluated in log
 *    space. Within 1e-6 of π/2 the analytic limit 0 is substituted; where
 *    the weight or the suffix sum underflows, the integration-by-parts
 *    asymptote h ≈ 2 cos β / κ is used instead.
 *  - g' = -h is known exactly at both grid ends, so the evaluation spline
 *    is clamped to those derivatives.
 */

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nemasoh/angles.hpp"
#include "nemasoh/gvm.hpp"

namespace nemasoh {

namespace detail {

/// Clamped cubic spline on a strictly increasing grid (natural replaced by
/// prescribed end slopes). Tridiagonal solve for the interior derivatives.
class ClampedCubicSpline {
 public:
  ClampedCubicSpline() = default;

  ClampedCubicSpline(std::vector<double> x, std::vector<double> y,
                     double deriv_left, double deriv_right)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n)
      throw std::invalid_argument("spline: need matching grids, n >= 2");
    d_.assign(n, 0.0);
    d_.front() = deriv_left;
    d_.back() = deriv_right;
    if (n == 2) return;
    // solve for interior first derivatives of the C2 interpolant
    std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double hl = x_[i] - x_[i - 1];
      const double hr = x_[i + 1] - x_[i];
      a[i] = hr;
      b[i] = 2.0 * (hl + hr);
      c[i] = hl;
      r[i] = 3.0 * (hr * (y_[i] - y_[i - 1]) / hl + hl * (y_[i + 1] - y_[i]) / hr);
    }
    r[1] -= a[1] * deriv_left;
    r[n - 2] -= c[n - 2] * deriv_right;
    for (std::size_t i = 2; i + 1 < n; ++i) {
      const double m = a[i] / b[i - 1];
      b[i] -= m * c[i - 1];
      r[i] -= m * r[i - 1];
    }
    d_[n - 2] = r[n - 2] / b[n - 2];
    for (std::size_t i = n - 3; i >= 1; --i) {
      d_[i] = (r[i] - c[i] * d_[i + 1]) / b[i];
      if (i == 1) break;
    }
  }

  double operator()(double xq) const {
    const std::size_t n = x_.size();
    if (xq <= x_.front()) xq = x_.front();
    if (xq >= x_.back()) xq = x_.back();
    std::size_t lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= xq ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (xq - x_[lo]) / h;
    const double y0 = y_[lo], y1 = y_[lo + 1];
    const double m0 = d_[lo] * h, m1 = d_[lo + 1] * h;
    const double t2 = t * t, t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
  }

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace detail

struct GciTable {
  double kappa = 0.0;
  std::vector<double> grid;    ///< θ_i, uniform on [0, π/2]
  std::vector<double> values;  ///< g(θ_i) <= 0, nonincreasing
  detail::ClampedCubicSpline spline;
};

/**
 * Tabulate g on [0, π/2] with n_grid points (inner sub-grid is 8x denser).
 */
inline GciTable build_gci_table(double kappa, std::size_t n_grid = 4001) {
  if (!(kappa > 0.0))
    throw std::invalid_argument("build_gci_table: kappa must be positive");
  if (n_grid < 3)
    throw std::invalid_argument("build_gci_table: n_grid must be >= 3");

  constexpr std::size_t inner_mult = 8;
  const std::size_t m = inner_mult * (n_grid - 1) + 1;
  const double dal = half_pi / static_cast<double>(m - 1);

  // inner integrand sin 2α w̃(α) on the dense grid (scaled weight: the
  // e^{-κ} prefactor cancels against e^{+κ/cos β} in the outer ratio)
  std::vector<double> f_in(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double al = static_cast<double>(j) * dal;
    f_in[j] = std::sin(2.0 * al) * gvm_weight_scaled(kappa, std::cos(al));
  }
  // suffix-summed trapezoid panels: Ĩ(α_j) = ∫_{α_j}^{π/2} sin 2α w̃ dα
  std::vector<double> itail(m, 0.0);
  for (std::size_t j = m - 1; j >= 1; --j) {
    itail[j - 1] = itail[j] + 0.5 * (f_in[j - 1] + f_in[j]) * dal;
    if (j == 1) break;
  }

  GciTable table;
  table.kappa = kappa;
  table.grid.resize(n_grid);
  table.values.resize(n_grid);
  const double dth = half_pi / static_cast<double>(n_grid - 1);

  // outer integrand h(β) = Ĩ(β) / (cos²β w̃(β)) = -g'(β)
  std::vector<double> h(n_grid);
  for (std::size_t i = 0; i < n_grid; ++i) {
    const double beta = static_cast<double>(i) * dth;
    table.grid[i] = beta;
    const double cb = std::cos(beta);
    const double itl = itail[i * inner_mult];
    if (half_pi - beta < 1e-6) {
      h[i] = 0.0;  // analytic limit at the endpoint
    } else if (itl <= 0.0 || gvm_weight_scaled(kappa, cb) == 0.0) {
      h[i] = 2.0 * cb / kappa;  // integration-by-parts asymptote
    } else {
      h[i] = std::exp(std::log(itl) + kappa * (1.0 / cb - 1.0) -
                      2.0 * std::log(cb));
    }
  }
  // outer cumulative trapezoid: g = -∫ h
  table.values[0] = 0.0;
  for (std::size_t i = 1; i < n_grid; ++i)
    table.values[i] = table.values[i - 1] - 0.5 * (h[i - 1] + h[i]) * dth;

  table.spline = detail::ClampedCubicSpline(table.grid, table.values,
                                            -h.front(), -h.back());
  return table;
}

/**
 * Evaluate the symmetry-extended g at any θ in [-π, π): fold by
 * π-periodicity, then by oddness, interpolate on [0, π/2].
 * At the jump points ±π/2 the [0, π/2] branch value (±table end) is used.
 */
inline double gci_eval(const GciTable& table, double theta) {
  double t = normalize_particle_angle(theta);
  if (t > half_pi) t -= pi;          // g is π-periodic
  else if (t < -half_pi) t += pi;
  if (t == -half_pi) return -table.spline(half_pi);
  const double s = t < 0.0 ? -1.0 : 1.0;
  return s * table.spline(std::abs(t));
}

/**
 * Max relative residual of the defining ODE,
 *   | d/dθ(cos²θ e^{-κ/cos θ} g') - sin 2θ e^{-κ/cos θ} | / max|rhs|,
 * centered differences on table values, interior points, last 2% of the
 * grid excluded (the flux degenerates there).
 */
inline double ode_residual(const GciTable& table) {
  const std::size_t n = table.grid.size();
  if (n < 5) throw std::invalid_argument("ode_residual: table too small");
  const double dth = table.grid[1] - table.grid[0];
  const double kappa = table.kappa;

  std::vector<double> flux(n, 0.0), rhs(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = table.grid[i];
    const double c = std::cos(th);
    const double w = gvm_weight_scaled(kappa, c);
    rhs[i] = std::sin(2.0 * th) * w;
    double gp;
    if (i == 0)
      gp = (table.values[1] - table.values[0]) / dth;
    else if (i == n - 1)
      gp = (table.values[n - 1] - table.values[n - 2]) / dth;
    else
      gp = (table.values[i + 1] - table.values[i - 1]) / (2.0 * dth);
    flux[i] = c * c * w * gp;
  }
  double rhs_max = 0.0;
  for (double v : rhs) rhs_max = std::max(rhs_max, std::abs(v));

  const std::size_t hi = static_cast<std::size_t>(0.98 * static_cast<double>(n));
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n && i < hi; ++i) {
    const double dflux = (flux[i + 1] - flux[i - 1]) / (2.0 * dth);
    worst = std::max(worst, std::abs(dflux - rhs[i]));
  }
  return worst / rhs_max;
}

}  // namespace nemasoh
