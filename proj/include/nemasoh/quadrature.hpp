#pragma once

/**
 * @file quadrature.hpp
 * @brief Adaptive quadrature and cumulative integration on sample grids.
 *
 * integrate_adaptive() is a globally adaptive Gauss-Kronrod (G7, K15)
 * scheme: the panel with the largest error estimate is bisected until the
 * summed estimate meets max(abs_tol, rel_tol * |value|) or the subdivision
 * budget runs out. The per-panel estimate is |K15 - G7|, which is
 * pessimistic for smooth integrands.
 */

#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace nemasoh {

struct Interval {
  double a;
  double b;

  Interval(double a_, double b_) : a(a_), b(b_) {
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b))
      throw std::invalid_argument("Interval: require finite a < b");
  }
};

struct QuadResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

/// Thrown when the subdivision budget is exhausted before convergence.
/// Carries the best estimate found so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult best)
      : std::runtime_error(what), best_estimate(best) {}
  QuadResult best_estimate;
};

namespace detail {

// 15-point Kronrod abscissae (positive half) and weights; embedded 7-point
// Gauss weights. Values from the QUADPACK dqk15 tables.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <typename F>
Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fs = f(c - x) + f(c + x);
    resk += kWgk[j] * fs;
    if (j % 2 == 1) resg += kWg[j / 2] * fs;
  }
  return {a, b, resk * h, std::abs((resk - resg) * h)};
}

}  // namespace detail

/**
 * Adaptive integration of f over iv.
 *
 * Converges when the summed panel error is below
 * max(abs_tol, rel_tol * |integral|); throws QuadratureError (carrying the
 * best estimate) if max_panels bisections do not get there.
 */
template <typename F>
QuadResult integrate_adaptive(F&& f, Interval iv, double rel_tol = 1e-10,
                              double abs_tol = 1e-14,
                              std::size_t max_panels = 100000) {
  std::priority_queue<detail::Panel> heap;
  heap.push(detail::gk15(f, iv.a, iv.b));
  std::size_t evals = 15;
  double total = heap.top().value;
  double err = heap.top().error;

  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (heap.size() >= max_panels || heap.top().error == 0.0) {
      throw QuadratureError("integrate_adaptive: subdivision budget exhausted",
                            QuadResult{total, err, evals});
    }
    detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    detail::Panel left = detail::gk15(f, worst.a, mid);
    detail::Panel right = detail::gk15(f, mid, worst.b);
    evals += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  return QuadResult{total, err, evals};
}

inline QuadResult integrate_adaptive(const std::function<double(double)>& f,
                                     Interval iv) {
  return integrate_adaptive<const std::function<double(double)>&>(f, iv);
}

/**
 * Cumulative integral F(x_i) = ∫_{x_0}^{x_i} f on a sample grid, composite
 * trapezoid. F(x_0) = 0. Rejects fewer than 2 samples or non-increasing
 * abscissae.
 */
inline std::vector<double> cumulative_integral(
    const std::vector<double>& xs, const std::vector<double>& fs) {
  if (xs.size() < 2 || xs.size() != fs.size())
    throw std::invalid_argument("cumulative_integral: need >= 2 (x, f) samples");
  std::vector<double> out(xs.size());
  out[0] = 0.0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument(
          "cumulative_integral: abscissae must be strictly increasing");
    out[i] = out[i - 1] + 0.5 * (fs[i] + fs[i - 1]) * (xs[i] - xs[i - 1]);
  }
  return out;
}

}  // namespace nemasoh
