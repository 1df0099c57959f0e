#pragma once

/**
 * @file coefficients.hpp
 * @brief Macroscopic coefficients (d1, d2, μ, d3), the diffusion constant
 *        𝒟 = d2 + d3 - μ - 2/κ, and the non-locality constant k = r²/8.
 *
 * The coefficient ratios
 *   d2 = ⟨g sin/cos⟩_M / ⟨g sin/cos²⟩_M,
 *   μ  = (1/κ) ⟨g sin⟩_M / ⟨g sin/cos²⟩_M,
 *   d3 = 2 ⟨g sin³/cos³⟩_M / ⟨g sin/cos²⟩_M
 * share the normalization 2/Z_κ, which is factored out analytically: each
 * entry is a raw integral ∫_0^{π/2} φ g w̃ dθ with the scaled weight w̃.
 * Since g <= 0, every numerator and the denominator are negative, making
 * all ratios positive.
 */

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nemasoh/gci.hpp"
#include "nemasoh/gvm.hpp"
#include "nemasoh/quadrature.hpp"

namespace nemasoh {

struct CoefficientSet {
  double kappa = 0.0;
  double d1 = 0.0;           ///< speed factor ⟨cos⟩_M, in (0, 1)
  double d2 = 0.0;           ///< angle convection coefficient, > 0
  double mu = 0.0;           ///< pressure coefficient, > 0
  double d3 = 0.0;           ///< diffusion correction coefficient, > 0
  double diffusion_D = 0.0;  ///< 𝒟 = d2 + d3 - μ - 2/κ, >= 0 (Lemma 5.4)
  double quad_error = 0.0;   ///< summed absolute quadrature error estimates

  double d2_hat() const { return d2 / d1; }
  double mu_hat() const { return mu / d1; }
};

struct NonlocalConstant {
  double r;  ///< scaled interaction radius, > 0
  double k;  ///< r²/8 exactly
};

/// k = (1/(4πr²)) ∫_{|ξ|<=r} |ξ|² dξ = r²/8.
inline NonlocalConstant interaction_k(double r) {
  if (!(r > 0.0)) throw std::invalid_argument("interaction_k: r must be > 0");
  return NonlocalConstant{r, r * r / 8.0};
}

namespace detail {

/// ∫_0^{π/2} φ(θ) g(θ) w̃(θ) dθ with g from the table spline.
inline QuadResult gci_raw_moment(const GciTable& table,
                                 double (*phi)(double, double)) {
  const double kappa = table.kappa;
  auto f = [&](double t) {
    const double w = gvm_weight_scaled(kappa, std::cos(t));
    if (w == 0.0) return 0.0;
    return phi(t, table.spline(t)) * w;
  };
  return integrate_adaptive(f, Interval(0.0, half_pi), 1e-11, 1e-16);
}

inline double phi_sin_over_cos(double t, double g) {
  return g * std::sin(t) / std::cos(t);
}
inline double phi_sin_over_cos2(double t, double g) {
  const double c = std::cos(t);
  return g * std::sin(t) / (c * c);
}
inline double phi_sin(double t, double g) { return g * std::sin(t); }
inline double phi_sin3_over_cos3(double t, double g) {
  const double s = std::sin(t) / std::cos(t);
  return g * s * s * s;
}

}  // namespace detail

/**
 * Compute the coefficient set for the table's κ. Rejects a table whose
 * denominator moment ⟨g sin/cos²⟩ is numerically zero (a valid table always
 * has it strictly negative).
 */
inline CoefficientSet compute_coefficients(double kappa,
                                           const GciTable& table) {
  if (table.kappa != kappa)
    throw std::invalid_argument("compute_coefficients: table kappa mismatch");

  CoefficientSet cs;
  cs.kappa = kappa;

  auto zres = integrate_adaptive(
      [kappa](double t) { return gvm_weight_scaled(kappa, std::cos(t)); },
      Interval(0.0, half_pi), 1e-12, 1e-16);
  auto d1res = integrate_adaptive(
      [kappa](double t) {
        return std::cos(t) * gvm_weight_scaled(kappa, std::cos(t));
      },
      Interval(0.0, half_pi), 1e-12, 1e-16);
  cs.d1 = d1res.value / zres.value;

  auto num_d2 = detail::gci_raw_moment(table, detail::phi_sin_over_cos);
  auto den = detail::gci_raw_moment(table, detail::phi_sin_over_cos2);
  auto num_mu = detail::gci_raw_moment(table, detail::phi_sin);
  auto num_d3 = detail::gci_raw_moment(table, detail::phi_sin3_over_cos3);

  if (std::abs(den.value) < 1e-14)
    throw std::invalid_argument(
        "compute_coefficients: degenerate table, |<g sin/cos^2>| ~ 0");

  cs.d2 = num_d2.value / den.value;
  cs.mu = num_mu.value / (kappa * den.value);
  cs.d3 = 2.0 * num_d3.value / den.value;
  cs.diffusion_D = cs.d2 + cs.d3 - cs.mu - 2.0 / kappa;
  cs.quad_error = zres.abs_error_estimate + d1res.abs_error_estimate +
                  num_d2.abs_error_estimate + den.abs_error_estimate +
                  num_mu.abs_error_estimate + num_d3.abs_error_estimate;
  return cs;
}

struct PositivityRow {
  double kappa;
  double diffusion_D;
};

struct PositivityReport {
  std::vector<PositivityRow> rows;
  double min_D = 0.0;
  double argmin_kappa = 0.0;
  bool all_nonnegative = true;  ///< true when every 𝒟 >= -1e-8
};

/// Evaluate 𝒟(κ) over a grid of concentrations; flags any below -1e-8.
inline PositivityReport positivity_report(const std::vector<double>& kappa_grid,
                                          std::size_t n_grid = 4001) {
  if (kappa_grid.empty())
    throw std::invalid_argument("positivity_report: empty grid");
  PositivityReport rep;
  rep.min_D = std::numeric_limits<double>::infinity();
  for (double k : kappa_grid) {
    if (!(k > 0.0))
      throw std::invalid_argument("positivity_report: kappa must be > 0");
    auto table = build_gci_table(k, n_grid);
    auto cs = compute_coefficients(k, table);
    rep.rows.push_back({k, cs.diffusion_D});
    if (cs.diffusion_D < rep.min_D) {
      rep.min_D = cs.diffusion_D;
      rep.argmin_kappa = k;
    }
    if (cs.diffusion_D < -1e-8) rep.all_nonnegative = false;
  }
  return rep;
}

/**
 * On-disk CSV cache of coefficient sets keyed by (κ, GCI grid size, code
 * version), so repeated CLI invocations skip the table build. Layout:
 * one header line, then
 *   kappa,n_grid,version,d1,d2,mu,d3,diffusion_D,quad_error
 */
class CoefficientCache {
 public:
  explicit CoefficientCache(std::string path) : path_(std::move(path)) {}

  std::optional<CoefficientSet> find(double kappa, std::size_t n_grid,
                                     const std::string& version) const {
    std::ifstream in(path_);
    if (!in) return std::nullopt;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      std::istringstream ss(line);
      std::string cell;
      std::vector<std::string> cells;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() != 9) continue;
      if (std::stod(cells[0]) == kappa &&
          static_cast<std::size_t>(std::stoull(cells[1])) == n_grid &&
          cells[2] == version) {
        CoefficientSet cs;
        cs.kappa = kappa;
        cs.d1 = std::stod(cells[3]);
        cs.d2 = std::stod(cells[4]);
        cs.mu = std::stod(cells[5]);
        cs.d3 = std::stod(cells[6]);
        cs.diffusion_D = std::stod(cells[7]);
        cs.quad_error = std::stod(cells[8]);
        return cs;
      }
    }
    return std::nullopt;
  }

  void append(const CoefficientSet& cs, std::size_t n_grid,
              const std::string& version) const {
    const bool fresh = !std::filesystem::exists(path_);
    std::ofstream out(path_, std::ios::app);
    if (!out)
      throw std::runtime_error("coefficient cache: cannot open '" + path_ + "'");
    if (fresh)
      out << "kappa,n_grid,version,d1,d2,mu,d3,diffusion_D,quad_error\n";
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.17g,%zu,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  cs.kappa, n_grid, version.c_str(), cs.d1, cs.d2, cs.mu,
                  cs.d3, cs.diffusion_D, cs.quad_error);
    out << buf;
  }

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace nemasoh
