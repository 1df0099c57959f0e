#pragma once

/**
 * @file particles.hpp
 * @brief Agent-based model: N particles in a periodic square box with
 *        nematic alignment, angle-modulated noise, constant-speed
 *        transport and optional density-dependent Poisson reversals.
 *
 * Per step, for each particle i (all reads from the pre-step snapshot):
 *   J_i = Σ_{k: dist <= R} v(2Θ_k)  (self included), Θ̄_i = ½ arg J_i
 *   Θ_i += [ -ν Sign(cos Δ) sin Δ - d sin 2Δ ] dt + √(2 d dt) |cos Δ| ξ,
 *          Δ = Θ_i - Θ̄_i
 *   reversal: with probability 1 - exp(-λ(ρ∓_i) dt) flip Θ_i += π
 *   X_i += v0 v(Θ_i^new) dt  (wrapped periodically)
 *
 * The -d sin 2Δ term is the Itô drift matching the kinetic alignment
 * operator in divergence form; without it the stationary angle law picks
 * up a spurious 1/cos²Δ factor and is not the generalized von Mises
 * distribution the rest of the library is built on.
 *
 * Neighbor search is a uniform periodic cell list with cells >= R; below
 * three cells per dimension it degrades to a direct sweep (dense regime).
 * A brute-force reference path is kept for equivalence tests. Noise is
 * drawn from per-(step, particle) keyed substreams, so trajectories do not
 * depend on traversal order.
 */

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nemasoh/angles.hpp"
#include "nemasoh/rng.hpp"

namespace nemasoh {

struct SimParams {
  std::size_t n = 0;
  double box_length = 0.0;
  double radius = 0.0;    ///< interaction radius R < box_length/2
  double speed = 1.0;     ///< v0
  double nu = 1.0;        ///< alignment frequency, >= 0
  double d_noise = 0.0;   ///< angular diffusion, >= 0
  double dt = 0.0;
  bool reversals = false;
  double lambda0 = 0.0;   ///< spontaneous reversal rate
  double lambda1 = 0.0;   ///< density-squared reversal coefficient
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 1) throw std::invalid_argument("SimParams: n must be >= 1");
    if (!(box_length > 0.0))
      throw std::invalid_argument("SimParams: box_length must be > 0");
    if (!(radius > 0.0))
      throw std::invalid_argument("SimParams: radius must be > 0");
    if (!(radius < 0.5 * box_length))
      throw std::invalid_argument("SimParams: radius must be < box_length/2");
    if (!(dt > 0.0)) throw std::invalid_argument("SimParams: dt must be > 0");
    if (nu < 0.0 || d_noise < 0.0 || lambda0 < 0.0 || lambda1 < 0.0)
      throw std::invalid_argument("SimParams: rates must be >= 0");
    if (nu * dt > 0.1 + 1e-12)
      throw std::invalid_argument(
          "SimParams: nu*dt must be <= 0.1 (explicit scheme guideline)");
    if (std::sqrt(2.0 * d_noise * dt) > 0.3 + 1e-12)
      throw std::invalid_argument(
          "SimParams: sqrt(2 d dt) must be <= 0.3 (explicit scheme guideline)");
  }
};

struct ParticleState {
  std::vector<double> x;      ///< in [0, L)
  std::vector<double> y;      ///< in [0, L)
  std::vector<double> angle;  ///< in [-π, π)
  double time = 0.0;

  std::size_t size() const { return angle.size(); }
};

/// Nematic mean line angle of a set of particle angles, or nullopt when the
/// doubled-angle current nearly cancels (|J| < 1e-12, isotropic set).
inline std::optional<double> nematic_mean_angle(std::span<const double> angles) {
  if (angles.empty())
    throw std::invalid_argument("nematic_mean_angle: empty set");
  double jx = 0.0, jy = 0.0;
  for (double a : angles) {
    jx += std::cos(2.0 * a);
    jy += std::sin(2.0 * a);
  }
  if (std::hypot(jx, jy) < 1e-12) return std::nullopt;
  return normalize_line_angle(0.5 * std::atan2(jy, jx));
}

/// Nematic order parameter |Σ v(2θ_k)| / N in [0, 1].
inline double nematic_order(std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("nematic_order: empty set");
  double jx = 0.0, jy = 0.0;
  for (double a : angles) {
    jx += std::cos(2.0 * a);
    jy += std::sin(2.0 * a);
  }
  return std::hypot(jx, jy) / static_cast<double>(angles.size());
}

namespace detail {

inline double wrap_position(double x, double box) {
  x = std::fmod(x, box);
  return x < 0.0 ? x + box : x;
}

/// minimum-image displacement component in [-L/2, L/2]
inline double min_image(double dx, double box) {
  if (dx > 0.5 * box) dx -= box;
  if (dx < -0.5 * box) dx += box;
  return dx;
}

/// Uniform periodic cell list; cell size >= R so neighbors live in the
/// 3x3 block around a particle's cell. Callers must check usable() first.
class CellList {
 public:
  CellList(const ParticleState& st, double box, double radius) : box_(box) {
    cells_per_dim_ = static_cast<std::size_t>(std::floor(box / radius));
    if (!usable()) return;
    cell_size_ = box / static_cast<double>(cells_per_dim_);
    heads_.assign(cells_per_dim_ * cells_per_dim_, npos);
    next_.assign(st.size(), npos);
    for (std::size_t i = 0; i < st.size(); ++i) {
      const std::size_t c = cell_of(st.x[i], st.y[i]);
      next_[i] = heads_[c];
      heads_[c] = i;
    }
  }

  bool usable() const { return cells_per_dim_ >= 3; }

  /// Visit every particle in the 3x3 cell block around (xi, yi).
  template <typename Visitor>
  void for_block(double xi, double yi, Visitor&& visit) const {
    const auto n = static_cast<std::ptrdiff_t>(cells_per_dim_);
    auto cx = static_cast<std::ptrdiff_t>(xi / cell_size_);
    auto cy = static_cast<std::ptrdiff_t>(yi / cell_size_);
    if (cx >= n) cx = n - 1;
    if (cy >= n) cy = n - 1;
    for (std::ptrdiff_t ox = -1; ox <= 1; ++ox) {
      const std::size_t gx = static_cast<std::size_t>((cx + ox + n) % n);
      for (std::ptrdiff_t oy = -1; oy <= 1; ++oy) {
        const std::size_t gy = static_cast<std::size_t>((cy + oy + n) % n);
        for (std::size_t k = heads_[gx * cells_per_dim_ + gy]; k != npos;
             k = next_[k])
          visit(k);
      }
    }
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  double box_ = 0.0, cell_size_ = 0.0;
  std::size_t cells_per_dim_ = 0;
  std::vector<std::size_t> heads_, next_;

  std::size_t cell_of(double x, double y) const {
    auto cx = static_cast<std::size_t>(x / cell_size_);
    auto cy = static_cast<std::size_t>(y / cell_size_);
    if (cx >= cells_per_dim_) cx = cells_per_dim_ - 1;
    if (cy >= cells_per_dim_) cy = cells_per_dim_ - 1;
    return cx * cells_per_dim_ + cy;
  }
};

}  // namespace detail

/// Neighbor indices of particle i (including i), brute force over all
/// particles. Reference path for cell-list equivalence tests.
inline std::vector<std::size_t> neighbors_brute_force(const ParticleState& st,
                                                      const SimParams& p,
                                                      std::size_t i) {
  std::vector<std::size_t> out;
  const double r2 = p.radius * p.radius;
  for (std::size_t k = 0; k < st.size(); ++k) {
    const double dx = detail::min_image(st.x[k] - st.x[i], p.box_length);
    const double dy = detail::min_image(st.y[k] - st.y[i], p.box_length);
    if (dx * dx + dy * dy <= r2) out.push_back(k);
  }
  return out;
}

/// Local densities (ρ+_i, ρ-_i): neighbor counts split by the sign of
/// cos(Θ_k - Θ̄_i) (>= 0 to the plus side), each divided by πR².
/// Returns (0, 0) when the neighborhood is isotropic (Θ̄_i undefined).
inline std::pair<double, double> local_densities(const ParticleState& st,
                                                 const SimParams& p,
                                                 std::size_t i) {
  if (i >= st.size()) throw std::invalid_argument("local_densities: bad index");
  auto nb = neighbors_brute_force(st, p, i);
  double jx = 0.0, jy = 0.0;
  for (std::size_t k : nb) {
    jx += std::cos(2.0 * st.angle[k]);
    jy += std::sin(2.0 * st.angle[k]);
  }
  if (std::hypot(jx, jy) < 1e-12) return {0.0, 0.0};
  const double tbar = 0.5 * std::atan2(jy, jx);
  std::size_t np = 0;
  for (std::size_t k : nb)
    if (std::cos(st.angle[k] - tbar) >= 0.0) ++np;
  const double norm = 1.0 / (pi * p.radius * p.radius);
  return {static_cast<double>(np) * norm,
          static_cast<double>(nb.size() - np) * norm};
}

/**
 * One Euler-Maruyama step. All Θ̄_i and ρ±_i come from the pre-step state;
 * reversal decisions execute after the angle update and before the position
 * update. Particle count is conserved (reversals change angles only).
 */
inline ParticleState step(const ParticleState& st, const SimParams& p,
                          std::uint64_t step_index = 0) {
  const std::size_t n = st.size();
  ParticleState out;
  out.x.resize(n);
  out.y.resize(n);
  out.angle.resize(n);
  out.time = st.time + p.dt;

  // pre-step doubled-angle components
  std::vector<double> c2(n), s2(n);
  for (std::size_t i = 0; i < n; ++i) {
    c2[i] = std::cos(2.0 * st.angle[i]);
    s2[i] = std::sin(2.0 * st.angle[i]);
  }

  detail::CellList cells(st, p.box_length, p.radius);
  const double r2 = p.radius * p.radius;
  const double inv_area = 1.0 / (pi * r2);
  const double sq_noise = std::sqrt(2.0 * p.d_noise * p.dt);

  for (std::size_t i = 0; i < n; ++i) {
    const double xi = st.x[i], yi = st.y[i];
    double jx = 0.0, jy = 0.0;
    auto accumulate = [&](std::size_t k) {
      const double dx = detail::min_image(st.x[k] - xi, p.box_length);
      const double dy = detail::min_image(st.y[k] - yi, p.box_length);
      if (dx * dx + dy * dy <= r2) {
        jx += c2[k];
        jy += s2[k];
      }
    };
    if (cells.usable())
      cells.for_block(xi, yi, accumulate);
    else
      for (std::size_t k = 0; k < n; ++k) accumulate(k);

    double theta = st.angle[i];
    if (std::hypot(jx, jy) >= 1e-12) {
      const double tbar = 0.5 * std::atan2(jy, jx);
      const double delta = theta - tbar;
      const double cd = std::cos(delta);
      const double sd = std::sin(delta);
      const double sign = cd > 0.0 ? 1.0 : (cd < 0.0 ? -1.0 : 0.0);
      // alignment drift + Ito correction of the cos^2-modulated noise
      theta += (-p.nu * sign * sd - p.d_noise * std::sin(2.0 * delta)) * p.dt;
      if (p.d_noise > 0.0) {
        RngStream rs = RngStream::from_keys(p.seed, step_index, i, 0);
        theta += sq_noise * std::abs(cd) * rs.normal();
      }
      if (p.reversals) {
        // opposing-side density from the pre-step snapshot
        std::size_t np = 0, ntot = 0;
        auto count = [&](std::size_t k) {
          const double dx = detail::min_image(st.x[k] - xi, p.box_length);
          const double dy = detail::min_image(st.y[k] - yi, p.box_length);
          if (dx * dx + dy * dy <= r2) {
            ++ntot;
            if (std::cos(st.angle[k] - tbar) >= 0.0) ++np;
          }
        };
        if (cells.usable())
          cells.for_block(xi, yi, count);
        else
          for (std::size_t k = 0; k < n; ++k) count(k);
        const double rho_plus = static_cast<double>(np) * inv_area;
        const double rho_minus = static_cast<double>(ntot - np) * inv_area;
        const double rho_opposing = cd >= 0.0 ? rho_minus : rho_plus;
        const double rate = p.lambda1 * rho_opposing * rho_opposing + p.lambda0;
        RngStream rs = RngStream::from_keys(p.seed, step_index, i, 1);
        if (rs.uniform() < 1.0 - std::exp(-rate * p.dt)) theta += pi;
      }
    }
    // an isotropic neighborhood (|J| ~ 0) leaves the angle untouched:
    // Θ̄_i is undefined, so drift, noise modulation and reversal are skipped
    theta = normalize_particle_angle(theta);
    out.angle[i] = theta;
    out.x[i] = detail::wrap_position(
        st.x[i] + p.speed * std::cos(theta) * p.dt, p.box_length);
    out.y[i] = detail::wrap_position(
        st.y[i] + p.speed * std::sin(theta) * p.dt, p.box_length);
  }
  return out;
}

struct SlabField {
  double x_center = 0.0;
  double rho_plus = 0.0;
  double rho_minus = 0.0;
  std::optional<double> theta_bar;  ///< absent for empty/isotropic slabs
  std::size_t count = 0;
};

/**
 * Coarse-grain the state into n_bins slabs along x1. Per slab: θ̄ from the
 * slab's nematic mean angle, ρ± by counting against that θ̄, normalized to
 * number density per unit area.
 */
inline std::vector<SlabField> measure_fields(const ParticleState& st,
                                             const SimParams& p,
                                             std::size_t n_bins) {
  if (n_bins < 1) throw std::invalid_argument("measure_fields: n_bins >= 1");
  const double width = p.box_length / static_cast<double>(n_bins);
  const double slab_area = width * p.box_length;
  std::vector<std::vector<double>> slab_angles(n_bins);
  for (std::size_t i = 0; i < st.size(); ++i) {
    auto b = static_cast<std::size_t>(st.x[i] / width);
    if (b >= n_bins) b = n_bins - 1;
    slab_angles[b].push_back(st.angle[i]);
  }
  std::vector<SlabField> out(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    out[b].x_center = (static_cast<double>(b) + 0.5) * width;
    out[b].count = slab_angles[b].size();
    if (slab_angles[b].empty()) continue;
    auto tb = nematic_mean_angle(slab_angles[b]);
    out[b].theta_bar = tb;
    if (!tb) continue;
    std::size_t np = 0;
    for (double a : slab_angles[b])
      if (std::cos(a - *tb) >= 0.0) ++np;
    out[b].rho_plus = static_cast<double>(np) / slab_area;
    out[b].rho_minus =
        static_cast<double>(slab_angles[b].size() - np) / slab_area;
  }
  return out;
}

}  // namespace nemasoh
