#include <doctest.h>

#include <cmath>
#include <nemasoh/gci.hpp>
#include <nemasoh/quadrature.hpp>

#include "oracles.hpp"

using namespace nemasoh;

TEST_SUITE_BEGIN("gci");

TEST_CASE("g(0) = 0 and g is strictly negative on (0, pi/2]") {
  for (double kappa : {0.5, 2.0, 10.0}) {
    auto table = build_gci_table(kappa, 1001);
    CHECK(table.values.front() == 0.0);
    for (std::size_t i = 1; i < table.values.size(); ++i) {
      CHECK(table.values[i] < 0.0);
      CHECK(table.values[i] <= table.values[i - 1]);  // nonincreasing
    }
  }
}

TEST_CASE("g at 0.5 (kappa = 2) matches the relaxation BVP oracle to 1e-5") {
  auto table = build_gci_table(2.0, 4001);
  const double oracle = oracles::gci_ode_relaxation(2.0, 0.5);
  // frozen from the oracle
  CHECK(oracle == doctest::Approx(-0.21799543002894820).epsilon(1e-7));
  const double ours = gci_eval(table, 0.5);
  CHECK(std::abs(ours - oracle) / std::abs(oracle) < 1e-5);
}

TEST_CASE("oddness and pi-shift antisymmetry of the extension") {
  auto table = build_gci_table(2.0, 2001);
  for (double t : {0.1, 0.3, 0.7, 1.2, 1.5}) {
    CHECK(gci_eval(table, -t) == doctest::Approx(-gci_eval(table, t)));
    CHECK(gci_eval(table, pi - t) == doctest::Approx(-gci_eval(table, t)));
  }
  // fold consistency at the jump points
  CHECK(gci_eval(table, half_pi) == doctest::Approx(table.values.back()));
  CHECK(gci_eval(table, -half_pi) == doctest::Approx(-table.values.back()));
}

TEST_CASE("ODE residual at 4001 points is small and decreases under refinement") {
  for (double kappa : {0.5, 2.0, 10.0}) {
    auto t1 = build_gci_table(kappa, 4001);
    auto t2 = build_gci_table(kappa, 16001);
    const double r1 = ode_residual(t1);
    const double r2 = ode_residual(t2);
    CHECK(r1 <= 1e-4);
    CHECK(r2 < r1);
  }
}

TEST_CASE("g' <= 0 on the tabulated range") {
  auto table = build_gci_table(2.0, 4001);
  for (std::size_t i = 1; i < table.grid.size(); ++i)
    CHECK(table.values[i] - table.values[i - 1] <= 0.0);
}

TEST_CASE("cancellation conditions hold on both half-circles") {
  for (double kappa : {0.5, 2.0, 10.0}) {
    auto table = build_gci_table(kappa, 4001);
    GvmParams p(kappa, 0.0);
    auto plus = integrate_adaptive(
        [&](double t) { return gci_eval(table, t) * density(p, t); },
        Interval(-half_pi, half_pi));
    auto minus = integrate_adaptive(
        [&](double t) {
          const double th = normalize_particle_angle(t + pi);
          return gci_eval(table, th) * density(p, th);
        },
        Interval(-half_pi, half_pi));
    CHECK(std::abs(plus.value) < 1e-8);
    CHECK(std::abs(minus.value) < 1e-8);
  }
}

TEST_CASE("tables for different kappa are distinct and ordered in magnitude") {
  auto t05 = build_gci_table(0.5, 2001);
  auto t2 = build_gci_table(2.0, 2001);
  auto t10 = build_gci_table(10.0, 2001);
  // all monotone decreasing from 0; deeper for smaller kappa
  CHECK(std::abs(t05.values.back()) > std::abs(t2.values.back()));
  CHECK(std::abs(t2.values.back()) > std::abs(t10.values.back()));
  CHECK(gci_eval(t05, 0.8) != gci_eval(t2, 0.8));
  CHECK(gci_eval(t2, 0.8) != gci_eval(t10, 0.8));
}

TEST_CASE("shifted GCI g(theta - theta0) keeps the cancellation conditions") {
  // downstream code uses g_{θ0}(θ) = g(θ - θ0); the shifted cancellation
  // integral against M_{θ0} must still vanish
  auto table = build_gci_table(2.0, 4001);
  const double theta0 = 0.6;
  GvmParams p(2.0, theta0);
  auto plus = integrate_adaptive(
      [&](double t) {
        const double th = normalize_particle_angle(theta0 + t);
        return gci_eval(table, normalize_particle_angle(th - theta0)) *
               density(p, th);
      },
      Interval(-half_pi, half_pi));
  CHECK(std::abs(plus.value) < 1e-8);
}

TEST_CASE("preconditions are rejected") {
  CHECK_THROWS_AS(build_gci_table(0.0, 101), std::invalid_argument);
  CHECK_THROWS_AS(build_gci_table(-2.0, 101), std::invalid_argument);
  CHECK_THROWS_AS(build_gci_table(2.0, 2), std::invalid_argument);
}

TEST_SUITE_END();
