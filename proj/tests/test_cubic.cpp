#include <doctest.h>

#include <cmath>
#include <nemasoh/cubic.hpp>
#include <nemasoh/rng.hpp>

#include "oracles.hpp"

using namespace nemasoh;

namespace {
double eval(double a3, double a2, double a1, double a0, double z) {
  return ((a3 * z + a2) * z + a1) * z + a0;
}
}  // namespace

TEST_SUITE_BEGIN("cubic");

TEST_CASE("z^3 - z factors into {-1, 0, 1}") {
  auto r = solve_cubic_real(1.0, 0.0, -1.0, 0.0);
  REQUIRE(r.size() == 3);
  CHECK(r[0].value == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(r[1].value == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(r[2].value == doctest::Approx(1.0).epsilon(1e-14));
  for (const auto& root : r) CHECK(root.multiplicity == 1);
}

TEST_CASE("z^3 has a triple root at 0") {
  auto r = solve_cubic_real(1.0, 0.0, 0.0, 0.0);
  REQUIRE(r.size() == 1);
  CHECK(r[0].value == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(r[0].multiplicity == 3);
}

TEST_CASE("constructed roots {-2, 0.3, 0.7} are recovered in order") {
  // (z - 0.3)(z - 0.7)(z + 2) = z^3 + z^2 - 1.79 z + 0.42
  auto r = solve_cubic_real(1.0, 1.0, -1.79, 0.42);
  REQUIRE(r.size() == 3);
  CHECK(r[0].value == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(r[1].value == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(r[2].value == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("degenerate degree is rejected") {
  CHECK_THROWS_AS(solve_cubic_real(0.0, 1.0, 2.0, 3.0), std::invalid_argument);
}

TEST_CASE("residuals, root sums and products at random coefficients") {
  RngStream rng(20240811);
  for (int trial = 0; trial < 500; ++trial) {
    const double a3 = rng.uniform(-2.0, 2.0);
    if (std::abs(a3) < 0.1) continue;
    const double a2 = rng.uniform(-3.0, 3.0);
    const double a1 = rng.uniform(-3.0, 3.0);
    const double a0 = rng.uniform(-3.0, 3.0);
    auto roots = solve_cubic_real(a3, a2, a1, a0);
    const double cmax =
        std::max({std::abs(a3), std::abs(a2), std::abs(a1), std::abs(a0)});
    int total_mult = 0;
    for (const auto& r : roots) {
      CHECK(std::abs(eval(a3, a2, a1, a0, r.value)) <= 1e-10 * cmax);
      total_mult += r.multiplicity;
    }
    // nondecreasing order
    for (std::size_t i = 1; i < roots.size(); ++i)
      CHECK(roots[i].value >= roots[i - 1].value);
    if (total_mult == 3) {
      double sum = 0.0, prod = 1.0;
      for (const auto& r : roots) {
        sum += r.value * r.multiplicity;
        for (int m = 0; m < r.multiplicity; ++m) prod *= r.value;
      }
      CHECK(sum == doctest::Approx(-a2 / a3).epsilon(1e-8));
      CHECK(prod == doctest::Approx(-a0 / a3).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("near-triple roots collapse to multiplicity 3") {
  // (z - 1)^3 perturbed below the clustering tolerance
  const double e = 1e-13;
  const double r1 = 1.0, r2 = 1.0 + e, r3 = 1.0 - e;
  const double a2 = -(r1 + r2 + r3);
  const double a1 = r1 * r2 + r1 * r3 + r2 * r3;
  const double a0 = -r1 * r2 * r3;
  auto roots = solve_cubic_real(1.0, a2, a1, a0);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].multiplicity == 3);
  CHECK(roots[0].value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("discriminant sign matches the real-root count") {
  RngStream rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    const double a2 = rng.uniform(-2.0, 2.0);
    const double a1 = rng.uniform(-2.0, 2.0);
    const double a0 = rng.uniform(-2.0, 2.0);
    const double disc = cubic_discriminant(1.0, a2, a1, a0);
    if (std::abs(disc) < 1e-6) continue;  // skip near-degenerate
    auto full = solve_cubic_complex(1.0, a2, a1, a0);
    double max_imag = 0.0;
    for (const auto& z : full) max_imag = std::max(max_imag, z[1]);
    if (disc > 0.0)
      CHECK(max_imag == 0.0);
    else
      CHECK(max_imag > 0.0);
    // direct-formula oracle agrees with the library evaluation
    CHECK(disc == doctest::Approx(oracles::cubic_discriminant_direct(
                      1.0, a2, a1, a0)).epsilon(1e-12));
  }
}

TEST_CASE("complex pair real/imag parts satisfy the polynomial") {
  // z^3 + z + 10 has one real root and a conjugate pair
  auto full = solve_cubic_complex(1.0, 0.0, 1.0, 10.0);
  int complex_count = 0;
  for (const auto& z : full) {
    if (z[1] > 0.0) ++complex_count;
  }
  CHECK(complex_count == 2);
  // Vieta: sum of real parts = -a2/a3 = 0
  CHECK(full[0][0] + full[1][0] + full[2][0] ==
        doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
}

TEST_SUITE_END();
