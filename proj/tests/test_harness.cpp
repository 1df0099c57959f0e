#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nemasoh/harness.hpp>

using namespace nemasoh;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_SUITE_BEGIN("harness");

TEST_CASE("chi-square quantile approximation is sane") {
  // reference values of the 99% chi-square quantile
  CHECK(detail::chi2_quantile_99(10.0) == doctest::Approx(23.209).epsilon(0.01));
  CHECK(detail::chi2_quantile_99(20.0) == doctest::Approx(37.566).epsilon(0.01));
}

TEST_CASE("tail slope of a flat series is zero, of a ramp is its rate") {
  std::vector<double> flat(100, 0.7);
  CHECK(detail::tail_slope(flat, 0.1) == doctest::Approx(0.0).scale(1.0));
  std::vector<double> ramp(100);
  for (std::size_t i = 0; i < 100; ++i) ramp[i] = 0.02 * static_cast<double>(i);
  CHECK(detail::tail_slope(ramp, 1.0) == doctest::Approx(0.02).epsilon(1e-9));
}

TEST_CASE("histogram chi-square accepts true GVM samples and rejects uniforms") {
  RngStream rng(17);
  GvmParams gp(2.0, 0.0);
  auto plus = sample(gp, HalfCircle::plus, 5000, rng);
  auto minus = sample(gp, HalfCircle::minus, 5000, rng);
  std::vector<double> angles = plus;
  angles.insert(angles.end(), minus.begin(), minus.end());
  auto ok = detail::histogram_chi2(angles, 2.0, 0.0, 24);
  CHECK(ok.statistic < ok.critical_99);

  std::vector<double> uni(10000);
  for (auto& a : uni) a = rng.uniform(-pi, pi);
  auto bad = detail::histogram_chi2(uni, 2.0, 0.0, 24);
  CHECK(bad.statistic > bad.critical_99);
}

TEST_CASE("apportionment hits the exact total and follows the weights") {
  auto counts = detail::apportion({1.0, 2.0, 1.0}, 101);
  CHECK(counts[0] + counts[1] + counts[2] == 101);
  CHECK(counts[1] > counts[0]);
}

TEST_CASE("small equilibrium experiment passes its own report") {
  EquilibriumConfig cfg;
  cfg.n = 2000;
  cfg.t_end = 8.0;
  cfg.dt = 0.025;
  cfg.seed = 5;
  auto rep = run_equilibrium_experiment(cfg);
  CHECK_FALSE(rep.inconclusive);
  for (const auto& row : rep.rows) {
    INFO(row.statistic, ": theo=", row.theoretical, " meas=", row.measured,
         " tol=", row.tolerance);
    CHECK(row.pass);
  }
}

TEST_CASE("equilibrium with reversals equalizes the half-circle masses") {
  EquilibriumConfig cfg;
  cfg.n = 1500;
  cfg.t_end = 8.0;
  cfg.dt = 0.025;
  cfg.rho_plus_frac = 0.7;  // start lopsided
  cfg.reversals = true;
  cfg.lambda0 = 1.0;        // lambda0 >> lambda1 rho^2
  cfg.lambda1 = 0.0;
  cfg.seed = 6;
  auto rep = run_equilibrium_experiment(cfg);
  bool found = false;
  for (const auto& row : rep.rows)
    if (row.statistic == "half_circle_equalization") {
      found = true;
      CHECK(row.pass);
    }
  CHECK(found);
}

TEST_CASE("golden tables rerun byte-identically and respect the bounds") {
  const std::string dir = "golden_test_out";
  emit_golden_tables({0.5, 2.0, 10.0}, dir, 501);
  const auto csv1 = slurp(dir + "/coefficients_golden.csv");
  emit_golden_tables({0.5, 2.0, 10.0}, dir, 501);
  const auto csv2 = slurp(dir + "/coefficients_golden.csv");
  CHECK(csv1 == csv2);
  CHECK(!csv1.empty());
  // every row satisfies the coefficient bounds
  CoefficientCache cache(dir + "/coefficients_golden.csv");
  for (double k : {0.5, 2.0, 10.0}) {
    auto cs = cache.find(k, 501, kVersion);
    REQUIRE(cs.has_value());
    CHECK(cs->d1 > 0.0);
    CHECK(cs->d1 < 1.0);
    CHECK(cs->d2 > 0.0);
    CHECK(cs->mu > 0.0);
    CHECK(cs->d3 > 0.0);
    CHECK(cs->diffusion_D >= -1e-8);
  }
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
