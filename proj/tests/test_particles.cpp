#include <doctest.h>

#include <cmath>
#include <nemasoh/gvm.hpp>
#include <nemasoh/particles.hpp>
#include <nemasoh/rng.hpp>

using namespace nemasoh;

namespace {

ParticleState random_state(std::size_t n, double box, std::uint64_t seed) {
  RngStream rng(seed);
  ParticleState st;
  st.x.resize(n);
  st.y.resize(n);
  st.angle.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.x[i] = rng.uniform(0.0, box);
    st.y[i] = rng.uniform(0.0, box);
    st.angle[i] = rng.uniform(-pi, pi);
  }
  return st;
}

}  // namespace

TEST_SUITE_BEGIN("particles");

TEST_CASE("nematic mean angle of antipodal pairs is the shared line") {
  std::vector<double> a = {0.7, 0.7 - pi};
  auto tb = nematic_mean_angle(a);
  REQUIRE(tb.has_value());
  CHECK(*tb == doctest::Approx(0.7));
  std::vector<double> b = {0.2};
  CHECK(*nematic_mean_angle(b) == doctest::Approx(0.2));
}

TEST_CASE("perpendicular pair cancels to the isotropic outcome") {
  std::vector<double> a = {pi / 4.0, -pi / 4.0};
  CHECK_FALSE(nematic_mean_angle(a).has_value());
}

TEST_CASE("mean angle zeroes the doubled-angle sine residual") {
  RngStream rng(3);
  std::vector<double> a(257);
  for (auto& v : a) v = rng.uniform(-pi, pi) * 0.3 + 0.4;
  auto tb = nematic_mean_angle(a);
  REQUIRE(tb.has_value());
  double res = 0.0;
  for (double v : a) res += std::sin(2.0 * (v - *tb));
  CHECK(std::abs(res) < 1e-9);
  // frame invariance: rotating all angles rotates theta_bar (mod pi)
  const double phi = 1.1;
  std::vector<double> rot = a;
  for (auto& v : rot) v += phi;
  auto tb2 = nematic_mean_angle(rot);
  REQUIRE(tb2.has_value());
  double res2 = 0.0;
  for (double v : rot) res2 += std::sin(2.0 * (v - *tb2));
  CHECK(std::abs(res2) < 1e-9);
  CHECK(std::abs(fold_line_difference(*tb2 - (*tb + phi))) < 1e-9);
}

TEST_CASE("nematic order hits the extremes") {
  std::vector<double> same = {0.4, 0.4, 0.4 - pi};
  CHECK(nematic_order(same) == doctest::Approx(1.0));
  std::vector<double> perp = {0.0, half_pi};
  CHECK(nematic_order(perp) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("SimParams validation") {
  SimParams p;
  p.n = 10;
  p.box_length = 10.0;
  p.radius = 1.0;
  p.dt = 0.05;
  p.nu = 1.0;
  CHECK_NOTHROW(p.validate());
  SimParams bad = p;
  bad.radius = 5.0;  // must be < L/2
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.dt = 0.2;  // nu dt > 0.1
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = p;
  bad.d_noise = 2.0;  // sqrt(2 d dt) > 0.3
  bad.dt = 0.05;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("local densities: self-count, parallel and antiparallel pairs") {
  SimParams p;
  p.n = 1;
  p.box_length = 10.0;
  p.radius = 1.0;
  p.dt = 0.01;
  const double norm = 1.0 / (pi * p.radius * p.radius);

  ParticleState st;
  st.x = {5.0};
  st.y = {5.0};
  st.angle = {0.2};
  auto [rp, rm] = local_densities(st, p, 0);
  CHECK(rp == doctest::Approx(norm));
  CHECK(rm == 0.0);

  st.x = {5.0, 5.0};
  st.y = {5.0, 5.0};
  st.angle = {0.2, 0.2};
  p.n = 2;
  auto [rp2, rm2] = local_densities(st, p, 0);
  CHECK(rp2 == doctest::Approx(2.0 * norm));
  CHECK(rm2 == 0.0);

  st.angle = {0.2, 0.2 + pi};
  auto [rp3, rm3] = local_densities(st, p, 1);
  CHECK(rp3 == doctest::Approx(norm));
  CHECK(rm3 == doctest::Approx(norm));
}

TEST_CASE("noise-free aligned flock translates rigidly") {
  SimParams p;
  p.n = 16;
  p.box_length = 8.0;
  p.radius = 1.5;
  p.speed = 1.0;
  p.nu = 1.0;
  p.d_noise = 0.0;
  p.dt = 0.05;
  p.seed = 11;
  auto st = random_state(p.n, p.box_length, 5);
  for (auto& a : st.angle) a = 0.9;
  auto before = st;
  for (int s = 0; s < 40; ++s) st = step(st, p, static_cast<unsigned>(s));
  for (std::size_t i = 0; i < p.n; ++i) {
    CHECK(st.angle[i] == doctest::Approx(0.9));
    const double expect_x = detail::wrap_position(
        before.x[i] + p.speed * std::cos(0.9) * 40.0 * p.dt, p.box_length);
    const double expect_y = detail::wrap_position(
        before.y[i] + p.speed * std::sin(0.9) * 40.0 * p.dt, p.box_length);
    CHECK(st.x[i] == doctest::Approx(expect_x).epsilon(1e-12));
    CHECK(st.y[i] == doctest::Approx(expect_y).epsilon(1e-12));
  }
}

TEST_CASE("noise-free random angles reach nematic consensus") {
  SimParams p;
  p.n = 100;
  p.box_length = 2.0;
  p.radius = 0.99;  // dense: R = 0.99 L/2
  p.speed = 0.5;
  p.nu = 1.0;
  p.d_noise = 0.0;
  p.dt = 0.1;
  p.seed = 23;
  auto st = random_state(p.n, p.box_length, 17);
  const int steps = static_cast<int>(20.0 / p.nu / p.dt);
  for (int s = 0; s < steps; ++s) st = step(st, p, static_cast<unsigned>(s));
  auto tb = nematic_mean_angle(st.angle);
  REQUIRE(tb.has_value());
  for (double a : st.angle) {
    const double dev = std::abs(fold_line_difference(a - *tb));
    CHECK(dev < 1e-2);
  }
  CHECK(nematic_order(st.angle) > 0.999);
}

TEST_CASE("single-particle reversal counts are Poisson with rate lambda0") {
  // opposing-side density is empty for an isolated particle, so the flip
  // rate is lambda(0) = lambda0 (lambda1 plays no role; kept 0 here)
  SimParams p;
  p.n = 1;
  p.box_length = 10.0;
  p.radius = 1.0;
  p.speed = 0.0;
  p.nu = 1.0;
  p.d_noise = 0.0;
  p.dt = 0.01;
  p.reversals = true;
  p.lambda0 = 0.8;
  p.lambda1 = 0.0;
  p.seed = 91;
  ParticleState st;
  st.x = {5.0};
  st.y = {5.0};
  st.angle = {0.3};
  int flips = 0;
  const int steps = 40000;
  double prev = st.angle[0];
  for (int s = 0; s < steps; ++s) {
    st = step(st, p, static_cast<unsigned>(s));
    if (std::abs(fold_line_difference(st.angle[0] - prev)) < 1e-9 &&
        std::abs(st.angle[0] - prev) > 1.0)
      ++flips;
    prev = st.angle[0];
  }
  const double T = steps * p.dt;
  const double expected = p.lambda0 * T;  // = 800
  const double sigma = std::sqrt(expected);
  CHECK(std::abs(flips - expected) < 3.0 * sigma);
}

TEST_CASE("cell list equals brute force on the step level") {
  // radius small enough for a real cell grid; compare against a spatially
  // identical run executed with the brute-force neighbor predicate
  SimParams p;
  p.n = 400;
  p.box_length = 10.0;
  p.radius = 0.8;
  p.speed = 1.0;
  p.nu = 1.0;
  p.d_noise = 0.5;
  p.dt = 0.05;
  p.seed = 7;
  auto st = random_state(p.n, p.box_length, 29);
  // neighbor sets must match exactly
  detail::CellList cells(st, p.box_length, p.radius);
  REQUIRE(cells.usable());
  const double r2 = p.radius * p.radius;
  for (std::size_t i = 0; i < p.n; i += 13) {
    auto ref = neighbors_brute_force(st, p, i);
    std::vector<std::size_t> got;
    cells.for_block(st.x[i], st.y[i], [&](std::size_t k) {
      const double dx = detail::min_image(st.x[k] - st.x[i], p.box_length);
      const double dy = detail::min_image(st.y[k] - st.y[i], p.box_length);
      if (dx * dx + dy * dy <= r2) got.push_back(k);
    });
    std::sort(got.begin(), got.end());
    CHECK(got == ref);
  }
}

TEST_CASE("determinism: same seed, same trajectory") {
  SimParams p;
  p.n = 50;
  p.box_length = 5.0;
  p.radius = 0.9;
  p.nu = 1.0;
  p.d_noise = 0.4;
  p.dt = 0.05;
  p.reversals = true;
  p.lambda0 = 0.2;
  p.lambda1 = 0.1;
  p.seed = 1234;
  auto a = random_state(p.n, p.box_length, 3);
  auto b = a;
  for (int s = 0; s < 30; ++s) {
    a = step(a, p, static_cast<unsigned>(s));
    b = step(b, p, static_cast<unsigned>(s));
  }
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.angle == b.angle);
}

TEST_CASE("particle count is conserved through reversals") {
  SimParams p;
  p.n = 64;
  p.box_length = 6.0;
  p.radius = 1.0;
  p.nu = 1.0;
  p.d_noise = 0.3;
  p.dt = 0.05;
  p.reversals = true;
  p.lambda0 = 1.0;
  p.lambda1 = 0.5;
  p.seed = 8;
  auto st = random_state(p.n, p.box_length, 19);
  for (int s = 0; s < 20; ++s) st = step(st, p, static_cast<unsigned>(s));
  CHECK(st.size() == p.n);
  for (double a : st.angle) {
    CHECK(a >= -pi);
    CHECK(a < pi);
  }
  for (std::size_t i = 0; i < p.n; ++i) {
    CHECK(st.x[i] >= 0.0);
    CHECK(st.x[i] < p.box_length);
  }
}

TEST_CASE("zero modulation at the boundary line") {
  // a particle exactly perpendicular to the local mean line gets neither
  // drift nor noise this step
  SimParams p;
  p.n = 3;
  p.box_length = 10.0;
  p.radius = 2.0;
  p.speed = 0.0;
  p.nu = 1.0;
  p.d_noise = 1.0;
  p.dt = 0.02;
  p.seed = 55;
  ParticleState st;
  st.x = {5.0, 5.0, 5.0};
  st.y = {5.0, 5.0, 5.0};
  // two particles define the line at angle 0; the third sits at pi/2
  st.angle = {0.0, 0.0, half_pi};
  auto next = step(st, p, 0);
  CHECK(next.angle[2] == doctest::Approx(half_pi));
}

TEST_CASE("measure_fields partitions the particles and matches slab stats") {
  SimParams p;
  p.n = 5000;
  p.box_length = 10.0;
  p.radius = 1.0;
  p.dt = 0.01;
  p.nu = 1.0;
  GvmParams gp(2.0, 0.0);
  RngStream rng(61);
  ParticleState st;
  st.x.resize(p.n);
  st.y.resize(p.n);
  auto plus = sample(gp, HalfCircle::plus, p.n / 2, rng);
  auto minus = sample(gp, HalfCircle::minus, p.n - p.n / 2, rng);
  st.angle = plus;
  st.angle.insert(st.angle.end(), minus.begin(), minus.end());
  for (std::size_t i = 0; i < p.n; ++i) {
    st.x[i] = rng.uniform(0.0, p.box_length);
    st.y[i] = rng.uniform(0.0, p.box_length);
  }
  auto fields = measure_fields(st, p, 8);
  std::size_t total = 0;
  const double slab_area = (p.box_length / 8.0) * p.box_length;
  for (const auto& f : fields) {
    total += f.count;
    REQUIRE(f.theta_bar.has_value());
    // equilibrated sample: slab angle near the global line (0)
    CHECK(std::abs(fold_line_difference(*f.theta_bar)) < 0.1);
    // rho+ ~ rho-: slab |delta| within 3 sigma binomial
    const double n_slab = static_cast<double>(f.count);
    const double delta_count = (f.rho_plus - f.rho_minus) * slab_area;
    CHECK(std::abs(delta_count) <= 3.0 * std::sqrt(n_slab) + 1.0);
  }
  CHECK(total == p.n);
}

TEST_CASE("empty slabs are reported absent") {
  SimParams p;
  p.n = 2;
  p.box_length = 10.0;
  p.radius = 1.0;
  p.dt = 0.01;
  ParticleState st;
  st.x = {0.5, 0.6};
  st.y = {1.0, 2.0};
  st.angle = {0.1, 0.2};
  auto fields = measure_fields(st, p, 10);
  CHECK(fields[0].count == 2);
  CHECK(fields[5].count == 0);
  CHECK_FALSE(fields[5].theta_bar.has_value());
  CHECK(fields[5].rho_plus == 0.0);
}

TEST_SUITE_END();
