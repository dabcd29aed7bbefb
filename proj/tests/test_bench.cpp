#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <set>

#include "oam/bench.hpp"

using namespace oam;

namespace {

BenchConfig small_config() {
  BenchConfig c = BenchConfig::reference_defaults();
  c.grid_points = 128;
  c.scan.points = 21;
  return c;
}

PlateModel open_plate() {
  PlateModel p;
  p.aperture_half_width = INFINITY;
  return p;
}

// l = 0, 1 powers of the displaced-fork field by direct polar quadrature (midpoint in r,
// split at the fork radius; trapezoid in angle).
std::pair<double, double> brute_force_superposition(double d, double w, double delta) {
  const double j1 = std::cyl_bessel_j(1.0, delta);
  const int na = 1024;
  double p0 = 0, p1 = 0;
  for (auto [r0, r1] : {std::pair{0.0, d}, std::pair{d, 6 * w}}) {
    const int nr = static_cast<int>(std::ceil((r1 - r0) / (w / 2000)));
    const double h = (r1 - r0) / nr;
    for (int k = 0; k < nr; ++k) {
      const double r = r0 + (k + 0.5) * h;
      std::complex<double> c0{}, c1{};
      for (int a = 0; a < na; ++a) {
        const double t = 2 * M_PI * a / na;
        const double x = r * std::cos(t), y = r * std::sin(t);
        const std::complex<double> u = std::complex<double>(0, j1) * std::polar(1.0, std::atan2(y, x - d)) *
                                       std::sqrt(2 / M_PI) / w * std::exp(-r * r / (w * w));
        c0 += u;
        c1 += u * std::polar(1.0, -t);
      }
      p0 += std::norm(c0 / double(na)) * 2 * M_PI * r * h;
      p1 += std::norm(c1 / double(na)) * 2 * M_PI * r * h;
    }
  }
  return {p0, p1};
}

}  // namespace

TEST_SUITE("bench") {
  TEST_CASE("reference geometry") {
    const BenchConfig c = BenchConfig::reference_defaults();
    CHECK(c.plate_waist() == doctest::Approx(12.5e-6).epsilon(1e-12));
    CHECK(c.source_waist == doctest::Approx(670e-9 * 35e-3 / (M_PI * 12.5e-6)));
    CHECK(c.image_waist() == doctest::Approx(c.source_waist));
    CHECK(std::pow(bessel_j(1, c.cgh1.phase_depth), 2) == doctest::Approx(0.30).epsilon(1e-9));
    CHECK(c.cgh2.charge * c.cgh2.order == -1);
    CHECK(c.scan.from == doctest::Approx(-3 * c.source_waist));
  }

  TEST_CASE("config invariants") {
    BenchConfig c = small_config();
    c.scan.points = 2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.detector.counts_scale = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = small_config();
    c.source_waist = -1;
    CHECK_THROWS_AS(Bench{c}, ConfigError);
  }

  TEST_CASE("visibility") {
    const std::vector<double> a{1, 0, 1}, b{3, 3, 3}, z{0, 0}, neg{1, -1};
    CHECK(visibility(a) == 1);
    CHECK(visibility(b) == 0);
    CHECK(visibility(std::vector<double>{4, 1}) == doctest::Approx(0.6));
    CHECK_THROWS_AS(visibility(std::vector<double>{}), NumericError);
    CHECK_THROWS_AS(visibility(z), NumericError);
    CHECK_THROWS_AS(visibility(neg), NumericError);
  }

  TEST_CASE("quadratic null interpolation") {
    std::vector<double> x, y;
    for (int k = 0; k < 11; ++k) {
      x.push_back(0.1 * k);
      y.push_back(3 * (x.back() - 0.437) * (x.back() - 0.437) + 0.2);
    }
    CHECK(interpolate_minimum(x, y) == doctest::Approx(0.437).epsilon(1e-12));
  }

  TEST_CASE("seeds and workers") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t p = 0; p < 50; ++p)
      for (std::uint64_t s = 0; s < 50; ++s) seen.insert(derive_seed(1, p, s));
    CHECK(seen.size() == 2500);
    CHECK(derive_seed(5, 3, 2) == derive_seed(5, 3, 2));
    CHECK(derive_seed(5, 3, 2) != derive_seed(6, 3, 2));
    setenv("OAM_BENCH_THREADS", "2", 1);
    CHECK(worker_threads(8) == 2);
    CHECK(worker_threads(1) == 1);
    unsetenv("OAM_BENCH_THREADS");
    CHECK(worker_threads(3) == 3);
    CHECK(worker_threads(0) >= 1);
  }

  TEST_CASE("superposition weights") {
    const double w = 1e-3;
    auto s0 = prepare_superposition(0, w);
    CHECK(s0.a == doctest::Approx(0).epsilon(1e-3));
    CHECK(s0.b == doctest::Approx(1).epsilon(1e-3));
    auto far = prepare_superposition(1000 * w, w);
    CHECK(std::abs(far.a - 1) < 1e-3);
    CHECK(std::abs(far.b) < 1e-3);
    auto inf = prepare_superposition(INFINITY, w);
    CHECK(inf.a == 1);
    CHECK(inf.b == 0);
    double prev = -1;
    for (double d : {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0}) {
      const auto s = prepare_superposition(d * w, w);
      CHECK(s.a >= prev);
      CHECK(s.a * s.a + s.b * s.b == doctest::Approx(1).epsilon(1e-14));
      prev = s.a;
    }
    CHECK_THROWS_AS(prepare_superposition(-1e-4, w), NumericError);
  }

  TEST_CASE("superposition weights against brute-force polar quadrature") {
    const double w = 1e-3, d = w / 2, delta = 1.5;
    const auto s = prepare_superposition(d, w, delta);
    const auto [p0, p1] = brute_force_superposition(d, w, delta);
    CHECK(std::abs(s.a - std::sqrt(p0 / (p0 + p1))) < 1e-6);
    CHECK(std::abs(s.b - std::sqrt(p1 / (p0 + p1))) < 1e-6);
    const double j1 = std::cyl_bessel_j(1.0, delta);
    CHECK(s.residual == doctest::Approx(1 - (p0 + p1) / (j1 * j1)).epsilon(1e-4));
  }

  TEST_CASE("no-plate scan of |0>: central dip and symmetry") {
    BenchConfig c = small_config();
    c.cgh1.displacement = Point::Constant(INFINITY);
    const auto r = run_scan(c);
    CHECK(r.counts[10] / r.max_counts < 1e-4);
    for (int k = 0; k < 21; ++k) CHECK(std::abs(r.counts[k] - r.counts[20 - k]) <= 1e-6 * r.max_counts);
    REQUIRE(r.null_position.has_value());
    CHECK(std::abs(*r.null_position) < 1e-9);
  }

  TEST_CASE("counts scale linearly and threads do not matter") {
    BenchConfig c = small_config();
    c.threads = 1;
    const auto a = run_scan(c);
    c.threads = 4;
    const auto b = run_scan(c);
    CHECK(a.counts == b.counts);
    c.detector.counts_scale *= 3;
    const auto s = run_scan(c);
    for (int k = 0; k < 21; ++k) CHECK(s.counts[k] == doctest::Approx(3 * a.counts[k]).epsilon(1e-13));
    CHECK(a.max_position == doctest::Approx(0).epsilon(1e-12));
  }

  TEST_CASE("shot counts equal the explicit pipeline") {
    BenchConfig c = small_config();
    c.cgh1.displacement = Point(0.5 * c.source_waist, 0);
    PlateModel p = open_plate();
    p.coherent = false;
    c.plate = p;
    const Bench bench(c);
    CHECK_THROWS_AS(bench.shot_counts(0, std::nullopt), MissingSeedError);

    const double dx = 0.3 * c.source_waist;
    const std::uint64_t seed = 42;
    const auto src = lg_mode(c.source, c.source_waist, bench.cgh_grid());
    auto u = apply_hologram_order(src, c.cgh1);
    u = relay_2f(u, c.relay_in.focal, c.relay_in.front, c.relay_in.back, bench.plate_grid());
    u = apply_plate(u, p, seed);
    u = relay_2f(u, c.relay_out.focal, c.relay_out.front, c.relay_out.back, bench.cgh_grid());
    HologramSpec h2 = c.cgh2;
    h2.displacement = Point(dx, 0);
    u = apply_hologram_order(u, h2);
    const double expected =
        c.detector.counts_scale * std::norm(inner_product(fiber_mode(c.fiber_waist, bench.cgh_grid()), u)) / power(src);
    CHECK(bench.shot_counts(dx, seed) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(run_shot(c, dx, seed) == bench.shot_counts(dx, seed));
  }

  TEST_CASE("coherent plate scales the |0> curve by T0") {
    BenchConfig c = small_config();
    c.cgh1.displacement = Point::Constant(INFINITY);
    const auto bare = run_scan(c);
    c.plate = open_plate();
    const auto with = run_scan(c);
    CHECK(with.max_counts / bare.max_counts == doctest::Approx(0.0227).epsilon(1e-3));
  }

  TEST_CASE("equal channel transmissions keep the maximum in place") {
    BenchConfig c = small_config();
    c.cgh1.displacement = Point(0.5 * c.source_waist, 0);
    const auto bare = run_scan(c);
    PlateModel p = open_plate();
    p.channel_transmission = {{0, 0.02}, {1, 0.02}, {-1, 0.02}};
    p.default_transmission = 0.02;
    c.plate = p;
    const auto with = run_scan(c);
    const double step = (c.scan.to - c.scan.from) / (c.scan.points - 1);
    CHECK(std::abs(with.max_position - bare.max_position) <= step * (1 + 1e-9));
  }

  TEST_CASE("Poisson detector") {
    BenchConfig c = small_config();
    c.detector.poisson_noise = true;
    const auto a = run_scan(c);
    const auto b = run_scan(c);
    CHECK(a.counts == b.counts);
    c.detector.poisson_noise = false;
    const auto mean = run_scan(c);
    for (int k = 0; k < 21; ++k) {
      CHECK(a.counts[k] == std::round(a.counts[k]));
      CHECK(std::abs(a.counts[k] - mean.counts[k]) < 6 * std::sqrt(mean.counts[k]) + 1);
    }
  }
}
