#include <doctest.h>

#include <cmath>

#include "oam/modes.hpp"

using namespace oam;

TEST_SUITE("modes") {
  TEST_CASE("LG modes are unit normalised on a fine grid") {
    const double w = 1e-3;
    const Grid g = Grid::square(256, 10 * w, 670e-9);
    for (LGIndex m : {LGIndex{0, 0}, LGIndex{0, 1}, LGIndex{0, -3}, LGIndex{1, 0}, LGIndex{2, 2}}) {
      CAPTURE(m.p);
      CAPTURE(m.l);
      CHECK(power(lg_mode(m, w, g)) == doctest::Approx(1).epsilon(1e-9));
    }
  }

  TEST_CASE("explicit LG_{1,1} expression") {
    // L_1^1(t) = 2 - t, C = sqrt(2 * 1! / (pi * 2!)) = 1 / sqrt(pi)
    const double w = 2e-3, x = 7e-4, y = -1.1e-3;
    const double r = std::hypot(x, y), t = 2 * r * r / (w * w);
    const Complex expected = 1 / std::sqrt(M_PI) / w * (std::sqrt(2.0) * r / w) * (2 - t) * std::exp(-r * r / (w * w)) *
                             std::polar(1.0, std::atan2(y, x));
    CHECK(std::abs(lg_amplitude({1, 1}, w, x, y) - expected) < 1e-12 * std::abs(expected) + 1e-15);
  }

  TEST_CASE("radial and azimuthal orthogonality") {
    const double w = 1e-3;
    const Grid g = Grid::square(256, 10 * w, 670e-9);
    CHECK(std::abs(inner_product(lg_mode({0, 1}, w, g), lg_mode({1, 1}, w, g))) < 1e-9);
    CHECK(std::abs(inner_product(lg_mode({0, 0}, w, g), lg_mode({0, 2}, w, g))) < 1e-9);
  }

  TEST_CASE("undersampled waist") {
    const Grid g = Grid::square(64, 6.4e-3, 670e-9);
    CHECK_THROWS_AS(lg_mode({0, 0}, 3e-4, g), UndersampledWaistError);
    CHECK_NOTHROW(lg_mode({0, 0}, 4e-4, g));
  }

  TEST_CASE("fiber mode is LG00") {
    const Grid g = Grid::square(64, 8e-3, 670e-9);
    CHECK(max_abs_difference(fiber_mode(1e-3, g), lg_mode({0, 0}, 1e-3, g)) == 0);
  }

  TEST_CASE("Gauss-Legendre exactness") {
    std::vector<double> x, wt;
    gauss_legendre(8, -1, 3, x, wt);
    double s = 0;
    for (std::size_t k = 0; k < x.size(); ++k) s += wt[k] * std::pow(x[k], 15);
    CHECK(s == doctest::Approx((std::pow(3.0, 16) - 1) / 16).epsilon(1e-13));
  }

  TEST_CASE("OAM spectrum of pure and mixed modes") {
    const double w = 1e-3;
    const Grid g = Grid::square(256, 8 * w, 670e-9);
    const auto s1 = oam_spectrum(lg_mode({0, 1}, w, g), Point::Zero(), -4, 4);
    CHECK(s1.fraction(1) >= 0.999);
    CHECK(s1.dominant() == 1);
    const auto mix = scale_and_add<double>({{std::sqrt(0.25), lg_mode({0, 2}, w, g)}, {std::sqrt(0.75), lg_mode({0, -1}, w, g)}});
    const auto s2 = oam_spectrum(mix, Point::Zero(), -4, 4);
    CHECK(s2.fraction(2) / (s2.fraction(2) + s2.fraction(-1)) == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(s2.captured() > 0.998);
  }

  TEST_CASE("analytic decomposition recovers a vortex channel") {
    const double w = 1e-3;
    auto fn = [&](double x, double y) { return lg_amplitude({0, 3}, w, x, y); };
    const auto d = decompose_azimuthal(fn, Point::Zero(), 6 * w, {}, 64, 32);
    CHECK(d.channel_power(3) == doctest::Approx(1).epsilon(1e-10));
    CHECK(d.channel_power(2) < 1e-20);
    CHECK(d.channel_power(-3) < 1e-20);
  }

  TEST_CASE("channel_field reconstructs a mode") {
    const double w = 1e-3;
    const Grid g = Grid::square(128, 8 * w, 670e-9);
    const auto f = lg_mode({0, 1}, w, g);
    PolarSampling ps;
    ps.radial = 128;
    ps.interpolation = Interpolation::Bicubic;
    const auto d = decompose_azimuthal(f, Point::Zero(), ps);
    const auto back = d.channel_field(1, g);
    CHECK(std::abs(inner_product(f, back)) == doctest::Approx(1).epsilon(2e-3));
  }

  TEST_CASE("LG coefficients and coupling efficiency") {
    const double w = 1e-3;
    const Grid g = Grid::square(128, 8 * w, 670e-9);
    const auto c = lg_coefficients(lg_mode({0, -2}, w, g), w, Point::Zero(), -3, 3);
    CHECK(std::abs(c.at(-2)) == doctest::Approx(1).epsilon(1e-9));
    CHECK(std::abs(c.at(0)) < 1e-9);
    const auto fib = fiber_mode(w, g);
    CHECK(coupling_efficiency(fib, fib) == doctest::Approx(1).epsilon(1e-12));
    CHECK_THROWS_AS(coupling_efficiency(ComplexField::zeros(g), fib), ZeroPowerError);
  }

  TEST_CASE("displaced Gaussian coupling") {
    // |<G(0)|G(s)>|^2 = exp(-s^2 / w^2) for equal waists
    const double w = 1e-3, s = 6e-4;
    const Grid g = Grid::square(256, 10 * w, 670e-9);
    const auto a = fiber_mode(w, g), b = fiber_mode(w, g, Point(s, 0));
    CHECK(coupling_efficiency(b, a) == doctest::Approx(std::exp(-s * s / (w * w))).epsilon(1e-9));
  }

  TEST_CASE("center outside the grid") {
    const Grid g = Grid::square(64, 8e-3, 670e-9);
    CHECK_THROWS_AS(oam_spectrum(fiber_mode(1e-3, g), Point(1, 0), -1, 1), CenterOutOfGridError);
  }
}
