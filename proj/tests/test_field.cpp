#include <doctest.h>

#include <cmath>

#include "oam/field.hpp"

using namespace oam;

namespace {

ComplexField gaussian(const Grid& g, double w, double x0 = 0, double y0 = 0) {
  return ComplexField::sample(g, [&](double x, double y) {
    const double r2 = (x - x0) * (x - x0) + (y - y0) * (y - y0);
    return Complex(std::exp(-r2 / (w * w)), 0);
  });
}

}  // namespace

TEST_SUITE("field") {
  TEST_CASE("cell-centred symmetric coordinates") {
    const Grid g = Grid::square(64, 6.4e-3, 670e-9);
    CHECK(g.dx == doctest::Approx(1e-4));
    CHECK(g.x(0) == doctest::Approx(-g.x(63)));
    CHECK(g.x(32) - g.x(31) == doctest::Approx(g.dx));
    CHECK(g.x(32) == doctest::Approx(0.5e-4));
    CHECK(g.index_x(g.x(17)) == doctest::Approx(17));
    CHECK(g.width() == doctest::Approx(6.4e-3));
  }

  TEST_CASE("invalid grids are rejected") {
    CHECK_THROWS_AS(Grid::square(63, 1e-3, 670e-9), InvalidGridError);
    CHECK_THROWS_AS(Grid::square(8, 1e-3, 670e-9), InvalidGridError);
    CHECK_THROWS_AS(Grid::square(64, -1e-3, 670e-9), InvalidGridError);
    CHECK_THROWS_AS(Grid::square(64, 1e-3, 0), InvalidGridError);
  }

  TEST_CASE("non-finite samples are rejected") {
    const Grid g = Grid::square(16, 1e-3, 670e-9);
    CHECK_THROWS_AS(ComplexField::sample(g, [](double, double) { return Complex(NAN, 0); }), NumericError);
  }

  TEST_CASE("power of a sampled Gaussian matches the continuous integral") {
    const Grid g = Grid::square(256, 8e-3, 670e-9);
    const double w = 1e-3;
    // \int exp(-2 r^2 / w^2) d^2r = pi w^2 / 2
    CHECK(power(gaussian(g, w)) == doctest::Approx(M_PI * w * w / 2).epsilon(1e-10));
  }

  TEST_CASE("inner product is conjugate-linear in the first slot") {
    const Grid g = Grid::square(64, 8e-3, 670e-9);
    const auto a = gaussian(g, 1e-3), b = gaussian(g, 1.3e-3, 2e-4);
    const Complex c(0.3, -1.2);
    const Complex lhs = inner_product(c * a, b);
    CHECK(std::abs(lhs - std::conj(c) * inner_product(a, b)) < 1e-15);
    CHECK(std::abs(inner_product(a, b) - std::conj(inner_product(b, a))) < 1e-18);
  }

  TEST_CASE("fields on different grids cannot be combined") {
    const auto a = ComplexField::zeros(Grid::square(32, 1e-3, 670e-9));
    const auto b = ComplexField::zeros(Grid::square(32, 2e-3, 670e-9));
    const auto c = ComplexField::zeros(Grid::square(32, 1e-3, 800e-9));
    CHECK_THROWS_AS(inner_product(a, b), GridMismatchError);
    CHECK_THROWS_AS(a + c, GridMismatchError);
    CHECK_THROWS_AS(scale_and_add<double>({{1.0, a}, {1.0, b}}), GridMismatchError);
  }

  TEST_CASE("scale_and_add") {
    const Grid g = Grid::square(32, 4e-3, 670e-9);
    const auto a = gaussian(g, 1e-3), b = gaussian(g, 5e-4);
    const auto s = scale_and_add<double>({{2.0, a}, {Complex(0, 1), b}});
    CHECK(std::abs(s(7, 9) - (2.0 * a(7, 9) + Complex(0, 1) * b(7, 9))) < 1e-15);
    CHECK(max_abs_difference(a - a, ComplexField::zeros(g)) == 0);
  }

  TEST_CASE("centroid and second-moment waist of a displaced Gaussian") {
    const Grid g = Grid::square(256, 10e-3, 670e-9);
    const double w = 8e-4;
    const auto f = gaussian(g, w, 1e-3, -5e-4);
    const Point c = centroid(f);
    CHECK(c.x() == doctest::Approx(1e-3).epsilon(1e-9));
    CHECK(c.y() == doctest::Approx(-5e-4).epsilon(1e-9));
    // |u|^2 = exp(-2 r^2 / w^2) has <x^2> = w^2 / 4
    CHECK(second_moment_waist_x(f) == doctest::Approx(w).epsilon(1e-8));
    CHECK(second_moment_waist_y(f) == doctest::Approx(w).epsilon(1e-8));
  }

  TEST_CASE("interpolation reproduces low-order polynomials") {
    const Grid g = Grid::square(32, 3.2e-3, 670e-9);
    auto lin = ComplexField::sample(g, [](double x, double y) { return Complex(1 + 300 * x - 700 * y, 2e2 * y); });
    auto quad = ComplexField::sample(g, [](double x, double y) { return Complex(1e6 * x * x - 4e5 * x * y, 3e5 * y * y); });
    const double px = 2.37e-4, py = -4.11e-4;
    CHECK(std::abs(sample_bilinear(lin, px, py) - Complex(1 + 300 * px - 700 * py, 2e2 * py)) < 1e-12);
    CHECK(std::abs(sample_bicubic(quad, px, py) - Complex(1e6 * px * px - 4e5 * px * py, 3e5 * py * py)) < 1e-9);
    CHECK(std::abs(sample_bicubic(quad, g.x(5), g.y(11)) - quad(5, 11)) < 1e-12);
  }
}
