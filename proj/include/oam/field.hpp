#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <initializer_list>
#include <span>
#include <string>

#include "oam/errors.hpp"

namespace oam {

// Uniform, cell-centred sampling grid. Sample (i, j) sits at
//   x_i = origin.x + (i - (nx - 1) / 2) * dx,   y_j = origin.y + (j - (ny - 1) / 2) * dy,
// so the sample set is symmetric under reflection through the origin.
template <typename Scalar>
struct BasicGrid {
  using Point = Eigen::Matrix<Scalar, 2, 1>;

  int nx = 512;
  int ny = 512;
  Scalar dx = 0;
  Scalar dy = 0;
  Scalar wavelength = 0;
  Point origin = Point::Zero();

  static BasicGrid square(int n, Scalar window, Scalar wavelength, Point origin = Point::Zero()) {
    BasicGrid g;
    g.nx = n;
    g.ny = n;
    g.dx = window / n;
    g.dy = window / n;
    g.wavelength = wavelength;
    g.origin = origin;
    g.validate();
    return g;
  }

  Scalar x(int i) const { return origin.x() + (i - Scalar(nx - 1) / 2) * dx; }
  Scalar y(int j) const { return origin.y() + (j - Scalar(ny - 1) / 2) * dy; }
  // Fractional sample index of a physical coordinate.
  Scalar index_x(Scalar px) const { return (px - origin.x()) / dx + Scalar(nx - 1) / 2; }
  Scalar index_y(Scalar py) const { return (py - origin.y()) / dy + Scalar(ny - 1) / 2; }

  Scalar width() const { return nx * dx; }
  Scalar height() const { return ny * dy; }
  Scalar cell_area() const { return dx * dy; }
  Scalar wavenumber() const { return Scalar(2 * M_PI) / wavelength; }

  bool contains(const Point& p) const {
    return std::abs(p.x() - origin.x()) <= width() / 2 && std::abs(p.y() - origin.y()) <= height() / 2;
  }

  void validate() const {
    if (nx < 16 || ny < 16 || nx % 2 != 0 || ny % 2 != 0) {
      throw InvalidGridError("grid dimensions must be even and >= 16, got " + std::to_string(nx) + "x" +
                             std::to_string(ny));
    }
    if (!(dx > 0) || !(dy > 0) || !std::isfinite(dx) || !std::isfinite(dy)) {
      throw InvalidGridError("grid pitch must be positive and finite");
    }
    if (!(wavelength > 0) || !std::isfinite(wavelength)) {
      throw InvalidGridError("wavelength must be positive and finite");
    }
  }

  bool compatible(const BasicGrid& other) const {
    auto close = [](Scalar a, Scalar b) { return std::abs(a - b) <= Scalar(1e-12) * std::max(std::abs(a), std::abs(b)); };
    auto close_abs = [&](Scalar a, Scalar b) { return std::abs(a - b) <= Scalar(1e-12) * std::max(width(), height()); };
    return nx == other.nx && ny == other.ny && close(dx, other.dx) && close(dy, other.dy) &&
           close(wavelength, other.wavelength) && close_abs(origin.x(), other.origin.x()) &&
           close_abs(origin.y(), other.origin.y());
  }
};

// Sampled complex scalar field. Values are indexed (ix, iy). Instances are immutable:
// every operation below returns a new field.
template <typename Scalar>
class BasicField {
 public:
  using Complex = std::complex<Scalar>;
  using Values = Eigen::Array<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Grid = BasicGrid<Scalar>;

  BasicField(Grid grid, Values values) : grid_(std::move(grid)), values_(std::move(values)) {
    grid_.validate();
    if (values_.rows() != grid_.nx || values_.cols() != grid_.ny) {
      throw InvalidGridError("field values do not match grid dimensions");
    }
    if (!values_.allFinite()) {
      throw NumericError("field contains non-finite samples");
    }
  }

  static BasicField zeros(const Grid& grid) {
    grid.validate();
    return BasicField(grid, Values::Zero(grid.nx, grid.ny));
  }

  // Samples fn(x, y) -> complex at every grid point.
  template <typename Fn>
  static BasicField sample(const Grid& grid, Fn&& fn) {
    grid.validate();
    Values v(grid.nx, grid.ny);
    for (int j = 0; j < grid.ny; ++j) {
      const Scalar y = grid.y(j);
      for (int i = 0; i < grid.nx; ++i) v(i, j) = Complex(fn(grid.x(i), y));
    }
    return BasicField(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Complex operator()(int i, int j) const { return values_(i, j); }

  BasicField with_values(Values v) const { return BasicField(grid_, std::move(v)); }

  template <typename Fn>
  BasicField map_pointwise(Fn&& fn) const {
    Values v(grid_.nx, grid_.ny);
    for (int j = 0; j < grid_.ny; ++j) {
      const Scalar y = grid_.y(j);
      for (int i = 0; i < grid_.nx; ++i) v(i, j) = fn(grid_.x(i), y, values_(i, j));
    }
    return BasicField(grid_, std::move(v));
  }

 private:
  Grid grid_;
  Values values_;
};

template <typename Scalar>
struct WeightedField {
  std::complex<Scalar> coefficient;
  const BasicField<Scalar>& field;
};

template <typename Scalar>
void require_compatible(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  if (!a.grid().compatible(b.grid())) {
    throw GridMismatchError("fields live on different grids (shape, pitch, wavelength or origin differ)");
  }
}

/// Discrete overlap integral sum(conj(a) * b) dx dy.
template <typename Scalar>
std::complex<Scalar> inner_product(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  require_compatible(a, b);
  return (a.values().conjugate() * b.values()).sum() * a.grid().cell_area();
}

template <typename Scalar>
Scalar power(const BasicField<Scalar>& f) {
  return f.values().abs2().sum() * f.grid().cell_area();
}

template <typename Scalar>
BasicField<Scalar> scale_and_add(std::span<const WeightedField<Scalar>> terms) {
  if (terms.empty()) throw NumericError("scale_and_add needs at least one term");
  const auto& first = terms.front().field;
  typename BasicField<Scalar>::Values acc = terms.front().coefficient * first.values();
  for (std::size_t k = 1; k < terms.size(); ++k) {
    require_compatible(first, terms[k].field);
    acc += terms[k].coefficient * terms[k].field.values();
  }
  return first.with_values(std::move(acc));
}

template <typename Scalar>
BasicField<Scalar> scale_and_add(std::initializer_list<WeightedField<Scalar>> terms) {
  return scale_and_add(std::span<const WeightedField<Scalar>>(terms.begin(), terms.size()));
}

template <typename Scalar>
BasicField<Scalar> operator*(std::complex<Scalar> c, const BasicField<Scalar>& f) {
  return f.with_values(c * f.values());
}

template <typename Scalar>
BasicField<Scalar> operator+(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  require_compatible(a, b);
  return a.with_values(a.values() + b.values());
}

template <typename Scalar>
BasicField<Scalar> operator-(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  require_compatible(a, b);
  return a.with_values(a.values() - b.values());
}

// Pointwise product on a shared grid.
template <typename Scalar>
BasicField<Scalar> multiply(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  require_compatible(a, b);
  return a.with_values(a.values() * b.values());
}

template <typename Scalar>
Scalar max_abs_difference(const BasicField<Scalar>& a, const BasicField<Scalar>& b) {
  require_compatible(a, b);
  return (a.values() - b.values()).abs().maxCoeff();
}

// Intensity-weighted centroid.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 1> centroid(const BasicField<Scalar>& f) {
  const auto& g = f.grid();
  const auto intensity = f.values().abs2().eval();
  const Scalar total = intensity.sum();
  if (!(total > 0)) throw ZeroPowerError("centroid of a zero field");
  Scalar sx = 0, sy = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      sx += intensity(i, j) * g.x(i);
      sy += intensity(i, j) * g.y(j);
    }
  return {sx / total, sy / total};
}

// 1/e^2 intensity radius along x from the second moment: w = 2 sqrt(<(x - xc)^2>).
// Exact for a Gaussian beam.
template <typename Scalar>
Scalar second_moment_waist_x(const BasicField<Scalar>& f) {
  const auto& g = f.grid();
  const auto intensity = f.values().abs2().eval();
  const Scalar cx = centroid(f).x();
  Scalar acc = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) acc += intensity(i, j) * (g.x(i) - cx) * (g.x(i) - cx);
  return 2 * std::sqrt(acc / intensity.sum());
}

template <typename Scalar>
Scalar second_moment_waist_y(const BasicField<Scalar>& f) {
  const auto& g = f.grid();
  const auto intensity = f.values().abs2().eval();
  const Scalar cy = centroid(f).y();
  Scalar acc = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) acc += intensity(i, j) * (g.y(j) - cy) * (g.y(j) - cy);
  return 2 * std::sqrt(acc / intensity.sum());
}

// Bilinear interpolation at a physical point; zero outside the sampled area.
template <typename Scalar>
std::complex<Scalar> sample_bilinear(const BasicField<Scalar>& f, Scalar px, Scalar py) {
  const auto& g = f.grid();
  const Scalar fi = g.index_x(px);
  const Scalar fj = g.index_y(py);
  const int i0 = static_cast<int>(std::floor(fi));
  const int j0 = static_cast<int>(std::floor(fj));
  if (i0 < 0 || j0 < 0 || i0 + 1 >= g.nx || j0 + 1 >= g.ny) return {};
  const Scalar tx = fi - i0;
  const Scalar ty = fj - j0;
  const auto& v = f.values();
  return (1 - tx) * (1 - ty) * v(i0, j0) + tx * (1 - ty) * v(i0 + 1, j0) + (1 - tx) * ty * v(i0, j0 + 1) +
         tx * ty * v(i0 + 1, j0 + 1);
}

namespace detail {
// Keys cubic convolution weights (a = -1/2) for offsets t in [0, 1).
template <typename Scalar>
inline void keys_weights(Scalar t, Scalar w[4]) {
  const Scalar t2 = t * t, t3 = t2 * t;
  w[0] = (-t3 + 2 * t2 - t) / 2;
  w[1] = (3 * t3 - 5 * t2 + 2) / 2;
  w[2] = (-3 * t3 + 4 * t2 + t) / 2;
  w[3] = (t3 - t2) / 2;
}
}  // namespace detail

// Bicubic (Keys) interpolation; zero outside, bilinear in the outermost cell ring.
template <typename Scalar>
std::complex<Scalar> sample_bicubic(const BasicField<Scalar>& f, Scalar px, Scalar py) {
  const auto& g = f.grid();
  const Scalar fi = g.index_x(px);
  const Scalar fj = g.index_y(py);
  const int i0 = static_cast<int>(std::floor(fi));
  const int j0 = static_cast<int>(std::floor(fj));
  if (i0 < 1 || j0 < 1 || i0 + 2 >= g.nx || j0 + 2 >= g.ny) return sample_bilinear(f, px, py);
  Scalar wx[4], wy[4];
  detail::keys_weights(fi - i0, wx);
  detail::keys_weights(fj - j0, wy);
  const auto& v = f.values();
  std::complex<Scalar> acc{};
  for (int b = 0; b < 4; ++b) {
    std::complex<Scalar> row{};
    for (int a = 0; a < 4; ++a) row += wx[a] * v(i0 - 1 + a, j0 - 1 + b);
    acc += wy[b] * row;
  }
  return acc;
}

using Grid = BasicGrid<double>;
using ComplexField = BasicField<double>;
using Complex = std::complex<double>;
using ComplexArray = ComplexField::Values;
using Point = Eigen::Vector2d;

}  // namespace oam
