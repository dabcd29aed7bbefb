#include "oam/optics.hpp"

#include <cmath>
#include <iostream>
#include <mutex>

#include "oam/fft.hpp"

namespace oam {
namespace {

std::mutex& warning_mutex() {
  static std::mutex m;
  return m;
}

std::function<void(const std::string&)>& warning_handler() {
  static std::function<void(const std::string&)> h = [](const std::string& msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return h;
}

Complex i_pow(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1, 0};
    case 1: return {0, 1};
    case 2: return {-1, 0};
    default: return {0, -1};
  }
}

}  // namespace

void set_warning_handler(std::function<void(const std::string&)> handler) {
  std::lock_guard lock(warning_mutex());
  warning_handler() = std::move(handler);
}

void warn(const std::string& message) {
  std::lock_guard lock(warning_mutex());
  if (warning_handler()) warning_handler()(message);
}

double bessel_j(int order, double x) {
  const int n = std::abs(order);
  double v = x >= 0 ? std::cyl_bessel_j(static_cast<double>(n), x)
                    : std::cyl_bessel_j(static_cast<double>(n), -x) * (n % 2 ? -1.0 : 1.0);
  if (order < 0 && (n % 2)) v = -v;
  return v;
}

double first_order_peak_phase_depth() {
  // First zero of J_1'(x) = J_0(x) - J_1(x) / x.
  static const double peak = [] {
    auto d = [](double x) { return bessel_j(0, x) - bessel_j(1, x) / x; };
    double lo = 1.5, hi = 2.2;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double mid = 0.5 * (lo + hi);
      (d(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return peak;
}

double max_first_order_efficiency() {
  const double j = bessel_j(1, first_order_peak_phase_depth());
  return j * j;
}

double calibrate_phase_depth(double target) {
  const double peak = max_first_order_efficiency();
  if (!(target >= 0) || target > peak) {
    throw UnreachableEfficiencyError("first-order efficiency " + std::to_string(target) +
                                     " is outside [0, " + std::to_string(peak) + "]");
  }
  if (target == 0) return 0;
  double lo = 0, hi = first_order_peak_phase_depth();
  auto eff = [](double d) {
    const double j = bessel_j(1, d);
    return j * j;
  };
  for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
    const double mid = 0.5 * (lo + hi);
    (eff(mid) < target ? lo : hi) = mid;
  }
  const double delta = 0.5 * (lo + hi);
  if (std::abs(eff(delta) - target) >= 1e-9) throw NoConvergenceError("phase-depth calibration did not converge");
  return delta;
}

Complex hologram_order_factor(const HologramSpec& spec, double x, double y) {
  const Complex amp = i_pow(spec.order) * bessel_j(spec.order, spec.phase_depth);
  const int winding = spec.order * spec.charge;
  if (winding == 0 || !spec.displacement.allFinite()) return amp;
  const double rx = x - spec.displacement.x();
  const double ry = y - spec.displacement.y();
  if (rx == 0 && ry == 0) return {};
  return amp * std::polar(1.0, winding * std::atan2(ry, rx));
}

ComplexField apply_hologram_order(const ComplexField& f, const HologramSpec& spec) {
  if (!(spec.phase_depth >= 0)) throw NumericError("hologram phase depth must be non-negative");
  return f.map_pointwise([&](double x, double y, Complex u) { return u * hologram_order_factor(spec, x, y); });
}

ComplexField apply_hologram_full_grating(const ComplexField& f, const HologramSpec& spec) {
  const auto& g = f.grid();
  if (!(spec.carrier_period > 2 * g.dx)) throw NumericError("carrier period must exceed two grid pitches");
  const double kg = 2 * M_PI / spec.carrier_period;
  if ((std::abs(spec.order) + 0.5) * kg > M_PI / g.dx) throw NumericError("selected order lies beyond Nyquist");
  const bool has_fork = spec.displacement.allFinite() && spec.charge != 0;
  const double x0 = spec.displacement.allFinite() ? spec.displacement.x() : 0.0;
  const double y0 = spec.displacement.allFinite() ? spec.displacement.y() : 0.0;

  ComplexArray tilted(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double rx = g.x(i) - x0, ry = g.y(j) - y0;
      const double fork = has_fork ? spec.charge * std::atan2(ry, rx) : 0.0;
      const double theta = kg * rx + fork;
      // grating transmission times the conjugate carrier of order m
      tilted(i, j) = f(i, j) * std::polar(1.0, spec.phase_depth * std::cos(theta) - spec.order * kg * rx);
    }
  ComplexArray spectrum = fft2(tilted);
  for (int i = 0; i < g.nx; ++i) {
    if (std::abs(fft_angular_frequency(i, g.nx, g.dx)) >= kg / 2) spectrum.row(i).setZero();
  }
  return f.with_values(ifft2(spectrum));
}

ComplexField apply_lens(const ComplexField& f, double focal) {
  if (focal == 0) throw NumericError("focal length must be non-zero");
  if (!std::isfinite(focal)) return f;
  const double a = M_PI / (f.grid().wavelength * focal);
  return f.map_pointwise([a](double x, double y, Complex u) { return u * std::polar(1.0, -a * (x * x + y * y)); });
}

ComplexField angular_spectrum(const ComplexField& f, double distance) {
  const auto& g = f.grid();
  const double k = g.wavenumber();
  ComplexArray spectrum = fft2(f.values());
  for (int j = 0; j < g.ny; ++j) {
    const double ky = fft_angular_frequency(j, g.ny, g.dy);
    for (int i = 0; i < g.nx; ++i) {
      const double kx = fft_angular_frequency(i, g.nx, g.dx);
      const double kz2 = k * k - kx * kx - ky * ky;
      spectrum(i, j) = kz2 > 0 ? spectrum(i, j) * std::polar(1.0, distance * std::sqrt(kz2)) : Complex{};
    }
  }
  return f.with_values(ifft2(spectrum));
}

bool propagation_may_alias(const ComplexField& f, double distance) {
  const auto& g = f.grid();
  const double p = power(f);
  if (!(p > 0) || distance == 0) return false;
  const ComplexArray spectrum = fft2(f.values());
  double s = 0, skx = 0, sky = 0;
  for (int j = 0; j < g.ny; ++j) {
    const double ky = fft_angular_frequency(j, g.ny, g.dy);
    for (int i = 0; i < g.nx; ++i) {
      const double kx = fft_angular_frequency(i, g.nx, g.dx);
      const double w = std::norm(spectrum(i, j));
      s += w;
      skx += w * kx * kx;
      sky += w * ky * ky;
    }
  }
  const double k = g.wavenumber();
  const double spread_x = 2 * std::abs(distance) * std::sqrt(skx / s) / k;
  const double spread_y = 2 * std::abs(distance) * std::sqrt(sky / s) / k;
  const Point c = centroid(f);
  const double half_x = std::abs(c.x() - g.origin.x()) + 1.5 * second_moment_waist_x(f) + 2 * spread_x;
  const double half_y = std::abs(c.y() - g.origin.y()) + 1.5 * second_moment_waist_y(f) + 2 * spread_y;
  return half_x > g.width() / 2 || half_y > g.height() / 2;
}

ComplexField propagate(const ComplexField& f, double distance) {
  if (!(distance >= 0)) throw NumericError("propagation distance must be non-negative");
  if (propagation_may_alias(f, distance)) {
    warn("angular-spectrum propagation over " + std::to_string(distance) + " m may wrap around the window");
  }
  return angular_spectrum(f, distance);
}

ComplexField apply_aperture(const ComplexField& f, double half_width, ApertureShape shape) {
  if (!(half_width > 0)) throw NumericError("aperture half-width must be positive");
  if (std::isinf(half_width)) return f;
  return f.map_pointwise([&](double x, double y, Complex u) -> Complex {
    const bool inside = shape == ApertureShape::Square ? (std::abs(x) <= half_width && std::abs(y) <= half_width)
                                                      : (x * x + y * y <= half_width * half_width);
    return inside ? u : Complex{};
  });
}

namespace {

// Kernel exp(-i 2 pi x'_p x_i / (lambda f)) between two coordinate sets.
Eigen::MatrixXcd fourier_kernel(const Eigen::VectorXd& out, const Eigen::VectorXd& in, double scale) {
  Eigen::MatrixXcd m(out.size(), in.size());
  for (Eigen::Index q = 0; q < in.size(); ++q)
    for (Eigen::Index p = 0; p < out.size(); ++p) m(p, q) = std::polar(1.0, -scale * out[p] * in[q]);
  return m;
}

}  // namespace

ComplexField fourier_relay(const ComplexField& field, double focal, const Grid& out_grid) {
  const auto& g = field.grid();
  if (!(std::isfinite(focal) && focal != 0)) throw NumericError("relay focal length must be finite and non-zero");
  if (std::abs(out_grid.wavelength - g.wavelength) > 1e-12 * g.wavelength) {
    throw GridMismatchError("relay output grid has a different wavelength");
  }
  out_grid.validate();
  Eigen::VectorXd xin(g.nx), yin(g.ny), xout(out_grid.nx), yout(out_grid.ny);
  for (int i = 0; i < g.nx; ++i) xin[i] = g.x(i);
  for (int j = 0; j < g.ny; ++j) yin[j] = g.y(j);
  for (int i = 0; i < out_grid.nx; ++i) xout[i] = out_grid.x(i);
  for (int j = 0; j < out_grid.ny; ++j) yout[j] = out_grid.y(j);
  const double scale = 2 * M_PI / (g.wavelength * focal);
  const Eigen::MatrixXcd ax = fourier_kernel(xout, xin, scale);
  const Eigen::MatrixXcd ay = fourier_kernel(yout, yin, scale);
  const Complex pre = g.cell_area() / (Complex(0, 1) * g.wavelength * focal);
  Eigen::MatrixXcd out = ax * field.values().matrix() * ay.transpose();
  return ComplexField(out_grid, (pre * out.array()).eval());
}

ComplexField relay_2f(const ComplexField& field, double focal, double front, double back, const Grid& out_grid) {
  ComplexField in = front == focal ? field : angular_spectrum(field, front - focal);
  ComplexField out = fourier_relay(in, focal, out_grid);
  return back == focal ? out : angular_spectrum(out, back - focal);
}

ComplexField apply_element(const ComplexField& f, const BenchElement& element) {
  return std::visit(
      [&](const auto& e) -> ComplexField {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, Hologram>) return apply_hologram_order(f, e.spec);
        else if constexpr (std::is_same_v<T, ThinLens>) return apply_lens(f, e.focal);
        else if constexpr (std::is_same_v<T, FreeSpace>) return propagate(f, e.distance);
        else return apply_aperture(f, e.half_width, e.shape);
      },
      element);
}

ComplexField apply_elements(ComplexField f, const std::vector<BenchElement>& elements) {
  for (const auto& e : elements) f = apply_element(f, e);
  return f;
}

}  // namespace oam
