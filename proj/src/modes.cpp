#include "oam/modes.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>

namespace oam {

double ModeSpectrum::captured() const {
  double s = 0;
  for (const auto& [l, p] : power) s += p;
  return s;
}

int ModeSpectrum::dominant() const {
  int best = 0;
  double best_p = -1;
  for (const auto& [l, p] : power) {
    if (p > best_p) {
      best_p = p;
      best = l;
    }
  }
  return best;
}

AzimuthalDecomposition::AzimuthalDecomposition(Point center, std::vector<double> radii, std::vector<double> weights,
                                               ComplexArray coefficients, bool uniform_radii)
    : center_(std::move(center)),
      radii_(std::move(radii)),
      weights_(std::move(weights)),
      coefficients_(std::move(coefficients)),
      uniform_(uniform_radii),
      max_radius_(0) {
  if (uniform_ && radii_.size() >= 1) {
    const double dr = radii_.size() > 1 ? radii_[1] - radii_[0] : 2 * radii_[0];
    max_radius_ = radii_.back() + dr / 2;
  } else if (!radii_.empty()) {
    max_radius_ = radii_.back();
  }
}

Complex AzimuthalDecomposition::harmonic(int k, int l) const {
  const int na = azimuthal_samples();
  return coefficients_(k, ((l % na) + na) % na);
}

double AzimuthalDecomposition::channel_power(int l) const {
  double acc = 0;
  for (int k = 0; k < radial_samples(); ++k) acc += std::norm(harmonic(k, l)) * weights_[k];
  return 2 * M_PI * acc;
}

ComplexField AzimuthalDecomposition::channel_field(int l, const Grid& grid) const {
  if (!uniform_) throw NumericError("channel recomposition needs uniformly spaced radii");
  const int nr = radial_samples();
  const double dr = max_radius_ / nr;
  const double parity = (l % 2 == 0) ? 1.0 : -1.0;

  // Radial samples extended to negative radius via c_l(-r) = (-1)^l c_l(r), zero past the edge.
  auto sample = [&](int k) -> Complex {
    if (k >= nr) return {};
    if (k < 0) return parity * harmonic(-k - 1, l);
    return harmonic(k, l);
  };

  return ComplexField::sample(grid, [&](double x, double y) -> Complex {
    const double rx = x - center_.x();
    const double ry = y - center_.y();
    const double r = std::hypot(rx, ry);
    if (r >= max_radius_) return {};
    const double t = r / dr - 0.5;
    const int k0 = static_cast<int>(std::floor(t));
    double w[4];
    detail::keys_weights(t - k0, w);
    Complex c{};
    for (int a = 0; a < 4; ++a) c += w[a] * sample(k0 - 1 + a);
    if (l == 0) return c;
    return c * std::polar(1.0, l * std::atan2(ry, rx));
  });
}

namespace {

ComplexArray angular_fft(const ComplexArray& samples) {
  Eigen::FFT<double> fft;
  const int nr = static_cast<int>(samples.rows());
  const int na = static_cast<int>(samples.cols());
  ComplexArray out(nr, na);
  std::vector<Complex> in(na), res(na);
  for (int k = 0; k < nr; ++k) {
    for (int j = 0; j < na; ++j) in[j] = samples(k, j);
    fft.fwd(res, in);
    for (int j = 0; j < na; ++j) out(k, j) = res[j] / static_cast<double>(na);
  }
  return out;
}

}  // namespace

AzimuthalDecomposition decompose_azimuthal(const ComplexField& f, const Point& center, const PolarSampling& s) {
  const auto& g = f.grid();
  if (!g.contains(center)) throw CenterOutOfGridError("decomposition centre lies outside the grid");
  if (s.radial < 2 || s.azimuthal < 4) throw NumericError("polar sampling too coarse");
  const double radius = s.radius > 0 ? s.radius : std::min(g.width(), g.height()) / 2;
  const int nr = s.radial;
  const int na = s.azimuthal;
  const double dr = radius / nr;

  std::vector<double> radii(nr), weights(nr);
  ComplexArray samples(nr, na);
  std::vector<double> cs(na), sn(na);
  for (int j = 0; j < na; ++j) {
    const double th = 2 * M_PI * j / na;
    cs[j] = std::cos(th);
    sn[j] = std::sin(th);
  }
  for (int k = 0; k < nr; ++k) {
    const double r = (k + 0.5) * dr;
    radii[k] = r;
    weights[k] = r * dr;
    for (int j = 0; j < na; ++j) {
      const double px = center.x() + r * cs[j];
      const double py = center.y() + r * sn[j];
      samples(k, j) = s.interpolation == Interpolation::Bilinear ? sample_bilinear(f, px, py)
                                                                 : sample_bicubic(f, px, py);
    }
  }
  return AzimuthalDecomposition(center, std::move(radii), std::move(weights), angular_fft(samples), true);
}

AzimuthalDecomposition decompose_azimuthal(const std::function<Complex(double, double)>& fn, const Point& center,
                                           double radius, std::vector<double> breakpoints, int nodes_per_panel,
                                           int azimuthal) {
  std::vector<double> edges{0.0};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double b : breakpoints)
    if (b > edges.back() && b < radius) edges.push_back(b);
  edges.push_back(radius);

  std::vector<double> radii, weights;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    std::vector<double> n, w;
    gauss_legendre(nodes_per_panel, edges[p], edges[p + 1], n, w);
    for (std::size_t q = 0; q < n.size(); ++q) {
      radii.push_back(n[q]);
      weights.push_back(w[q] * n[q]);
    }
  }
  const int nr = static_cast<int>(radii.size());
  ComplexArray samples(nr, azimuthal);
  for (int k = 0; k < nr; ++k)
    for (int j = 0; j < azimuthal; ++j) {
      const double th = 2 * M_PI * j / azimuthal;
      samples(k, j) = fn(center.x() + radii[k] * std::cos(th), center.y() + radii[k] * std::sin(th));
    }
  return AzimuthalDecomposition(center, std::move(radii), std::move(weights), angular_fft(samples), false);
}

Complex lg_amplitude(const LGIndex& index, double waist, double x, double y) {
  const int al = std::abs(index.l);
  const double r2 = (x * x + y * y) / (waist * waist);
  const double norm = std::sqrt(2.0 * std::tgamma(index.p + 1.0) / (M_PI * std::tgamma(index.p + al + 1.0))) / waist;
  const double radial = norm * std::pow(2.0 * r2, 0.5 * al) * std::assoc_laguerre(index.p, al, 2.0 * r2) *
                        std::exp(-r2);
  if (index.l == 0) return radial;
  return std::polar(radial, index.l * std::atan2(y, x));
}

ComplexField lg_mode(const LGIndex& index, double waist, const Grid& grid, const Point& center) {
  if (index.p < 0) throw NumericError("LG radial index must be non-negative");
  if (!(waist > 0)) throw UndersampledWaistError("waist must be positive");
  if (waist < 4 * std::max(grid.dx, grid.dy)) {
    throw UndersampledWaistError("waist is below four grid pitches");
  }
  return ComplexField::sample(grid, [&](double x, double y) {
    return lg_amplitude(index, waist, x - center.x(), y - center.y());
  });
}

ComplexField fiber_mode(double waist, const Grid& grid, const Point& center) {
  return lg_mode({0, 0}, waist, grid, center);
}

ModeSpectrum oam_spectrum(const AzimuthalDecomposition& d, int l_min, int l_max, double total_power) {
  if (l_min > l_max) throw NumericError("empty l range");
  if (std::max(std::abs(l_min), std::abs(l_max)) >= d.azimuthal_samples() / 2) {
    throw NumericError("l range exceeds azimuthal sampling");
  }
  ModeSpectrum s;
  s.total_power = total_power;
  for (int l = l_min; l <= l_max; ++l) s.power[l] = d.channel_power(l);
  return s;
}

ModeSpectrum oam_spectrum(const ComplexField& f, const Point& center, int l_min, int l_max,
                          const PolarSampling& sampling) {
  return oam_spectrum(decompose_azimuthal(f, center, sampling), l_min, l_max, power(f));
}

std::map<int, Complex> lg_coefficients(const ComplexField& f, double waist, const Point& center, int l_min,
                                       int l_max) {
  std::map<int, Complex> out;
  for (int l = l_min; l <= l_max; ++l) out[l] = inner_product(lg_mode({0, l}, waist, f.grid(), center), f);
  return out;
}

double coupling_efficiency(const ComplexField& f, const ComplexField& analyzer) {
  const double p = power(f);
  if (!(p > 0)) throw ZeroPowerError("coupling efficiency of a zero-power field");
  return std::norm(inner_product(analyzer, f)) / p;
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const double mid = (a + b) / 2, half = (b - a) / 2;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = 0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    // recompute derivative at converged node
    double p0 = 1, p1 = 0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2 * k - 1) * z * p1 - (k - 1) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    const double w = 2 / ((1 - z * z) * dp * dp);
    nodes[i] = mid - half * z;
    nodes[n - 1 - i] = mid + half * z;
    weights[i] = weights[n - 1 - i] = half * w;
  }
}

}  // namespace oam
