#pragma once

#include <functional>
#include <map>
#include <vector>

#include "oam/field.hpp"

namespace oam {

struct LGIndex {
  int p = 0;  // radial index, >= 0
  int l = 0;  // azimuthal winding number
};

// Power carried by each azimuthal harmonic l about a chosen centre.
struct ModeSpectrum {
  std::map<int, double> power;  // P_l
  double total_power = 0;       // power of the analysed field

  double at(int l) const {
    auto it = power.find(l);
    return it == power.end() ? 0.0 : it->second;
  }
  double fraction(int l) const { return total_power > 0 ? at(l) / total_power : 0.0; }
  double captured() const;
  int dominant() const;
};

enum class Interpolation { Bilinear, Bicubic };

struct PolarSampling {
  int radial = 256;
  int azimuthal = 256;
  double radius = 0;  // 0 selects half of the smaller grid window
  Interpolation interpolation = Interpolation::Bicubic;
};

// Azimuthal Fourier series u(r, theta) = sum_l c_l(r) e^{i l theta} sampled on a
// set of radii. The radii carry quadrature weights for integrals of the form
// \int g(r) r dr.
class AzimuthalDecomposition {
 public:
  AzimuthalDecomposition(Point center, std::vector<double> radii, std::vector<double> weights,
                         ComplexArray coefficients, bool uniform_radii);

  const Point& center() const { return center_; }
  int azimuthal_samples() const { return static_cast<int>(coefficients_.cols()); }
  int radial_samples() const { return static_cast<int>(radii_.size()); }
  const std::vector<double>& radii() const { return radii_; }
  double max_radius() const { return max_radius_; }

  // c_l(r_k); |l| must be below azimuthal_samples() / 2.
  Complex harmonic(int k, int l) const;
  // \int |c_l(r)|^2 2 pi r dr
  double channel_power(int l) const;
  // c_l(r) e^{i l theta} resampled onto `grid` (cubic in r); zero beyond max_radius().
  // Only available for uniformly spaced radii.
  ComplexField channel_field(int l, const Grid& grid) const;

 private:
  Point center_;
  std::vector<double> radii_;
  std::vector<double> weights_;
  ComplexArray coefficients_;  // (radius index, harmonic index mod azimuthal samples)
  bool uniform_;
  double max_radius_;
};

// Resamples `f` onto a polar grid about `center` (uniform radii r_k = (k + 1/2) dr).
AzimuthalDecomposition decompose_azimuthal(const ComplexField& f, const Point& center,
                                           const PolarSampling& sampling = {});

// Decomposition of an analytic field u(x, y). Radii are Gauss-Legendre nodes on panels
// bounded by `breakpoints` (plus 0 and `radius`), which should include any radius where
// the field is not smooth.
AzimuthalDecomposition decompose_azimuthal(const std::function<Complex(double, double)>& fn,
                                           const Point& center, double radius,
                                           std::vector<double> breakpoints, int nodes_per_panel,
                                           int azimuthal);

/// Normalised waist-plane LG_{p,l} centred at `center`:
///   u = C / w (sqrt2 r / w)^|l| L_p^|l|(2 r^2 / w^2) exp(-r^2 / w^2) exp(i l phi),
///   C = sqrt(2 p! / (pi (p + |l|)!)),
/// so that its continuous power integral is 1. Throws UndersampledWaistError when
/// waist < 4 * pitch.
ComplexField lg_mode(const LGIndex& index, double waist, const Grid& grid, const Point& center = Point::Zero());

// The single-mode-fiber mode: the fundamental Gaussian LG_{0,0}.
ComplexField fiber_mode(double waist, const Grid& grid, const Point& center = Point::Zero());

// Analytic LG_{p,l} amplitude at (x, y) relative to its centre.
Complex lg_amplitude(const LGIndex& index, double waist, double x, double y);

ModeSpectrum oam_spectrum(const ComplexField& f, const Point& center, int l_min, int l_max,
                          const PolarSampling& sampling = {});
ModeSpectrum oam_spectrum(const AzimuthalDecomposition& d, int l_min, int l_max, double total_power);

// <LG_{0,l}| f> for each l in range, modes of the given waist centred at `center`.
std::map<int, Complex> lg_coefficients(const ComplexField& f, double waist, const Point& center, int l_min,
                                       int l_max);

/// |<analyzer|f>|^2 / power(f); the analyzer is expected to be unit normalised.
double coupling_efficiency(const ComplexField& f, const ComplexField& analyzer);

// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace oam
