#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "oam/field.hpp"

namespace oam {

// Sinusoidal phase grating with a fork dislocation,
//   t(x, y) = exp(i delta cos(k_g (x - x0) + charge * phi(x - x0, y - y0))).
// A non-finite displacement places the fork infinitely far away: the beam then sees a
// plain grating and the order carries no vortex.
struct HologramSpec {
  int charge = 1;
  int order = 1;
  double phase_depth = 1.8411837813406593;
  Point displacement = Point::Zero();
  double carrier_period = 10e-6;  // only used by the full-grating model
};

enum class ApertureShape { Square, Circle };

struct Hologram {
  HologramSpec spec;
};
struct ThinLens {
  double focal;
};
struct FreeSpace {
  double distance;
};
struct Aperture {
  double half_width;
  ApertureShape shape = ApertureShape::Square;
};
using BenchElement = std::variant<Hologram, ThinLens, FreeSpace, Aperture>;

// Bessel function of the first kind for integer order and real argument.
double bessel_j(int order, double x);

// Largest attainable first-order efficiency max_delta J_1(delta)^2 and its argument.
double max_first_order_efficiency();
double first_order_peak_phase_depth();

/// Smallest delta > 0 with J_1(delta)^2 == target (to 1e-9).
/// Throws UnreachableEfficiencyError when target is negative or exceeds the J_1^2 peak.
double calibrate_phase_depth(double target_efficiency);

// Multiplier of the selected order: i^m J_m(delta) exp(i m l_h phi).
Complex hologram_order_factor(const HologramSpec& spec, double x, double y);

/// Order-m field of the fork grating with the carrier tilt removed:
///   i^m J_m(delta) exp(i m l_h phi(x - x0, y - y0)) * f.
/// The factor vanishes exactly at the fork centre when m * l_h != 0.
ComplexField apply_hologram_order(const ComplexField& f, const HologramSpec& spec);

// Validation model: multiplies by the full grating transmission, removes the order-m
// carrier and keeps the spatial frequencies within half a carrier period of it.
ComplexField apply_hologram_full_grating(const ComplexField& f, const HologramSpec& spec);

// Thin lens about the optical axis; an infinite focal length is the identity.
ComplexField apply_lens(const ComplexField& f, double focal);

/// Angular-spectrum propagation over distance >= 0, evanescent components dropped.
ComplexField propagate(const ComplexField& f, double distance);

// Same transfer function for either sign of distance.
ComplexField angular_spectrum(const ComplexField& f, double distance);

// Heuristic: true when the beam is expected to spread past the window edge.
bool propagation_may_alias(const ComplexField& f, double distance);

ComplexField apply_aperture(const ComplexField& f, double half_width, ApertureShape shape);

/// Ideal front-focal-plane to back-focal-plane transform of a lens with focal length f,
///   u'(x') = 1 / (i lambda f) \int u(x) exp(-i 2 pi x . x' / (lambda f)) d^2x,
/// evaluated as a separable matrix DFT onto `out_grid` (any pitch).
ComplexField fourier_relay(const ComplexField& field, double focal, const Grid& out_grid);

// Relay with configurable spacings: prop(front - f), fourier_relay, prop(back - f).
ComplexField relay_2f(const ComplexField& field, double focal, double front, double back, const Grid& out_grid);

ComplexField apply_element(const ComplexField& f, const BenchElement& element);
ComplexField apply_elements(ComplexField f, const std::vector<BenchElement>& elements);

// Receives aliasing and sampling warnings; defaults to std::cerr.
void set_warning_handler(std::function<void(const std::string&)> handler);
void warn(const std::string& message);

}  // namespace oam
