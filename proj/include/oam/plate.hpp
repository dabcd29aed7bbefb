#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "oam/field.hpp"
#include "oam/modes.hpp"
#include "oam/optics.hpp"

namespace oam {

// Nanohole plate as an OAM-diagonal channel: the field is split into azimuthal harmonics
// about the beam axis, harmonic l is scaled by sqrt(T_l) (and, in dephasing mode, by a
// random phase) and the harmonics are summed again.
struct PlateModel {
  std::map<int, double> channel_transmission{{0, 0.0227}, {1, 0.0156}, {-1, 0.0142}};
  double default_transmission = 0.0156;
  // Unlisted l take T of the nearest listed |l| (same sign on ties); otherwise default_transmission.
  bool extrapolate_nearest = true;
  bool coherent = true;
  double aperture_half_width = 15e-6;
  ApertureShape aperture_shape = ApertureShape::Square;
  std::map<int, double> phase_offsets;
  // von Mises concentration of the per-shot channel phases; 0 is uniform (full dephasing).
  double dephasing_concentration = 0;
  int max_channel = 12;
  int azimuthal_samples = 256;

  double transmission(int l) const;
  double phase_offset(int l) const;
  void validate() const;
};

// Plate output split by channel, before any per-shot random phase.
struct PlateChannels {
  std::vector<int> channels;            // -max_channel .. max_channel
  std::vector<ComplexField> fields;     // sqrt(T_l) e^{i offset_l} P_l A u
  std::vector<double> input_power;      // power of P_l A u
  ComplexField remainder;               // unresolved part of A u, already scaled

  ComplexField combine(const std::vector<double>& random_phases) const;
  ComplexField combine_coherent() const;
};

PlateChannels plate_channels(const ComplexField& f, const PlateModel& model);

// Per-channel phases for one shot, in channel order; uniform on [0, 2 pi) when
// concentration == 0, von Mises about 0 otherwise.
std::vector<double> draw_channel_phases(std::size_t count, std::uint64_t seed, double concentration);

/// Aperture, azimuthal decomposition about the beam axis, per-channel scaling, recomposition.
/// In dephasing mode (model.coherent == false) a seed is required.
ComplexField apply_plate(const ComplexField& f, const PlateModel& model,
                         std::optional<std::uint64_t> shot_phase_seed = std::nullopt);

// ---- transmission spectrum -------------------------------------------------

struct DrudeParameters {
  double eps_inf = 9.0685;
  double plasma_frequency = 1.35441e16;  // rad/s
  double damping = 1.15943e14;           // rad/s
};

// Metal permittivity as a function of vacuum wavelength, over a finite band.
class Permittivity {
 public:
  struct Row {
    double wavelength;  // m
    Complex epsilon;
  };

  static Permittivity drude(const DrudeParameters& p, double band_min = 300e-9, double band_max = 2000e-9);
  static Permittivity table(std::vector<Row> rows);
  // Three whitespace-separated columns: wavelength_nm Re(eps) Im(eps); '#' starts a comment.
  static Permittivity load(const std::string& path);
  static Permittivity parse(const std::string& text);

  Complex operator()(double wavelength) const;
  double band_min() const { return band_min_; }
  double band_max() const { return band_max_; }
  bool covers(double wavelength) const { return wavelength >= band_min_ && wavelength <= band_max_; }

 private:
  std::optional<DrudeParameters> drude_;
  std::vector<Row> rows_;
  double band_min_ = 0;
  double band_max_ = 0;
};

enum class Interface { Air, Glass };

struct LorentzPeak {
  double height = 0.04;
  double fwhm = 60e-9;
};

struct SpectrumModel {
  double period = 600e-9;
  double hole_radius = 100e-9;
  Permittivity metal = Permittivity::drude({});
  double eps_air = 1.0;
  double eps_glass = 2.1316;  // fused silica, n = 1.46
  double film_thickness = 135e-9;

  std::vector<std::pair<int, int>> orders{{1, 0}, {1, 1}};
  LorentzPeak peak;
  bool calibrated = false;
  double operating_wavelength = 670e-9;
  double calibration_target = 0.025;

  double dielectric(Interface side) const { return side == Interface::Air ? eps_air : eps_glass; }
  void validate() const;
};

struct Resonance {
  int i = 0;
  int j = 0;
  Interface side = Interface::Air;
  double wavelength = 0;
};

struct SpectrumCurve {
  std::vector<double> wavelength;
  std::vector<double> transmittance;
  std::vector<double> baseline;
  std::vector<Resonance> resonances;
  double scale = 1;
  double operating_wavelength = 0;
  double operating_transmittance = 0;
};

/// Small-hole transmission normalised to the hole area: (64 / 27 pi^2) (2 pi r / lambda)^4.
double bethe_transmission(double wavelength, double hole_radius);

double hole_fill_fraction(const SpectrumModel& s);

// Bethe transmission times the fill fraction pi r^2 / P^2.
double array_classical_transmission(const SpectrumModel& s, double wavelength);

// Right-hand side of the grating-coupling condition,
// (P / sqrt(i^2 + j^2)) Re sqrt(eps_m eps_d / (eps_m + eps_d)).
double sp_coupling_wavelength(const SpectrumModel& s, int i, int j, Interface side, double wavelength);

/// Self-consistent solutions of lambda = sp_coupling_wavelength(lambda), sorted descending.
std::vector<Resonance> sp_resonance_wavelengths(const SpectrumModel& s, const std::vector<std::pair<int, int>>& orders,
                                                Interface side);

// Resonances for every configured order on both interfaces, sorted descending.
std::vector<Resonance> all_resonances(const SpectrumModel& s);

// Uncalibrated curve value (baseline plus Lorentzians) at one wavelength.
double transmittance_uncalibrated(const SpectrumModel& s, const std::vector<Resonance>& res, double wavelength);

SpectrumCurve transmittance_spectrum(const SpectrumModel& s, double band_min, double band_max, int samples);

}  // namespace oam
