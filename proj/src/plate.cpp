#include "oam/plate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

namespace oam {

double PlateModel::transmission(int l) const {
  if (auto it = channel_transmission.find(l); it != channel_transmission.end()) return it->second;
  if (!extrapolate_nearest || channel_transmission.empty()) return default_transmission;
  const int al = std::abs(l);
  int best_gap = 0;
  bool best_same_sign = false;
  double best = default_transmission;
  bool found = false;
  for (const auto& [k, t] : channel_transmission) {
    const int gap = std::abs(al - std::abs(k));
    const bool same_sign = (k >= 0) == (l >= 0);
    if (!found || gap < best_gap || (gap == best_gap && same_sign && !best_same_sign)) {
      found = true;
      best_gap = gap;
      best_same_sign = same_sign;
      best = t;
    }
  }
  return best;
}

double PlateModel::phase_offset(int l) const {
  auto it = phase_offsets.find(l);
  return it == phase_offsets.end() ? 0.0 : it->second;
}

void PlateModel::validate() const {
  for (const auto& [l, t] : channel_transmission) {
    if (!(t >= 0 && t <= 1)) throw ConfigError("plate transmission for l=" + std::to_string(l) + " outside [0, 1]");
  }
  if (!(default_transmission >= 0 && default_transmission <= 1)) {
    throw ConfigError("plate default transmission outside [0, 1]");
  }
  if (!(aperture_half_width > 0)) throw ConfigError("plate aperture half-width must be positive");
  if (max_channel < 0 || 2 * max_channel + 1 >= azimuthal_samples) {
    throw ConfigError("plate max_channel must be below half the azimuthal samples");
  }
  if (!(dephasing_concentration >= 0)) throw ConfigError("dephasing concentration must be non-negative");
}

ComplexField PlateChannels::combine(const std::vector<double>& random_phases) const {
  if (random_phases.size() != fields.size()) throw NumericError("one phase per channel required");
  ComplexArray acc = remainder.values();
  for (std::size_t k = 0; k < fields.size(); ++k) acc += std::polar(1.0, random_phases[k]) * fields[k].values();
  return remainder.with_values(std::move(acc));
}

ComplexField PlateChannels::combine_coherent() const {
  return combine(std::vector<double>(fields.size(), 0.0));
}

PlateChannels plate_channels(const ComplexField& f, const PlateModel& model) {
  model.validate();
  const ComplexField clipped = apply_aperture(f, model.aperture_half_width, model.aperture_shape);
  const auto& g = clipped.grid();

  PolarSampling sampling;
  sampling.radial = std::max(g.nx, g.ny);
  sampling.azimuthal = model.azimuthal_samples;
  sampling.interpolation = Interpolation::Bicubic;
  const AzimuthalDecomposition dec = decompose_azimuthal(clipped, Point::Zero(), sampling);

  std::vector<int> channels;
  std::vector<ComplexField> fields;
  std::vector<double> input_power;
  ComplexArray resolved = ComplexArray::Zero(g.nx, g.ny);
  for (int l = -model.max_channel; l <= model.max_channel; ++l) {
    ComplexField part = dec.channel_field(l, g);
    const double p = power(part);
    resolved += part.values();
    const double amp = std::sqrt(model.transmission(l));
    channels.push_back(l);
    input_power.push_back(p);
    fields.push_back(std::polar(amp, model.phase_offset(l)) * part);
  }
  // Unresolved remainder: mean amplitude of the first channels past the cut, so the map stays linear.
  const int edge = model.max_channel + 1;
  const double remainder_amp = 0.5 * (std::sqrt(model.transmission(edge)) + std::sqrt(model.transmission(-edge)));
  ComplexField remainder = clipped.with_values(remainder_amp * (clipped.values() - resolved));
  return PlateChannels{std::move(channels), std::move(fields), std::move(input_power), std::move(remainder)};
}

namespace {

// Best & Fisher (1979) rejection sampler for the von Mises distribution about 0.
double von_mises(std::mt19937_64& rng, double kappa) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double tau = 1 + std::sqrt(1 + 4 * kappa * kappa);
  const double rho = (tau - std::sqrt(2 * tau)) / (2 * kappa);
  const double r = (1 + rho * rho) / (2 * rho);
  while (true) {
    const double z = std::cos(M_PI * u(rng));
    const double f = (1 + r * z) / (r + z);
    const double c = kappa * (r - f);
    const double u2 = u(rng);
    if (c * (2 - c) - u2 > 0 || std::log(c / u2) + 1 - c >= 0) {
      const double theta = std::acos(std::clamp(f, -1.0, 1.0));
      return u(rng) > 0.5 ? theta : -theta;
    }
  }
}

}  // namespace

std::vector<double> draw_channel_phases(std::size_t count, std::uint64_t seed, double concentration) {
  std::mt19937_64 rng(seed);
  std::vector<double> phases(count);
  if (concentration > 0) {
    for (auto& p : phases) p = von_mises(rng, concentration);
  } else {
    std::uniform_real_distribution<double> u(0.0, 2 * M_PI);
    for (auto& p : phases) p = u(rng);
  }
  return phases;
}

ComplexField apply_plate(const ComplexField& f, const PlateModel& model, std::optional<std::uint64_t> seed) {
  if (!model.coherent && !seed) throw MissingSeedError("dephasing plate needs a shot phase seed");
  const PlateChannels ch = plate_channels(f, model);
  if (model.coherent) return ch.combine_coherent();
  return ch.combine(draw_channel_phases(ch.fields.size(), *seed, model.dephasing_concentration));
}

// ---- permittivity ------------------------------------------------------------

Permittivity Permittivity::drude(const DrudeParameters& p, double band_min, double band_max) {
  Permittivity e;
  e.drude_ = p;
  e.band_min_ = band_min;
  e.band_max_ = band_max;
  return e;
}

Permittivity Permittivity::table(std::vector<Row> rows) {
  if (rows.size() < 2) throw ConfigError("permittivity table needs at least two rows");
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.wavelength < b.wavelength; });
  for (std::size_t k = 1; k < rows.size(); ++k) {
    if (!(rows[k].wavelength > rows[k - 1].wavelength)) throw ConfigError("duplicate wavelength in permittivity table");
  }
  Permittivity e;
  e.band_min_ = rows.front().wavelength;
  e.band_max_ = rows.back().wavelength;
  e.rows_ = std::move(rows);
  return e;
}

Permittivity Permittivity::parse(const std::string& text) {
  std::vector<Row> rows;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double nm, re, im;
    if (!(ls >> nm)) continue;
    if (!(ls >> re >> im)) throw ConfigError("permittivity table line " + std::to_string(line_no) + ": expected 3 columns");
    rows.push_back({nm * 1e-9, {re, im}});
  }
  return table(std::move(rows));
}

Permittivity Permittivity::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open permittivity table '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

Complex Permittivity::operator()(double wavelength) const {
  if (!covers(wavelength)) {
    throw BandOutsideTableError("wavelength " + std::to_string(wavelength * 1e9) + " nm outside permittivity band [" +
                                std::to_string(band_min_ * 1e9) + ", " + std::to_string(band_max_ * 1e9) + "] nm");
  }
  if (drude_) {
    const double omega = 2 * M_PI * 299792458.0 / wavelength;
    const auto& p = *drude_;
    return p.eps_inf - p.plasma_frequency * p.plasma_frequency / Complex(omega * omega, omega * p.damping);
  }
  auto hi = std::lower_bound(rows_.begin(), rows_.end(), wavelength,
                             [](const Row& r, double w) { return r.wavelength < w; });
  if (hi == rows_.begin()) return hi->epsilon;
  auto lo = hi - 1;
  const double t = (wavelength - lo->wavelength) / (hi->wavelength - lo->wavelength);
  return (1 - t) * lo->epsilon + t * hi->epsilon;
}

// ---- spectrum ------------------------------------------------------------------

void SpectrumModel::validate() const {
  if (!(period > 0)) throw ConfigError("spectrum period must be positive");
  if (!(hole_radius > 0 && hole_radius < period / 2)) throw ConfigError("hole radius must lie in (0, period/2)");
  if (!(eps_air > 0 && eps_glass > 0)) throw ConfigError("dielectric constants must be positive");
  if (!(peak.fwhm > 0)) throw ConfigError("spectrum peak width must be positive");
}

double bethe_transmission(double wavelength, double hole_radius) {
  const double kr = 2 * M_PI * hole_radius / wavelength;
  static std::once_flag once;
  if (kr > 1) std::call_once(once, [] { warn("Bethe small-hole formula used outside its range (2 pi r / lambda > 1)"); });
  return 64.0 / (27.0 * M_PI * M_PI) * std::pow(kr, 4);
}

double hole_fill_fraction(const SpectrumModel& s) {
  return M_PI * s.hole_radius * s.hole_radius / (s.period * s.period);
}

double array_classical_transmission(const SpectrumModel& s, double wavelength) {
  return bethe_transmission(wavelength, s.hole_radius) * hole_fill_fraction(s);
}

double sp_coupling_wavelength(const SpectrumModel& s, int i, int j, Interface side, double wavelength) {
  const Complex em = s.metal(wavelength);
  const double ed = s.dielectric(side);
  return s.period / std::sqrt(double(i * i + j * j)) * std::sqrt(em * ed / (em + ed)).real();
}

namespace {

void check_sp_existence(const SpectrumModel& s, Interface side, double wavelength) {
  if (!(s.metal(wavelength).real() < -s.dielectric(side))) {
    throw NoConvergenceError("no bound surface plasmon at " + std::to_string(wavelength * 1e9) +
                             " nm (Re eps_m >= -eps_d)");
  }
}

double solve_resonance(const SpectrumModel& s, int i, int j, Interface side) {
  const double lo = s.metal.band_min(), hi = s.metal.band_max();
  const double light_line = s.period / std::sqrt(double(i * i + j * j)) * std::sqrt(s.dielectric(side));
  auto valid = [&](double w) { return w >= lo && w <= hi && s.metal(w).real() < -s.dielectric(side); };
  auto g = [&](double w) { return sp_coupling_wavelength(s, i, j, side, w); };

  // Fixed-point iteration from the perfect-conductor limit.
  double w = std::clamp(light_line, lo, hi);
  for (int it = 0; it < 200 && valid(w); ++it) {
    const double next = g(w);
    if (std::abs(next - w) < 1e-13) {
      w = next;
      if (valid(w)) return w;
      break;
    }
    w = next;
    if (!valid(w)) break;
  }

  // Bisection fallback on h(w) = g(w) - w: scan downwards from the top of the band.
  auto h = [&](double x) { return g(x) - x; };
  const double step = 1e-9;
  double b = hi;
  bool have_b = valid(b);
  double hb = have_b ? h(b) : 0;
  for (double a = hi - step; a >= lo; a -= step) {
    if (!valid(a)) {
      have_b = false;
      continue;
    }
    const double ha = h(a);
    if (have_b && (ha == 0 || (ha < 0) != (hb < 0))) {
      double x0 = a, x1 = b, h0 = ha;
      for (int it = 0; it < 200 && x1 - x0 > 1e-16; ++it) {
        const double m = 0.5 * (x0 + x1);
        const double hm = h(m);
        if ((hm < 0) == (h0 < 0)) {
          x0 = m;
          h0 = hm;
        } else {
          x1 = m;
        }
      }
      return 0.5 * (x0 + x1);
    }
    b = a;
    hb = ha;
    have_b = true;
  }
  throw NoConvergenceError("no surface-plasmon resonance for order (" + std::to_string(i) + "," + std::to_string(j) +
                           ") within the permittivity band");
}

}  // namespace

std::vector<Resonance> sp_resonance_wavelengths(const SpectrumModel& s, const std::vector<std::pair<int, int>>& orders,
                                                Interface side) {
  s.validate();
  std::vector<Resonance> out;
  for (const auto& [i, j] : orders) {
    if (i == 0 && j == 0) throw ConfigError("resonance order (0,0) is not a grating order");
    const double w = solve_resonance(s, i, j, side);
    check_sp_existence(s, side, w);
    out.push_back({i, j, side, w});
  }
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) { return a.wavelength > b.wavelength; });
  return out;
}

std::vector<Resonance> all_resonances(const SpectrumModel& s) {
  auto out = sp_resonance_wavelengths(s, s.orders, Interface::Glass);
  auto air = sp_resonance_wavelengths(s, s.orders, Interface::Air);
  out.insert(out.end(), air.begin(), air.end());
  std::sort(out.begin(), out.end(), [](const Resonance& a, const Resonance& b) { return a.wavelength > b.wavelength; });
  return out;
}

double transmittance_uncalibrated(const SpectrumModel& s, const std::vector<Resonance>& res, double wavelength) {
  if (!s.metal.covers(wavelength)) {
    throw BandOutsideTableError("spectrum wavelength " + std::to_string(wavelength * 1e9) +
                                " nm outside the permittivity band");
  }
  double t = array_classical_transmission(s, wavelength);
  const double half = s.peak.fwhm / 2;
  for (const auto& r : res) {
    const double x = (wavelength - r.wavelength) / half;
    t += s.peak.height / (1 + x * x);
  }
  return t;
}

SpectrumCurve transmittance_spectrum(const SpectrumModel& s, double band_min, double band_max, int samples) {
  s.validate();
  if (samples < 2) throw ConfigError("spectrum needs at least two samples");
  if (!(band_max > band_min)) throw ConfigError("spectrum band is empty");
  if (!s.metal.covers(band_min) || !s.metal.covers(band_max)) {
    throw BandOutsideTableError("spectrum band outside the permittivity table");
  }
  SpectrumCurve c;
  c.resonances = all_resonances(s);
  c.operating_wavelength = s.operating_wavelength;
  if (s.calibrated) {
    c.scale = s.calibration_target / transmittance_uncalibrated(s, c.resonances, s.operating_wavelength);
  }
  c.operating_transmittance = c.scale * transmittance_uncalibrated(s, c.resonances, s.operating_wavelength);
  for (int k = 0; k < samples; ++k) {
    const double w = band_min + (band_max - band_min) * k / (samples - 1);
    c.wavelength.push_back(w);
    c.baseline.push_back(c.scale * array_classical_transmission(s, w));
    c.transmittance.push_back(c.scale * transmittance_uncalibrated(s, c.resonances, w));
  }
  return c;
}

}  // namespace oam
