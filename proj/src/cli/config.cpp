#include "oam/cli/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "oam/errors.hpp"

namespace oam::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

}  // namespace

double parse_double(const std::string& text, const std::string& key) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  if (t == "-inf" || t == "-infinity") return -std::numeric_limits<double>::infinity();
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || (errno == ERANGE && std::isinf(v)) || std::isnan(v)) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

Config Config::parse(const std::string& text, const std::string& source) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(n) + ": empty key");
    for (char ch : key) {
      if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '.' || ch == '_' || ch == '-')) {
        throw ConfigError(source + ":" + std::to_string(n) + ": invalid key '" + key + "'");
      }
    }
    c.values_[key] = value;
    c.origin_[key] = source + ":" + std::to_string(n);
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  Config c = parse(ss.str(), path.string());
  c.base_dir_ = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return c;
}

void Config::merge(const Config& later) {
  for (const auto& [k, v] : later.values_) {
    values_[k] = v;
    origin_[k] = later.origin_.at(k);
  }
  base_dir_ = later.base_dir_;
}

void Config::set(const std::string& key, const std::string& value) {
  values_[key] = value;
  origin_[key] = "<command line>";
}

const std::string* Config::raw(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return nullptr;
  used_.insert(key);
  return &it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  const auto* v = raw(key);
  return v ? *v : fallback;
}

std::optional<double> Config::find_double(const std::string& key) const {
  const auto* v = raw(key);
  if (!v) return std::nullopt;
  return parse_double(*v, key);
}

double Config::get_double(const std::string& key, double fallback) const {
  return find_double(key).value_or(fallback);
}

int Config::get_int(const std::string& key, int fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const long x = std::strtol(v->c_str(), &end, 10);
  if (v->empty() || end != v->c_str() + v->size() || errno == ERANGE || x < std::numeric_limits<int>::min() ||
      x > std::numeric_limits<int>::max()) {
    throw ConfigError(key + ": expected an integer, got '" + *v + "'");
  }
  return static_cast<int>(x);
}

std::uint64_t Config::get_uint64(const std::string& key, std::uint64_t fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  char* end = nullptr;
  errno = 0;
  const unsigned long long x = std::strtoull(v->c_str(), &end, 10);
  if (v->empty() || (*v)[0] == '-' || end != v->c_str() + v->size() || errno == ERANGE) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + *v + "'");
  }
  return x;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  const auto* v = raw(key);
  if (!v) return fallback;
  const std::string t = lower(*v);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + *v + "'");
}

std::vector<std::string> Config::keys_under(const std::string& prefix) const {
  std::vector<std::string> out;
  const std::string p = prefix + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(p, 0) == 0) out.push_back(k.substr(p.size()));
  }
  return out;
}

void Config::require_all_used() const {
  for (const auto& [k, v] : values_) {
    if (!used_.count(k)) throw ConfigError(k + ": not used by this command (" + origin_.at(k) + ")");
  }
}

namespace {

// `key` in metres, or `key_waists` in units of `unit`.
std::optional<double> length(const Config& c, const std::string& key, double unit) {
  const auto direct = c.find_double(key);
  const auto rel = c.find_double(key + "_waists");
  if (direct && rel) throw ConfigError(key + ": set either " + key + " or " + key + "_waists, not both");
  if (rel) return *rel * unit;
  return direct;
}

}  // namespace

HologramSpec hologram_spec(const Config& c, const std::string& prefix, HologramSpec h, double unit) {
  h.charge = c.get_int(prefix + ".charge", h.charge);
  h.order = c.get_int(prefix + ".order", h.order);
  const auto eff = c.find_double(prefix + ".efficiency");
  const auto depth = c.find_double(prefix + ".phase_depth");
  if (eff && depth) throw ConfigError(prefix + ".phase_depth: set either phase_depth or efficiency, not both");
  if (eff) h.phase_depth = calibrate_phase_depth(*eff);
  if (depth) h.phase_depth = *depth;
  if (!(h.phase_depth >= 0)) throw ConfigError(prefix + ".phase_depth must be non-negative");
  if (auto x = length(c, prefix + ".displacement_x", unit)) h.displacement.x() = *x;
  if (auto y = length(c, prefix + ".displacement_y", unit)) h.displacement.y() = *y;
  if (std::isinf(h.displacement.x()) || std::isinf(h.displacement.y())) {
    h.displacement = Point::Constant(std::numeric_limits<double>::infinity());
  }
  h.carrier_period = c.get_double(prefix + ".carrier_period", h.carrier_period);
  return h;
}

namespace {

std::map<int, double> channel_map(const Config& c, const std::string& prefix) {
  std::map<int, double> out;
  for (const auto& k : c.keys_under(prefix)) {
    char* end = nullptr;
    const long l = std::strtol(k.c_str(), &end, 10);
    if (k.empty() || end != k.c_str() + k.size()) throw ConfigError(prefix + "." + k + ": channel must be an integer");
    out[static_cast<int>(l)] = c.get_double(prefix + "." + k, 0);
  }
  return out;
}

}  // namespace

PlateModel plate_model(const Config& c) {
  PlateModel p;
  auto t = channel_map(c, "plate.t");
  if (!t.empty()) p.channel_transmission = t;
  p.default_transmission = c.get_double("plate.default_transmission", p.default_transmission);
  p.extrapolate_nearest = c.get_bool("plate.extrapolate_nearest", p.extrapolate_nearest);
  p.coherent = c.get_bool("plate.coherent", p.coherent);
  p.aperture_half_width = c.get_double("plate.aperture_half_width", p.aperture_half_width);
  const std::string shape = c.get_string("plate.aperture_shape", "square");
  if (shape == "square") p.aperture_shape = ApertureShape::Square;
  else if (shape == "circle") p.aperture_shape = ApertureShape::Circle;
  else throw ConfigError("plate.aperture_shape: expected square or circle, got '" + shape + "'");
  p.phase_offsets = channel_map(c, "plate.phase_offset");
  p.dephasing_concentration = c.get_double("plate.dephasing_concentration", p.dephasing_concentration);
  p.max_channel = c.get_int("plate.max_channel", p.max_channel);
  p.azimuthal_samples = c.get_int("plate.azimuthal_samples", p.azimuthal_samples);
  try {
    p.validate();
  } catch (const NumericError& e) {
    throw ConfigError(std::string("plate: ") + e.what());
  }
  return p;
}

BenchConfig bench_config(const Config& c) {
  BenchConfig b = BenchConfig::reference_defaults();
  b.wavelength = c.get_double("bench.wavelength", b.wavelength);
  if (!(b.wavelength > 0 && std::isfinite(b.wavelength))) throw ConfigError("bench.wavelength must be positive");

  for (RelaySpec* r : {&b.relay_in, &b.relay_out}) {
    r->focal = c.get_double("bench.relay.focal", r->focal);
    r->front = r->focal;
    r->back = r->focal;
  }
  for (auto [name, r] : {std::pair{"bench.relay_in", &b.relay_in}, std::pair{"bench.relay_out", &b.relay_out}}) {
    r->focal = c.get_double(std::string(name) + ".focal", r->focal);
    r->front = c.get_double("bench.relay.front", r->focal);
    r->back = c.get_double("bench.relay.back", r->focal);
    r->front = c.get_double(std::string(name) + ".front", r->front);
    r->back = c.get_double(std::string(name) + ".back", r->back);
  }

  const auto src_waist = c.find_double("bench.source.waist");
  const auto plate_waist = c.find_double("bench.plate_waist");
  if (src_waist && plate_waist) throw ConfigError("bench.source.waist: set either source.waist or plate_waist, not both");
  const double wp = plate_waist.value_or(12.5e-6);
  b.source_waist = src_waist.value_or(b.wavelength * b.relay_in.focal / (M_PI * wp));
  if (!(b.source_waist > 0)) throw ConfigError("bench.source.waist must be positive");
  b.source.p = c.get_int("bench.source.p", 0);
  b.source.l = c.get_int("bench.source.l", 0);
  if (b.source.p < 0) throw ConfigError("bench.source.p must be non-negative");

  const double unit = b.source_waist;
  b.cgh1 = hologram_spec(c, "bench.cgh1", b.cgh1, unit);
  b.cgh2 = hologram_spec(c, "bench.cgh2", b.cgh2, unit);
  if (b.cgh2.displacement.allFinite() && b.cgh2.displacement.x() != 0) {
    throw ConfigError("bench.cgh2.displacement_x: the analyzer x position is the scan variable; use bench.scan.*");
  }

  b.fiber_waist = c.get_double("bench.fiber.waist", b.image_waist());
  const double image = b.image_waist();
  b.scan.from = length(c, "bench.scan.from", image).value_or(-3 * image);
  b.scan.to = length(c, "bench.scan.to", image).value_or(3 * image);
  b.scan.points = c.get_int("bench.scan.points", b.scan.points);

  b.detector.counts_scale = c.get_double("bench.detector.counts_scale", b.detector.counts_scale);
  b.detector.poisson_noise = c.get_bool("bench.detector.poisson_noise", b.detector.poisson_noise);
  b.seed = c.get_uint64("bench.seed", b.seed);
  b.shots = c.get_int("bench.shots", b.shots);
  b.grid_points = c.get_int("bench.grid.points", b.grid_points);
  b.window_waists = c.get_double("bench.grid.window_waists", b.window_waists);
  b.plate_window_waists = c.get_double("bench.grid.plate_window_waists", b.plate_window_waists);
  b.project_p0 = c.get_bool("bench.project_p0", b.project_p0);
  b.project_max_l = c.get_int("bench.project_max_l", b.project_max_l);
  b.null_threshold = c.get_double("bench.null_threshold", b.null_threshold);
  b.threads = c.get_int("bench.threads", b.threads);

  if (c.get_bool("plate.enabled", false)) b.plate = plate_model(c);
  b.validate();
  return b;
}

SpectrumModel spectrum_model(const Config& c) {
  SpectrumModel s;
  s.period = c.get_double("spectrum.period", s.period);
  s.hole_radius = c.get_double("spectrum.hole_radius", s.hole_radius);
  s.film_thickness = c.get_double("spectrum.film_thickness", s.film_thickness);
  s.eps_air = c.get_double("spectrum.eps_air", s.eps_air);
  s.eps_glass = c.get_double("spectrum.eps_glass", s.eps_glass);

  const std::string table = c.get_string("spectrum.permittivity_table", "");
  DrudeParameters d;
  d.eps_inf = c.get_double("spectrum.drude.eps_inf", d.eps_inf);
  d.plasma_frequency = c.get_double("spectrum.drude.plasma_frequency", d.plasma_frequency);
  d.damping = c.get_double("spectrum.drude.damping", d.damping);
  if (!table.empty()) {
    std::filesystem::path p(table);
    if (p.is_relative()) p = c.base_dir() / p;
    try {
      s.metal = Permittivity::load(p.string());
    } catch (const NumericError& e) {
      throw ConfigError(std::string("spectrum.permittivity_table: ") + e.what());
    }
  } else {
    s.metal = Permittivity::drude(d, c.get_double("spectrum.drude.band_min", 300e-9),
                                  c.get_double("spectrum.drude.band_max", 2000e-9));
  }

  const std::string orders = c.get_string("spectrum.orders", "");
  if (!orders.empty()) {
    s.orders.clear();
    std::istringstream in(orders);
    std::string item;
    while (std::getline(in, item, ';')) {
      item = trim(item);
      if (item.empty()) continue;
      int i = 0, j = 0;
      char comma = 0;
      std::istringstream is(item);
      if (!(is >> i >> comma >> j) || comma != ',' || !(is >> std::ws).eof()) {
        throw ConfigError("spectrum.orders: expected 'i,j; i,j; ...', got '" + item + "'");
      }
      s.orders.emplace_back(i, j);
    }
  }
  s.peak.height = c.get_double("spectrum.peak.height", s.peak.height);
  s.peak.fwhm = c.get_double("spectrum.peak.fwhm", s.peak.fwhm);
  s.calibrated = c.get_bool("spectrum.calibrated", s.calibrated);
  s.operating_wavelength = c.get_double("spectrum.operating_wavelength", s.operating_wavelength);
  s.calibration_target = c.get_double("spectrum.calibration_target", s.calibration_target);
  try {
    s.validate();
  } catch (const NumericError& e) {
    throw ConfigError(std::string("spectrum: ") + e.what());
  }
  return s;
}

}  // namespace oam::cli
