#include "oam/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <string>
#include <thread>

namespace oam {

BenchConfig BenchConfig::reference_defaults() {
  BenchConfig c;
  c.wavelength = 670e-9;
  c.relay_in = {35e-3, 35e-3, 35e-3};
  c.relay_out = {35e-3, 35e-3, 35e-3};
  c.source_waist = c.wavelength * c.relay_in.focal / (M_PI * 12.5e-6);
  c.fiber_waist = c.source_waist;
  const double delta = calibrate_phase_depth(0.30);
  c.cgh1 = {1, 1, delta, Point::Zero(), 10e-6};
  c.cgh2 = {-1, 1, delta, Point::Zero(), 10e-6};
  c.scan = {-3 * c.source_waist, 3 * c.source_waist, 201};
  return c;
}

double BenchConfig::plate_waist() const { return wavelength * relay_in.focal / (M_PI * source_waist); }

double BenchConfig::image_waist() const { return source_waist * std::abs(relay_out.focal / relay_in.focal); }

void BenchConfig::validate() const {
  if (!(wavelength > 0)) throw ConfigError("bench.wavelength must be positive");
  if (source.p < 0) throw ConfigError("bench.source.p must be non-negative");
  if (!(source_waist > 0)) throw ConfigError("bench.source.waist must be positive");
  if (!(fiber_waist > 0)) throw ConfigError("bench.fiber.waist must be positive");
  for (const RelaySpec* r : {&relay_in, &relay_out}) {
    if (!(std::isfinite(r->focal) && r->focal != 0)) throw ConfigError("bench relay focal length must be finite and non-zero");
    if (!(r->front >= 0 && r->back >= 0)) throw ConfigError("bench relay spacings must be non-negative");
  }
  for (const HologramSpec* h : {&cgh1, &cgh2}) {
    if (!(h->phase_depth >= 0)) throw ConfigError("hologram phase_depth must be non-negative");
  }
  if (scan.points < 3) throw ConfigError("bench.scan.points must be at least 3");
  if (!std::isfinite(scan.from) || !std::isfinite(scan.to)) throw ConfigError("bench.scan range must be finite");
  if (!(detector.counts_scale > 0)) throw ConfigError("bench.detector.counts_scale must be positive");
  if (shots < 1) throw ConfigError("bench.shots must be at least 1");
  if (grid_points < 16 || grid_points % 2) throw ConfigError("bench.grid.points must be even and >= 16");
  if (!(window_waists > 0)) throw ConfigError("bench.grid.window_waists must be positive");
  if (!(plate_window_waists > 0)) throw ConfigError("bench.grid.plate_window_waists must be positive");
  if (!(null_threshold > 0 && null_threshold < 1)) throw ConfigError("bench.null_threshold must lie in (0, 1)");
  if (plate) plate->validate();
}

namespace {

ComplexField project_onto_p0(const ComplexField& f, double waist, int max_l) {
  ComplexArray acc = ComplexArray::Zero(f.grid().nx, f.grid().ny);
  for (int l = -max_l; l <= max_l; ++l) {
    const ComplexField mode = lg_mode({0, l}, waist, f.grid());
    acc += inner_product(mode, f) * mode.values();
  }
  return f.with_values(std::move(acc));
}

}  // namespace

Bench::Bench(BenchConfig config)
    : config_((config.validate(), std::move(config))),
      cgh_grid_(Grid::square(config_.grid_points,
                             config_.window_waists *
                                 std::max({config_.source_waist, config_.image_waist(), config_.fiber_waist}),
                             config_.wavelength)),
      plate_grid_(Grid::square(config_.grid_points, config_.plate_window_waists * config_.plate_waist(), config_.wavelength)),
      source_(lg_mode(config_.source, config_.source_waist, cgh_grid_)),
      plate_input_(ComplexField::zeros(plate_grid_)),
      fiber_(fiber_mode(config_.fiber_waist, cgh_grid_)) {
  source_power_ = power(source_);

  ComplexField diffracted = apply_hologram_order(source_, config_.cgh1);
  if (config_.project_p0) diffracted = project_onto_p0(diffracted, config_.source_waist, config_.project_max_l);

  const auto& ri = config_.relay_in;
  const auto& ro = config_.relay_out;
  plate_input_ = relay_2f(diffracted, ri.focal, ri.front, ri.back, plate_grid_);

  const int span = config_.plate ? config_.plate->max_channel : 5;
  plate_spectrum_ = oam_spectrum(plate_input_, Point::Zero(), -span, span);

  auto to_analyzer = [&](const ComplexField& f) { return relay_2f(f, ro.focal, ro.front, ro.back, cgh_grid_); };

  if (!config_.plate) {
    terms_.push_back(to_analyzer(plate_input_));
    return;
  }

  const PlateChannels ch = plate_channels(plate_input_, *config_.plate);
  for (std::size_t k = 0; k < ch.channels.size(); ++k) channel_power_.emplace_back(ch.channels[k], power(ch.fields[k]));

  if (config_.plate->coherent) {
    terms_.push_back(to_analyzer(ch.combine_coherent()));
    return;
  }

  // Dephasing: relay each channel separately so shots only recombine amplitudes.
  random_phase_count_ = ch.fields.size();
  const double total = power(plate_input_);
  term_phase_index_.clear();
  for (std::size_t k = 0; k < ch.fields.size(); ++k) {
    if (!(ch.input_power[k] > 1e-14 * total)) continue;
    terms_.push_back(to_analyzer(ch.fields[k]));
    term_phase_index_.push_back(static_cast<int>(k));
  }
  terms_.push_back(to_analyzer(ch.remainder));
  term_phase_index_.push_back(-1);
}

std::vector<Complex> Bench::term_amplitudes(double displacement) const {
  HologramSpec analyzer = config_.cgh2;
  analyzer.displacement = Point(displacement, config_.cgh2.displacement.allFinite() ? config_.cgh2.displacement.y() : 0.0);
  if (!config_.cgh2.displacement.allFinite()) analyzer.displacement = config_.cgh2.displacement;
  const auto& g = cgh_grid_;
  // hologram_order_factor with the Bessel amplitude hoisted out of the pixel loop
  HologramSpec plain = analyzer;
  plain.displacement = Point::Constant(std::numeric_limits<double>::infinity());
  const Complex amp = hologram_order_factor(plain, 0, 0);
  const int winding = analyzer.order * analyzer.charge;
  const bool vortex = winding != 0 && analyzer.displacement.allFinite();
  ComplexArray weight(g.nx, g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      Complex h = amp;
      if (vortex) {
        const double rx = g.x(i) - analyzer.displacement.x(), ry = g.y(j) - analyzer.displacement.y();
        h = (rx == 0 && ry == 0) ? Complex{} : amp * std::polar(1.0, winding * std::atan2(ry, rx));
      }
      weight(i, j) = std::conj(fiber_(i, j)) * h;
    }
  std::vector<Complex> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) out.push_back((weight * t.values()).sum() * g.cell_area());
  return out;
}

double Bench::expected_counts(std::span<const Complex> amplitudes, std::span<const double> phases) const {
  Complex total{};
  for (std::size_t k = 0; k < amplitudes.size(); ++k) {
    if (!term_phase_index_.empty() && term_phase_index_[k] >= 0) {
      total += std::polar(1.0, phases[term_phase_index_[k]]) * amplitudes[k];
    } else {
      total += amplitudes[k];
    }
  }
  return config_.detector.counts_scale * std::norm(total) / source_power_;
}

namespace {

double poisson_sample(double mean, std::uint64_t seed) {
  if (!(mean > 0)) return 0;
  std::mt19937_64 rng(seed);
  std::poisson_distribution<long long> dist(mean);
  return static_cast<double>(dist(rng));
}

constexpr std::uint64_t kNoiseStream = std::numeric_limits<std::uint64_t>::max();

}  // namespace

double Bench::shot_counts(double displacement, std::optional<std::uint64_t> seed) const {
  if (config_.dephasing() && !seed) throw MissingSeedError("dephasing plate needs a shot phase seed");
  const auto amps = term_amplitudes(displacement);
  std::vector<double> phases;
  if (config_.dephasing()) phases = draw_channel_phases(random_phase_count_, *seed, config_.plate->dephasing_concentration);
  const double mean = expected_counts(amps, phases);
  if (!config_.detector.poisson_noise) return mean;
  return poisson_sample(mean, derive_seed(seed.value_or(config_.seed), 0, kNoiseStream));
}

ScanResult Bench::scan() const {
  const auto& s = config_.scan;
  const int n = s.points;
  ScanResult r;
  r.waist_unit = config_.image_waist();
  r.displacements.resize(n);
  r.counts.assign(n, 0.0);
  r.counts_error.assign(n, 0.0);
  for (int k = 0; k < n; ++k) r.displacements[k] = s.from + (s.to - s.from) * k / (n - 1);

  auto evaluate = [&](int k) {
    const auto amps = term_amplitudes(r.displacements[k]);
    double mean = 0;
    if (config_.dephasing()) {
      double sum = 0, sum2 = 0;
      for (int shot = 0; shot < config_.shots; ++shot) {
        const auto phases = draw_channel_phases(random_phase_count_, derive_seed(config_.seed, k, shot),
                                                config_.plate->dephasing_concentration);
        const double c = expected_counts(amps, phases);
        sum += c;
        sum2 += c * c;
      }
      mean = sum / config_.shots;
      if (config_.shots > 1) {
        const double var = std::max(0.0, (sum2 - config_.shots * mean * mean) / (config_.shots - 1));
        r.counts_error[k] = std::sqrt(var / config_.shots);
      }
    } else {
      mean = expected_counts(amps, {});
    }
    r.counts[k] = config_.detector.poisson_noise ? poisson_sample(mean, derive_seed(config_.seed, k, kNoiseStream)) : mean;
  };

  const int workers = std::min(worker_threads(config_.threads), n);
  if (workers <= 1) {
    for (int k = 0; k < n; ++k) evaluate(k);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int k = w; k < n; k += workers) evaluate(k);
      });
    }
    for (auto& t : pool) t.join();
  }

  const auto [mn, mx] = std::minmax_element(r.counts.begin(), r.counts.end());
  r.min_counts = *mn;
  r.max_counts = *mx;
  r.max_position = r.displacements[mx - r.counts.begin()];
  r.visibility = visibility(r.counts);
  if (r.min_counts < config_.null_threshold * r.max_counts) {
    r.null_position = interpolate_minimum(r.displacements, r.counts);
  }
  r.plate_input_spectrum = plate_spectrum_;
  r.plate_channel_power = channel_power_;
  return r;
}

double run_shot(const BenchConfig& config, double cgh2_displacement, std::optional<std::uint64_t> seed) {
  return Bench(config).shot_counts(cgh2_displacement, seed);
}

ScanResult run_scan(const BenchConfig& config) { return Bench(config).scan(); }

double visibility(std::span<const double> counts) {
  if (counts.empty()) throw NumericError("visibility of an empty count list");
  const auto [mn, mx] = std::minmax_element(counts.begin(), counts.end());
  if (*mn < 0) throw NumericError("visibility needs non-negative counts");
  if (!(*mx > 0)) throw NumericError("visibility of an all-zero count list");
  return (*mx - *mn) / (*mx + *mn);
}

double interpolate_minimum(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) throw NumericError("interpolate_minimum needs matching non-empty inputs");
  const std::size_t i = std::min_element(y.begin(), y.end()) - y.begin();
  if (i == 0 || i + 1 == y.size()) return x[i];
  const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
  const double y0 = y[i - 1], y1 = y[i], y2 = y[i + 1];
  const double d01 = (y1 - y0) / (x1 - x0);
  const double d12 = (y2 - y1) / (x2 - x1);
  const double curvature = (d12 - d01) / (x2 - x0);
  if (!(curvature > 0)) return x1;
  const double v = 0.5 * (x0 + x1) - d01 / (2 * curvature);
  return std::clamp(v, x0, x2);
}

SuperpositionWeights prepare_superposition(double displacement, double waist, double phase_depth) {
  if (!(displacement >= 0)) throw NumericError("fork displacement must be non-negative");
  if (!(waist > 0)) throw NumericError("waist must be positive");
  SuperpositionWeights w;
  if (std::isinf(displacement)) {
    // plain grating: the first order is the untouched Gaussian
    w.a = 1;
    w.p0 = std::pow(std::cyl_bessel_j(1.0, phase_depth), 2);
    return w;
  }
  const HologramSpec fork{1, 1, phase_depth, Point(displacement, 0.0), 10e-6};
  auto field = [&](double x, double y) {
    return hologram_order_factor(fork, x, y) * lg_amplitude({0, 0}, waist, x, y);
  };
  std::vector<double> breaks;
  if (std::isfinite(displacement) && displacement > 0) breaks.push_back(displacement);
  const int na = 256;
  const auto dec = decompose_azimuthal(field, Point::Zero(), 6 * waist, breaks, 128, na);
  w.p0 = dec.channel_power(0);
  w.p1 = dec.channel_power(1);
  double total = 0;
  for (int l = -na / 2 + 1; l <= na / 2; ++l) total += dec.channel_power(l);
  const double both = w.p0 + w.p1;
  if (!(both > 0)) throw ZeroPowerError("no power in the l = 0, 1 channels");
  w.a = std::sqrt(w.p0 / both);
  w.b = std::sqrt(w.p1 / both);
  w.residual = 1 - both / total;
  return w;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point, std::uint64_t shot) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(base) ^ point) ^ shot);
}

int worker_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("OAM_BENCH_THREADS")) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end != env && cap > 0) n = std::min<long>(n, cap);
  }
  return std::max(1, n);
}

}  // namespace oam
