#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "oam/field.hpp"
#include "oam/modes.hpp"
#include "oam/optics.hpp"
#include "oam/plate.hpp"

namespace oam {

// front / back are the lens-to-plane spacings; front == back == focal is the ideal 2f relay.
struct RelaySpec {
  double focal = 35e-3;
  double front = 35e-3;
  double back = 35e-3;
};

struct DetectorSpec {
  double counts_scale = 1e6;
  bool poisson_noise = false;
};

struct ScanSpec {
  double from = 0;  // cgh2 x displacement, metres
  double to = 0;
  int points = 201;
};

// Source fiber -> CGH1 -> 2f relay -> plate -> 2f relay -> CGH2 -> analyzer fiber.
struct BenchConfig {
  double wavelength = 670e-9;
  LGIndex source;
  double source_waist = 0;  // at the CGH1 plane
  HologramSpec cgh1;
  HologramSpec cgh2;
  RelaySpec relay_in;
  RelaySpec relay_out;
  std::optional<PlateModel> plate;
  double fiber_waist = 0;  // analyzer mode waist in the CGH2 plane
  ScanSpec scan;
  DetectorSpec detector;
  std::uint64_t seed = 1;
  int shots = 200;  // per scan point in dephasing mode
  int grid_points = 512;
  double window_waists = 8;         // CGH planes, in units of the larger beam waist
  double plate_window_waists = 16;  // plate plane; the vortex spectrum has slow tails
  // Replace the CGH1 output by its projection onto LG_{0,l}, |l| <= project_max_l.
  bool project_p0 = false;
  int project_max_l = 8;
  double null_threshold = 1e-2;
  int threads = 0;  // 0: OAM_BENCH_THREADS or hardware concurrency

  // Reference geometry: 670 nm, 35 mm relays, 12.5 um waist at the plate, 30 % CGHs,
  // analyzer CGH with charge -1, scan over +-3 source waists.
  static BenchConfig reference_defaults();

  double plate_waist() const;  // image of the source waist in the plate plane
  double image_waist() const;  // image of the source waist in the CGH2 plane
  bool dephasing() const { return plate && !plate->coherent; }
  void validate() const;
};

struct ScanResult {
  std::vector<double> displacements;  // metres
  std::vector<double> counts;
  double waist_unit = 0;  // displacement unit used for reporting
  double visibility = 0;
  std::optional<double> null_position;
  double max_position = 0;
  double min_counts = 0;
  double max_counts = 0;
  // Standard error of each point's shot average (dephasing mode; zero otherwise).
  std::vector<double> counts_error;
  ModeSpectrum plate_input_spectrum;
  std::vector<std::pair<int, double>> plate_channel_power;  // after the plate, per l
};

// Precomputed bench: everything up to the CGH2 plane is independent of the scan variable.
class Bench {
 public:
  explicit Bench(BenchConfig config);

  const BenchConfig& config() const { return config_; }
  const Grid& cgh_grid() const { return cgh_grid_; }
  const Grid& plate_grid() const { return plate_grid_; }
  const ComplexField& source_field() const { return source_; }
  const ComplexField& plate_input() const { return plate_input_; }
  const ModeSpectrum& plate_input_spectrum() const { return plate_spectrum_; }
  const std::vector<std::pair<int, double>>& plate_channel_power() const { return channel_power_; }

  // Number of independently phased terms (1 unless the plate dephases).
  std::size_t term_count() const { return terms_.size(); }
  std::size_t random_phase_count() const { return random_phase_count_; }

  // Fiber amplitude of each term for a CGH2 x displacement.
  std::vector<Complex> term_amplitudes(double displacement) const;
  // Expected counts for given per-channel phases (ignored unless dephasing).
  double expected_counts(std::span<const Complex> amplitudes, std::span<const double> phases) const;
  double shot_counts(double displacement, std::optional<std::uint64_t> seed) const;

  ScanResult scan() const;

 private:
  BenchConfig config_;
  Grid cgh_grid_;
  Grid plate_grid_;
  ComplexField source_;
  ComplexField plate_input_;
  ComplexField fiber_;
  ModeSpectrum plate_spectrum_;
  std::vector<std::pair<int, double>> channel_power_;
  std::vector<ComplexField> terms_;  // CGH2-plane fields; last one unphased when dephasing
  std::vector<int> term_phase_index_;  // channel phase index per term, -1 for none
  std::size_t random_phase_count_ = 0;
  double source_power_ = 1;
};

double run_shot(const BenchConfig& config, double cgh2_displacement, std::optional<std::uint64_t> seed = std::nullopt);
ScanResult run_scan(const BenchConfig& config);

// (max - min) / (max + min); throws on empty, negative or all-zero input.
double visibility(std::span<const double> counts);

// Sub-step minimum location by a parabola through the discrete minimum and its neighbours.
double interpolate_minimum(std::span<const double> x, std::span<const double> y);

struct SuperpositionWeights {
  double a = 0;  // |0> weight, a^2 + b^2 = 1
  double b = 0;  // |1> weight
  double p0 = 0;
  double p1 = 0;
  double residual = 0;  // power fraction outside l = 0, 1
};

/// l = 0 and l = 1 content of the first-order field of a fork (charge 1) displaced by d
/// along x in front of a Gaussian of waist w.
SuperpositionWeights prepare_superposition(double displacement, double waist, double phase_depth = 1.5);

// Deterministic per-(point, shot) seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t point, std::uint64_t shot);

int worker_threads(int requested);

}  // namespace oam
