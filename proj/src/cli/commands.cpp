#include "oam/cli/commands.hpp"

#include <cmath>
#include <sstream>

#include "oam/bench.hpp"
#include "oam/cli/output.hpp"
#include "oam/cli/presets.hpp"
#include "oam/errors.hpp"
#include "oam/modes.hpp"
#include "oam/optics.hpp"
#include "oam/plate.hpp"

namespace oam::cli {
namespace fs = std::filesystem;

namespace {

void prepare_dir(const fs::path& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out)) throw ConfigError("cannot create output directory " + out.string());
}

std::string kv(const std::string& key, double v) { return key + " = " + format_double(v) + "\n"; }
std::string kv(const std::string& key, const std::string& v) { return key + " = " + v + "\n"; }

const char* side_name(Interface s) { return s == Interface::Air ? "air" : "glass"; }

}  // namespace

Config manifest_config(const RunManifest& m) {
  if (!m.config_path && !m.preset) throw ConfigError("--config: no config file or preset given");
  Config c;
  if (m.preset) c = preset(*m.preset);
  if (m.config_path) c.merge(Config::load(*m.config_path));
  if (m.seed && m.command == "scan") c.set("bench.seed", std::to_string(*m.seed));
  return c;
}

void cmd_scan(const Config& c, const fs::path& out, bool plots) {
  const BenchConfig config = bench_config(c);
  const bool without_plate = c.get_bool("compare.without_plate", false);
  const auto reference = c.find_double("compare.reference_visibility");
  c.require_all_used();
  prepare_dir(out);

  const ScanResult r = run_scan(config);
  std::optional<ScanResult> bare;
  if (without_plate && config.plate) {
    BenchConfig b = config;
    b.plate.reset();
    bare = run_scan(b);
  }

  Table t;
  t.columns = {"displacement_m", "displacement_waists", "counts", "counts_normalized"};
  t.data.assign(4, {});
  for (std::size_t k = 0; k < r.counts.size(); ++k) {
    t.data[0].push_back(r.displacements[k]);
    t.data[1].push_back(r.displacements[k] / r.waist_unit);
    t.data[2].push_back(r.counts[k]);
    t.data[3].push_back(r.max_counts > 0 ? r.counts[k] / r.max_counts : 0.0);
  }
  write_csv(out / "scan.csv", t);

  std::string s;
  s += kv("waist_unit_m", r.waist_unit);
  s += kv("points", static_cast<double>(r.counts.size()));
  s += kv("visibility", r.visibility);
  s += kv("min_counts", r.min_counts);
  s += kv("max_counts", r.max_counts);
  s += kv("min_over_max", r.max_counts > 0 ? r.min_counts / r.max_counts : 0.0);
  if (r.null_position) {
    s += kv("null_position_m", *r.null_position);
    s += kv("null_position_waists", *r.null_position / r.waist_unit);
  } else {
    s += kv("null_position_m", "none");
  }
  s += kv("max_position_m", r.max_position);
  s += kv("max_position_waists", r.max_position / r.waist_unit);
  s += kv("mode", !config.plate ? "no_plate" : config.plate->coherent ? "coherent_plate" : "dephasing_plate");
  if (config.dephasing()) {
    s += kv("shots_per_point", static_cast<double>(config.shots));
    double worst = 0;
    for (std::size_t k = 0; k < r.counts.size(); ++k)
      if (r.counts[k] > 0) worst = std::max(worst, r.counts_error[k] / r.counts[k]);
    s += kv("max_relative_standard_error", worst);
  }
  for (const auto& [l, p] : r.plate_input_spectrum.power) {
    s += kv("plate_input_fraction.l" + std::to_string(l), r.plate_input_spectrum.fraction(l));
  }
  for (const auto& [l, p] : r.plate_channel_power) s += kv("plate_output_power.l" + std::to_string(l), p);
  if (bare) {
    s += kv("without_plate.visibility", bare->visibility);
    if (bare->null_position) {
      s += kv("without_plate.null_position_m", *bare->null_position);
      if (r.null_position) {
        s += kv("null_shift_m", *r.null_position - *bare->null_position);
        s += kv("null_shift_waists", (*r.null_position - *bare->null_position) / r.waist_unit);
      }
    } else {
      s += kv("without_plate.null_position_m", "none");
    }
  }
  if (reference) {
    s += kv("reference.visibility", *reference);
    s += kv("visibility_minus_reference", r.visibility - *reference);
  }
  for (const auto& ref : kReferenceVisibilities) s += kv(std::string("measured.visibility.") + ref.name, ref.value);
  write_text(out / "summary.txt", s);

  if (plots) {
    Series counts{"simulated", t.data[1], t.data[2]};
    std::vector<Series> series{counts};
    if (bare) {
      Series b{"without plate (scaled)", {}, {}};
      const double scale = bare->max_counts > 0 ? r.max_counts / bare->max_counts : 1.0;
      for (std::size_t k = 0; k < bare->counts.size(); ++k) {
        b.x.push_back(bare->displacements[k] / bare->waist_unit);
        b.y.push_back(bare->counts[k] * scale);
      }
      series.push_back(std::move(b));
    }
    write_svg_plot(out / "scan.svg", {"Counts vs analyzer displacement", "displacement / waist", "counts", {}}, series);
  }
}

void cmd_spectrum(const Config& c, const fs::path& out, bool plots) {
  const SpectrumModel model = spectrum_model(c);
  const double band_min = c.get_double("spectrum.band_min", 500e-9);
  const double band_max = c.get_double("spectrum.band_max", 1000e-9);
  const int samples = c.get_int("spectrum.samples", 501);
  c.require_all_used();
  if (samples < 2) throw ConfigError("spectrum.samples must be at least 2");
  if (!(band_max > band_min && band_min > 0)) throw ConfigError("spectrum.band_min: band must satisfy 0 < min < max");
  prepare_dir(out);

  const SpectrumCurve curve = transmittance_spectrum(model, band_min, band_max, samples);
  Table t;
  t.columns = {"wavelength_nm", "transmittance", "classical_baseline"};
  t.data.assign(3, {});
  for (std::size_t k = 0; k < curve.wavelength.size(); ++k) {
    t.data[0].push_back(curve.wavelength[k] * 1e9);
    t.data[1].push_back(curve.transmittance[k]);
    t.data[2].push_back(curve.baseline[k]);
  }
  write_csv(out / "spectrum.csv", t);

  std::string s;
  for (const auto& r : curve.resonances) {
    std::ostringstream key;
    key << side_name(r.side) << ".(" << r.i << "," << r.j << ").wavelength_nm";
    s += kv(key.str(), r.wavelength * 1e9);
  }
  const double op = model.operating_wavelength;
  s += kv("operating_wavelength_nm", op * 1e9);
  s += kv("operating_transmittance", curve.operating_transmittance);
  s += kv("calibration_scale", curve.scale);
  s += kv("classical.per_hole_area", bethe_transmission(op, model.hole_radius));
  s += kv("classical.per_unit_cell", array_classical_transmission(model, op));
  s += kv("classical.fill_fraction", hole_fill_fraction(model));
  s += kv("measured.classical_estimate", 0.0055);
  s += kv("measured.operating_transmittance", 0.025);
  write_text(out / "resonances.txt", s);

  if (plots) {
    write_svg_plot(out / "spectrum.svg",
                   {"Hole array transmittance", "wavelength (nm)", "transmittance", {op * 1e9}},
                   {{"model", t.data[0], t.data[1]}, {"classical baseline", t.data[0], t.data[2]}});
  }
}

void cmd_calibrate(const Config& c, const fs::path& out) {
  const double target = c.get_double("calibrate.target_efficiency", 0.30);
  c.require_all_used();
  prepare_dir(out);
  const double delta = calibrate_phase_depth(target);
  const double j = bessel_j(1, delta);
  std::string s;
  s += kv("target_efficiency", target);
  s += kv("phase_depth", delta);
  s += kv("efficiency", j * j);
  s += kv("residual", std::abs(j * j - target));
  s += kv("peak_efficiency", max_first_order_efficiency());
  s += kv("peak_phase_depth", first_order_peak_phase_depth());
  write_text(out / "calibration.txt", s);
}

namespace {

std::vector<LGIndex> parse_mode_list(const std::string& text) {
  std::vector<LGIndex> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream is(item);
    LGIndex m;
    char comma = 0;
    if (!(is >> m.p >> comma >> m.l) || comma != ',' || !(is >> std::ws).eof()) {
      throw ConfigError("modes.list: expected 'p,l; p,l; ...', got '" + item + "'");
    }
    if (m.p < 0) throw ConfigError("modes.list: radial index must be non-negative in '" + item + "'");
    out.push_back(m);
  }
  if (out.empty()) throw ConfigError("modes.list: no modes given");
  return out;
}

void emit_field(const ComplexField& f, const std::string& name, const fs::path& out, bool plots, int l_min, int l_max,
                std::string& summary) {
  const auto& g = f.grid();
  const Eigen::ArrayXXd cell_power = f.values().abs2() * g.cell_area();
  const Eigen::ArrayXXd phase = f.values().arg();
  write_grid_csv(out / (name + "_power.csv"), cell_power);
  write_grid_csv(out / (name + "_phase.csv"), phase);
  if (plots) {
    write_pgm(out / (name + "_intensity.pgm"), cell_power);
    write_phase_ppm(out / (name + "_phase.ppm"), phase);
  }
  const ModeSpectrum spec = oam_spectrum(f, Point::Zero(), l_min, l_max);
  Table t;
  t.columns = {"l", "power", "fraction"};
  t.data.assign(3, {});
  for (const auto& [l, p] : spec.power) {
    t.data[0].push_back(l);
    t.data[1].push_back(p);
    t.data[2].push_back(spec.fraction(l));
  }
  write_csv(out / (name + "_spectrum.csv"), t);
  summary += kv(name + ".power", cell_power.sum());
  summary += kv(name + ".dominant_l", spec.dominant());
  summary += kv(name + ".dominant_fraction", spec.fraction(spec.dominant()));
}

}  // namespace

void cmd_modes(const Config& c, const fs::path& out, bool plots) {
  const auto modes = parse_mode_list(c.get_string("modes.list", "0,0; 0,1"));
  const double waist = c.get_double("modes.waist", 1e-3);
  const double wavelength = c.get_double("modes.wavelength", 670e-9);
  const int points = c.get_int("modes.grid.points", 256);
  const double window = c.get_double("modes.grid.window_waists", 8);
  const int l_min = c.get_int("modes.l_min", -5);
  const int l_max = c.get_int("modes.l_max", 5);
  const bool diffract = c.get_bool("modes.diffract", false);
  HologramSpec cgh = hologram_spec(c, "modes.cgh", HologramSpec{}, waist);
  c.require_all_used();
  if (!(waist > 0)) throw ConfigError("modes.waist must be positive");
  if (!(window > 0)) throw ConfigError("modes.grid.window_waists must be positive");
  if (l_min > l_max) throw ConfigError("modes.l_min must not exceed modes.l_max");
  if (points < 16 || points % 2) throw ConfigError("modes.grid.points must be even and >= 16");
  prepare_dir(out);

  const Grid grid = Grid::square(points, window * waist, wavelength);
  std::string summary;
  for (const auto& m : modes) {
    const std::string name = "lg_p" + std::to_string(m.p) + "_l" + std::to_string(m.l);
    const ComplexField f = lg_mode(m, waist, grid);
    emit_field(f, name, out, plots, l_min, l_max, summary);
    if (diffract) emit_field(apply_hologram_order(f, cgh), name + "_cgh", out, plots, l_min, l_max, summary);
  }
  write_text(out / "modes_summary.txt", summary);
}

void run(const RunManifest& m) {
  const Config c = manifest_config(m);
  if (m.command == "scan") cmd_scan(c, m.output_dir, m.emit_plots);
  else if (m.command == "spectrum") cmd_spectrum(c, m.output_dir, m.emit_plots);
  else if (m.command == "calibrate") cmd_calibrate(c, m.output_dir);
  else if (m.command == "modes") cmd_modes(c, m.output_dir, m.emit_plots);
  else throw ConfigError("unknown command '" + m.command + "'");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DomainError*>(&e)) return 4;
  return 3;
}

}  // namespace oam::cli
