#include "oam/cli/presets.hpp"

#include <map>

#include "oam/errors.hpp"

namespace oam::cli {
namespace {

const std::string kScanCommon = R"(# 670 nm, 35 mm relays, 12.5 um waist at the plate, 30 % holograms
bench.wavelength = 670e-9
bench.relay.focal = 35e-3
bench.plate_waist = 12.5e-6
bench.source.p = 0
bench.source.l = 0
bench.cgh1.charge = 1
bench.cgh1.order = 1
bench.cgh1.efficiency = 0.30
bench.cgh2.charge = -1
bench.cgh2.order = 1
bench.cgh2.efficiency = 0.30
bench.scan.from_waists = -3
bench.scan.to_waists = 3
bench.scan.points = 201
bench.detector.counts_scale = 1e6
bench.seed = 1
)";

const std::string kPlate = R"(plate.enabled = true
plate.t.0 = 0.0227
plate.t.1 = 0.0156
plate.t.-1 = 0.0142
# measured efficiencies already include the finite-array losses
plate.aperture_half_width = inf
)";

const std::map<std::string, std::string>& table() {
  static const std::map<std::string, std::string> t = {
      {"fig3a", kScanCommon + "# fork far from the beam: |0> reaches the analyzer\nbench.cgh1.displacement_x = inf\n"},
      {"fig3b", kScanCommon + "# centred fork: |1>\nbench.cgh1.displacement_x = 0\n"},
      {"fig4a", kScanCommon + "bench.cgh1.displacement_x = inf\n" + kPlate + "plate.coherent = true\n"},
      {"fig4b", kScanCommon + "bench.cgh1.displacement_x = 0\n" + kPlate + "plate.coherent = true\n"},
      {"fig5a", kScanCommon + "# slightly displaced fork: a|0> + b|1>\nbench.cgh1.displacement_x_waists = 0.5\n"
                              "compare.reference_visibility = 0.960\n"},
      {"fig5b", kScanCommon + "bench.cgh1.displacement_x_waists = 0.5\n" + kPlate +
                    "plate.coherent = true\ncompare.without_plate = true\ncompare.reference_visibility = 0.944\n"},
      {"fig5b_dephased", kScanCommon + "bench.cgh1.displacement_x_waists = 0.5\n" + kPlate +
                             "plate.coherent = false\nplate.dephasing_concentration = 0\nbench.shots = 200\n"
                             "compare.without_plate = true\n"},
      {"fig1", R"(spectrum.period = 600e-9
spectrum.hole_radius = 100e-9
spectrum.film_thickness = 135e-9
spectrum.eps_air = 1.0
spectrum.eps_glass = 2.1316
spectrum.orders = 1,0; 1,1
spectrum.peak.height = 0.04
spectrum.peak.fwhm = 60e-9
spectrum.calibrated = true
spectrum.operating_wavelength = 670e-9
spectrum.calibration_target = 0.025
spectrum.band_min = 500e-9
spectrum.band_max = 1000e-9
spectrum.samples = 501
)"},
  };
  return t;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : table()) names.push_back(k);
  return names;
}

const std::string& preset_text(const std::string& name) {
  auto it = table().find(name);
  if (it == table().end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

Config preset(const std::string& name) { return Config::parse(preset_text(name), "preset:" + name); }

}  // namespace oam::cli
