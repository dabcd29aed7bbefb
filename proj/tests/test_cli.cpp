#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "oam/cli/commands.hpp"
#include "oam/cli/config.hpp"
#include "oam/cli/output.hpp"
#include "oam/cli/presets.hpp"
#include "oam/errors.hpp"

using namespace oam;
using namespace oam::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("oam_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> read_summary(const fs::path& p) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

int run_tool(const std::string& args) {
  const std::string cmd = std::string(OAM_BENCH_EXE) + " " + args + " >/dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

const char* kSmall = "bench.grid.points = 128\nbench.scan.points = 21\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("config syntax") {
    const Config c = Config::parse("# comment\n  bench.source.l = 1  # trailing\nx.y=inf\nx.y = 2.5\nflag = yes\n");
    CHECK(c.get_int("bench.source.l", 0) == 1);
    CHECK(c.get_double("x.y", 0) == 2.5);
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_double("absent", 7) == 7);
    CHECK(parse_double("-inf", "k") == -INFINITY);
    CHECK_THROWS_AS(Config::parse("no equals sign\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse("bad key! = 1\n"), ConfigError);
    try {
      Config::parse("bench.wavelength = abc\n").get_double("bench.wavelength", 0);
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("bench.wavelength") != std::string::npos);
    }
  }

  TEST_CASE("unused keys are reported by name") {
    Config c = Config::parse("bench.source.l = 1\nbench.sourse.p = 0\n");
    bench_config(c);
    try {
      c.require_all_used();
      FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("bench.sourse.p") != std::string::npos);
    }
  }

  TEST_CASE("bench config from presets") {
    const BenchConfig a = bench_config(preset("fig3a"));
    CHECK_FALSE(a.cgh1.displacement.allFinite());
    CHECK_FALSE(a.plate.has_value());
    const BenchConfig b = bench_config(preset("fig5b"));
    CHECK(b.cgh1.displacement.x() == doctest::Approx(0.5 * b.source_waist));
    REQUIRE(b.plate.has_value());
    CHECK(b.plate->coherent);
    CHECK(std::isinf(b.plate->aperture_half_width));
    CHECK(b.plate->transmission(0) == 0.0227);
    const BenchConfig d = bench_config(preset("fig5b_dephased"));
    CHECK_FALSE(d.plate->coherent);
    CHECK(d.shots == 200);
    CHECK(b.scan.to == doctest::Approx(3 * b.image_waist()));
    CHECK_THROWS_AS(bench_config(Config::parse("bench.scan.from = 0\nbench.scan.from_waists = 1\n")), ConfigError);
    CHECK_THROWS_AS(preset("fig9"), ConfigError);
  }

  TEST_CASE("every preset is consumed by its command") {
    for (const auto& name : preset_names()) {
      CAPTURE(name);
      const Config c = preset(name);
      if (name == "fig1") {
        spectrum_model(c);
        c.get_double("spectrum.band_min", 0);
        c.get_double("spectrum.band_max", 0);
        c.get_int("spectrum.samples", 0);
      } else {
        bench_config(c);
        c.get_bool("compare.without_plate", false);
        c.find_double("compare.reference_visibility");
      }
      CHECK_NOTHROW(c.require_all_used());
    }
  }

  TEST_CASE("CSV round trip is exact") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    Table t;
    t.columns = {"a", "b"};
    t.data.assign(2, {});
    for (int k = 0; k < 500; ++k) {
      t.data[0].push_back(u(rng) * std::pow(10.0, 40 * u(rng)));
      t.data[1].push_back(u(rng));
    }
    t.data[0][0] = 0.1;
    t.data[1][0] = 5e-324;
    const auto dir = scratch("csv");
    write_csv(dir / "t.csv", t);
    const Table back = read_csv(dir / "t.csv");
    CHECK(back.columns == t.columns);
    CHECK(back.data == t.data);
    CHECK(format_double(0.1) == "0.10000000000000001");

    Eigen::ArrayXXd g = Eigen::ArrayXXd::Random(7, 5) * 1e-7;
    write_grid_csv(dir / "g.csv", g);
    CHECK((read_grid_csv(dir / "g.csv") == g).all());
  }

  TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    write_file(dir / "unreachable.conf", "calibrate.target_efficiency = 0.5\n");
    write_file(dir / "typo.conf", "calibrate.target = 0.3\n");
    write_file(dir / "band.conf", "spectrum.band_min = 200e-9\n");
    write_file(dir / "ok.conf", "calibrate.target_efficiency = 0.3\n");
    CHECK(run_tool("calibrate --config " + (dir / "ok.conf").string() + " --out " + (dir / "o").string()) == 0);
    CHECK(run_tool("calibrate --config " + (dir / "unreachable.conf").string() + " --out " + (dir / "o").string()) == 4);
    CHECK(run_tool("calibrate --config " + (dir / "typo.conf").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_tool("spectrum --config " + (dir / "band.conf").string() + " --out " + (dir / "o").string()) == 3);
    CHECK(run_tool("calibrate --config " + (dir / "missing.conf").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_tool("calibrate --config " + (dir / "ok.conf").string()) == 2);
    CHECK(run_tool("wobble --config " + (dir / "ok.conf").string() + " --out " + (dir / "o").string()) == 2);
    CHECK(run_tool("scan --preset nope --out " + (dir / "o").string()) == 2);
  }

  TEST_CASE("calibrate output") {
    const auto dir = scratch("cal");
    cmd_calibrate(Config::parse("calibrate.target_efficiency = 0.30\n"), dir);
    const auto s = read_summary(dir / "calibration.txt");
    CHECK(parse_double(s.at("residual"), "residual") < 1e-9);
    const double d = parse_double(s.at("phase_depth"), "phase_depth");
    CHECK(std::pow(std::cyl_bessel_j(1.0, d), 2) == doctest::Approx(0.30).epsilon(1e-9));
  }

  TEST_CASE("modes output") {
    const auto dir = scratch("modes");
    cmd_modes(Config::parse("modes.list = 0,1; 1,-2\nmodes.grid.points = 128\n"), dir, true);
    const auto power = read_grid_csv(dir / "lg_p0_l1_power.csv");
    CHECK(power.sum() == doctest::Approx(1).epsilon(1e-6));
    // winding of the phase map around a ring of radius 16 cells
    const auto phase = read_grid_csv(dir / "lg_p0_l1_phase.csv");
    auto ring = [&](int k) {
      const double t = 2 * M_PI * (k % 360) / 360;
      return phase(static_cast<int>(std::lround(63.5 + 16 * std::cos(t))),
                   static_cast<int>(std::lround(63.5 + 16 * std::sin(t))));
    };
    double wind = 0, prev = ring(0);
    for (int k = 1; k <= 360; ++k) {
      const double cur = ring(k);
      wind += std::remainder(cur - prev, 2 * M_PI);
      prev = cur;
    }
    CHECK(wind / (2 * M_PI) == doctest::Approx(1).epsilon(1e-9));
    const Table spec = read_csv(dir / "lg_p0_l1_spectrum.csv");
    for (std::size_t k = 0; k < spec.rows(); ++k)
      if (spec.column("l")[k] == 1) CHECK(spec.column("fraction")[k] >= 0.999);
    CHECK(fs::exists(dir / "lg_p1_l-2_phase.ppm"));
    CHECK_THROWS_AS(cmd_modes(Config::parse("modes.list = 0;1\n"), dir, false), ConfigError);
    CHECK_THROWS_AS(cmd_modes(Config::parse("modes.list = -1,1\n"), dir, false), ConfigError);
  }

  TEST_CASE("spectrum output") {
    const auto dir = scratch("spec");
    Config flat = preset("fig1");
    flat.merge(Config::parse("spectrum.peak.height = 0\nspectrum.calibrated = false\n"));
    cmd_spectrum(flat, dir / "flat", false);
    const Table f = read_csv(dir / "flat" / "spectrum.csv");
    CHECK(f.column("transmittance") == f.column("classical_baseline"));

    cmd_spectrum(preset("fig1"), dir / "cal", true);
    const Table t = read_csv(dir / "cal" / "spectrum.csv");
    for (std::size_t k = 0; k < t.rows(); ++k)
      if (std::abs(t.column("wavelength_nm")[k] - 670) < 1e-9) CHECK(t.column("transmittance")[k] == doctest::Approx(0.025).epsilon(0.05));
    const auto s = read_summary(dir / "cal" / "resonances.txt");
    const SpectrumModel m = spectrum_model(preset("fig1"));
    for (const auto& r : sp_resonance_wavelengths(m, m.orders, Interface::Air)) {
      const std::string key = "air.(" + std::to_string(r.i) + "," + std::to_string(r.j) + ").wavelength_nm";
      CHECK(s.at(key) == format_double(r.wavelength * 1e9));
    }
    CHECK(fs::exists(dir / "cal" / "spectrum.svg"));
  }

  TEST_CASE("scan output and determinism") {
    const auto dir = scratch("scan");
    write_file(dir / "small.conf", kSmall);
    RunManifest m{"scan", dir / "small.conf", "fig3a", dir / "a", false, true, 7};
    run(m);
    m.output_dir = dir / "b";
    run(m);
    CHECK(slurp(dir / "a" / "scan.csv") == slurp(dir / "b" / "scan.csv"));
    const Table t = read_csv(dir / "a" / "scan.csv");
    const auto& counts = t.column("counts");
    const auto k = std::min_element(counts.begin(), counts.end()) - counts.begin();
    CHECK(std::abs(t.column("displacement_waists")[k]) < 1e-9);
    CHECK(fs::exists(dir / "a" / "summary.txt"));
    CHECK_FALSE(fs::exists(dir / "a" / "scan.svg"));
  }

  TEST_CASE("coherent superposition summary reports the null shift") {
    const auto dir = scratch("shift");
    write_file(dir / "small.conf", kSmall);
    run(RunManifest{"scan", dir / "small.conf", "fig5b", dir / "o", true, true, std::nullopt});
    const auto s = read_summary(dir / "o" / "summary.txt");
    REQUIRE(s.count("null_shift_m"));
    CHECK(parse_double(s.at("null_shift_m"), "null_shift_m") != 0);
    CHECK(s.at("reference.visibility") == format_double(0.944));
    CHECK(fs::exists(dir / "o" / "scan.svg"));
  }
}
