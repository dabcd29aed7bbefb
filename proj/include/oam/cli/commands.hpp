#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "oam/cli/config.hpp"

namespace oam::cli {

struct RunManifest {
  std::string command;  // scan | spectrum | calibrate | modes
  std::optional<std::filesystem::path> config_path;
  std::optional<std::string> preset;
  std::filesystem::path output_dir;
  bool emit_plots = true;
  bool emit_csv = true;
  std::optional<std::uint64_t> seed;
};

// Measured visibilities, reported next to simulated ones.
struct ReferenceVisibility {
  const char* name;
  double value;
};
inline constexpr ReferenceVisibility kReferenceVisibilities[] = {
    {"superposition_0_1_without_plate", 0.960},
    {"superposition_0_1_with_plate", 0.944},
    {"superposition_0_m1_without_plate", 0.819},
    {"superposition_0_m1_with_plate", 0.820},
};

// Preset (if any), then the config file, then command-line overrides.
Config manifest_config(const RunManifest& m);

void cmd_scan(const Config& c, const std::filesystem::path& out, bool plots);
void cmd_spectrum(const Config& c, const std::filesystem::path& out, bool plots);
void cmd_calibrate(const Config& c, const std::filesystem::path& out);
void cmd_modes(const Config& c, const std::filesystem::path& out, bool plots);

// Runs the manifest; exceptions propagate.
void run(const RunManifest& m);

// Exit code for an exception: 2 config, 3 numeric, 4 domain range.
int exit_code_for(const std::exception& e);

}  // namespace oam::cli
