#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "oam/bench.hpp"
#include "oam/plate.hpp"

namespace oam::cli {

// Flat `key = value` text; '#' starts a comment; later assignments override earlier ones.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>");
  static Config load(const std::filesystem::path& path);

  // Entries of `later` override ours.
  void merge(const Config& later);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::optional<double> find_double(const std::string& key) const;

  // Keys below `prefix.` (the suffix after the prefix).
  std::vector<std::string> keys_under(const std::string& prefix) const;

  // Throws ConfigError naming the first key nobody read.
  void require_all_used() const;

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  const std::string* raw(const std::string& key) const;

  std::map<std::string, std::string> values_;
  std::map<std::string, std::string> origin_;  // key -> "file:line"
  mutable std::set<std::string> used_;
  std::filesystem::path base_dir_ = ".";
};

// Numbers accept "inf", "-inf" and the usual strtod forms.
double parse_double(const std::string& text, const std::string& key);

// <prefix>.charge, .order, .phase_depth | .efficiency, .displacement_x[_waists], .displacement_y[_waists],
// .carrier_period; `unit` converts the _waists forms.
HologramSpec hologram_spec(const Config& c, const std::string& prefix, HologramSpec defaults, double unit);

BenchConfig bench_config(const Config& c);
PlateModel plate_model(const Config& c);
SpectrumModel spectrum_model(const Config& c);

}  // namespace oam::cli
