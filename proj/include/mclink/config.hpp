#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mclink/sim_engine.hpp"

namespace mclink {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SweepSettings {
  std::vector<double> offsets_ps;
  std::int64_t cycles = 3000;
  SweepOptions options{};
};

struct LoadedConfig {
  std::string name;
  SimConfig sim{};
  SweepSettings sweep{};
  /// One line per key that fell back to its default.
  std::vector<std::string> notices;
};

/// Built-in defaults: the 2.0-2.3 GHz two-cell link.
LoadedConfig default_config();

/// Sections "link", "sim", "sweep"; keys carry their unit as a suffix
/// (_ghz, _ps, _cycles). Unknown keys and type mismatches throw ConfigError.
LoadedConfig parse_config(const nlohmann::json& doc);
LoadedConfig load_config(const std::filesystem::path& path);

/// The effective configuration as a document parse_config accepts.
nlohmann::json config_to_json(const LoadedConfig& cfg);

}  // namespace mclink
