#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "lmsim/engine.hpp"

namespace lmsim {

/// Documentation entry for one configuration key.
struct ConfigKey {
  std::string_view section;
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

/// Every accepted key, in canonical order.
std::span<const ConfigKey> config_keys();

/// Parse the flat configuration format:
///
///   # comment
///   [section]
///   key = value
///
/// Missing keys take their defaults. Unknown sections or keys, duplicates
/// and malformed values raise ParseError with the line number; violated
/// invariants raise ValidationError.
SimulationConfig parse_config(std::string_view text);

struct LoadedConfig {
  SimulationConfig config;
  std::string source;  // file contents, verbatim
};

LoadedConfig load_config(const std::filesystem::path& path);

/// Canonical text with every key resolved. Parsing it yields the same config.
std::string serialize_config(const SimulationConfig& config);

/// 64-bit FNV-1a of serialize_config, as 16 hex digits.
std::string fingerprint(const SimulationConfig& config);

}  // namespace lmsim
