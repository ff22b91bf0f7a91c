#pragma once

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emg/harness.hpp"

namespace emg::io {

/// One `key = value` assignment and where it came from ("path:line", "--set").
struct ConfigEntry {
  std::string key;
  std::string value;
  std::string location;
};

/// Grammar: one `key = value` per line, `#` starts a comment, blank lines are
/// ignored. A key may appear once per document.
std::vector<ConfigEntry> parse_config_text(std::string_view text, const std::string& source);
std::vector<ConfigEntry> read_config_file(const std::filesystem::path& path);

/// `key=value` from the command line.
ConfigEntry parse_override(std::string_view assignment, const std::string& location = "--set");

/// Every key accepted by apply_entries.
const std::vector<std::string>& config_keys();

/// Assigns each entry onto `spec`; unknown keys and malformed values throw
/// ConfigError. Returns the set of keys that were assigned. Does not validate
/// ranges (call spec.validate() once everything is applied).
std::set<std::string> apply_entries(SweepSpec& spec, std::span<const ConfigEntry> entries);

/// Defaults, then the file (if any), then overrides in order. When neither
/// beta_values nor r_values is given the grid collapses to the single
/// (beta, R) of the run config. The result is validated.
SweepSpec parse_config(const std::filesystem::path* path, std::span<const ConfigEntry> overrides);

/// Same layering on top of an existing spec (used for figure presets, whose
/// grids stay unless overridden).
SweepSpec layer_config(SweepSpec spec, const std::filesystem::path* path, std::span<const ConfigEntry> overrides);

/// Round-trippable text form of the resolved spec in the config grammar.
std::string format_config(const SweepSpec& spec);

}  // namespace emg::io
