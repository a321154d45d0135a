#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pricekit/filters.hpp"
#include "pricekit/simgen.hpp"
#include "pricekit/types.hpp"

namespace pricekit {

// Small TOML-subset reader: [section.sub] headers, key = value pairs,
// strings, integers, floats, booleans, flat arrays, # comments. Keys are
// flattened to dotted paths.
struct TomlValue {
  std::variant<bool, std::int64_t, double, std::string, std::vector<double>> v;

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;  // accepts integers
  const std::string& as_string() const;
  std::vector<double> as_array() const;
};

using TomlTable = std::map<std::string, TomlValue>;

TomlTable parse_toml(const std::string& text);
TomlTable parse_toml_file(const std::string& path);

// Resolved pipeline configuration. The config file is the single source of
// truth; every CLI flag mirrors a key and wins on conflict.
struct RunConfig {
  // run
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  int workers = 0;  // 0 = auto

  // input
  std::string panel_path;  // empty when simulating
  char delimiter = ',';
  bool minor_units = false;
  bool impute_missing = false;
  std::optional<std::string> input_start_date;          // week 1 calendar date
  std::map<std::string, std::string> store_formats;     // input.format.<store> keys

  // simulate
  std::string preset;  // preset name or path; empty = no simulation block
  std::optional<int> sim_weeks;
  std::optional<std::string> sim_start_date;

  // filter
  FilterParams filter;

  // magnitude
  int bootstrap = 1000;
  bool duration_basis_implied = false;  // false = expected-duration path
  bool excess_kurtosis = false;

  // hazard
  bool efron_ties = false;

  // input.column.<canonical> renames
  std::map<std::string, std::string> column_renames;

  // Serialized echo of the resolved configuration (key = value lines).
  std::string echo() const;
};

RunConfig config_from_toml(const TomlTable& table);

// Named preset ("edlp", "hilo", "hyb", "canadian") or a path to a preset
// file. Named presets resolve to the embedded copies; the files under
// presets/ carry the same contents.
SimConfig load_preset(const std::string& name_or_path);

// Embedded preset text (exact bytes of the shipped presets/<name>.toml).
const std::string& preset_text(const std::string& name);
std::vector<std::string> preset_names();

// Builds a SimConfig from a parsed preset table.
SimConfig sim_config_from_toml(const TomlTable& table);

}  // namespace pricekit
