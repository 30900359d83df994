#pragma once

#include <string>
#include <vector>

#include "mlsim/scenario.hpp"

namespace mlsim {

/// The strategy x MP x replication execution matrix.
struct RunMatrix {
  std::vector<Strategy> strategies{Strategy::BASE, Strategy::UML, Strategy::MML, Strategy::DL,
                                   Strategy::DLA};
  std::vector<double> mp_values;  // default 0.05..0.55 step 0.05
  int replications = 5;
  std::uint64_t base_seed = 42;

  RunMatrix();
};

struct LoadedConfig {
  ScenarioConfig scenario;
  RunMatrix matrix;
};

/// Parses the key/value scenario file (INI-style sections, '#' comments,
/// repeated keys for table rows). Unset keys keep their defaults. Throws
/// ConfigError with a line reference on malformed input.
LoadedConfig load_config_file(const std::string& path);

/// Parses from an in-memory string (tests and embedded defaults).
LoadedConfig parse_config(const std::string& text, const std::string& origin = "<config>");

/// Parse + cross-field validation; returns all problems (empty = ok).
std::vector<std::string> validate_config_file(const std::string& path);

/// Parses "0.1,0.2" lists or "0.05:0.55:0.05" ranges of MP values.
std::vector<double> parse_mp_list(const std::string& text);

/// Parses "BASE,UML,..." strategy lists.
std::vector<Strategy> parse_strategy_list(const std::string& text);

}  // namespace mlsim
