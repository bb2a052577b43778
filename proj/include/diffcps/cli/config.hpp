#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "diffcps/trainer/config.hpp"

namespace diffcps::cli {

enum class Algorithm { DiffCps, Awr, DiffusionBc };

Algorithm parse_algorithm(const std::string& name);
std::string algorithm_name(Algorithm algo);

/// Everything a `train` run depends on. Every field has a default; values
/// are layered defaults < config file < command-line flags.
struct ExperimentConfig {
  Algorithm algo = Algorithm::DiffCps;
  TrainConfig train;
  std::string data;
  std::string out = "diffcps-run";

  /// Sets one field from its key=value spelling. Unknown keys and
  /// unparsable values throw ConfigError.
  void set(const std::string& key, const std::string& value);
  /// All keys in a fixed order with their current values, round-trippable
  /// through set().
  std::vector<std::pair<std::string, std::string>> entries() const;
  void validate() const;
};

/// Keys accepted by ExperimentConfig::set, in the order entries() uses.
const std::vector<std::string>& config_keys();

/// Flat key=value text; `#` starts a comment, blank lines are ignored.
std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text);
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

std::string to_config_text(const ExperimentConfig& config);
void write_config_file(const ExperimentConfig& config, const std::filesystem::path& path);

}  // namespace diffcps::cli
