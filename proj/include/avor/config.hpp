#pragma once

#include "avor/evaluation.hpp"
#include "avor/kinematics.hpp"
#include "avor/phases.hpp"
#include "avor/risk_engine.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace avor
{

struct Config
{
  EngineParams engine;
  KinematicsOptions kinematics;
  PhaseOptions phases;
  NormalizeOptions normalize;
  double onset_threshold{0.5};

  void validate() const;
  EvalOptions eval_options() const;
};

/// Sets one key given as "section.key" from its textual value (numbers, true/false, or
/// quoted/bare strings). Throws parse error for unknown keys or malformed values.
void set_config_value(Config & config, std::string_view dotted_key, std::string_view value);

/// All recognised "section.key" names.
std::vector<std::string> config_keys();

/// Applies a TOML-style document ([section] headers, key = value lines, # comments).
void apply_config_text(Config & config, std::string_view text);
Config load_config(const std::filesystem::path & path);

/// Applies AVOR_<SECTION>_<KEY> variables, e.g. AVOR_GRID_RES=0.125.
using EnvLookup = std::function<std::optional<std::string>(const std::string &)>;
void apply_env_overrides(Config & config, const EnvLookup & lookup);
void apply_env_overrides(Config & config);

/// Canonical text of the configuration, loadable by apply_config_text.
std::string config_to_text(const Config & config);

}  // namespace avor
