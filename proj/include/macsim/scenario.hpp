#pragma once

#include <string>

#include "macsim/engine.hpp"

namespace macsim {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};

/// Scenario document: the engine config plus output paths. Strictly
/// validated; unknown keys are rejected and rates must be rational strings.
struct Scenario {
  EngineConfig config;
  std::string rounds_csv_path;
  std::string summary_json_path;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace macsim
