#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace safel::pipeline {

// Scenario record violating the file schema; `path` names the offending key.
struct SchemaError : std::runtime_error {
  std::string path;
  SchemaError(const std::string& message, std::string offending_path)
      : std::runtime_error(message + " (at " + offending_path + ")"),
        path(std::move(offending_path)) {}
};

enum class Subset { MAL, SIT };

// One benchmark scenario. `safety_action` is sourced from
// action_with_risky_effect for MAL records and action_with_safe_precondition
// for SIT records. `pddl_text` keeps the problem verbatim for round-trips.
struct Scenario {
  std::string id;
  Subset subset = Subset::SIT;
  std::string instruction;
  std::string pddl_text;
  std::string safety_action;
  std::map<std::string, std::string> new_actions_description;
  std::optional<std::string> hidden_hazard;
  std::vector<std::string> gt_plan;
  std::map<std::string, std::string> hazard_meta;
};

Scenario load_scenario(const nlohmann::json& record);

// One JSON record per line; blank lines are skipped.
std::vector<Scenario> load_scenario_file(const std::string& path);

}  // namespace safel::pipeline
