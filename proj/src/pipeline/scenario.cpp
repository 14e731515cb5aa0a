#include "safel/pipeline/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace safel::pipeline {
namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return text;
}

std::string require_string(const nlohmann::json& record,
                           const std::string& key) {
  if (!record.contains(key)) {
    throw SchemaError("missing key", key);
  }
  if (!record[key].is_string()) {
    throw SchemaError("expected a string", key);
  }
  return record[key].get<std::string>();
}

std::map<std::string, std::string> string_map(const nlohmann::json& value,
                                              const std::string& key) {
  std::map<std::string, std::string> out;
  if (value.is_string()) {
    // Tolerated shape: a single free-text block.
    out[""] = value.get<std::string>();
    return out;
  }
  if (!value.is_object()) {
    throw SchemaError("expected an object of strings", key);
  }
  for (const auto& [name, text] : value.items()) {
    out[name] = text.is_string() ? text.get<std::string>() : text.dump();
  }
  return out;
}

}  // namespace

Scenario load_scenario(const nlohmann::json& record) {
  if (!record.is_object()) {
    throw SchemaError("scenario record must be a JSON object", "$");
  }

  Scenario scenario;
  scenario.id = require_string(record, "id");

  std::string subset = lower(require_string(record, "subset"));
  if (subset == "mal") {
    scenario.subset = Subset::MAL;
  } else if (subset == "sit") {
    scenario.subset = Subset::SIT;
  } else {
    throw SchemaError("subset must be 'mal' or 'sit', got '" + subset + "'",
                      "subset");
  }

  scenario.instruction = require_string(record, "natural_language_instruction");
  scenario.pddl_text = require_string(record, "PDDL_scenario");

  const std::string safety_key = scenario.subset == Subset::MAL
                                     ? "action_with_risky_effect"
                                     : "action_with_safe_precondition";
  scenario.safety_action = lower(require_string(record, safety_key));

  if (!record.contains("new_actions_description")) {
    throw SchemaError("missing key", "new_actions_description");
  }
  scenario.new_actions_description =
      string_map(record["new_actions_description"], "new_actions_description");

  if (record.contains("hidden_hazard") && record["hidden_hazard"].is_string()) {
    scenario.hidden_hazard = record["hidden_hazard"].get<std::string>();
  }

  if (!record.contains("gt_plan")) {
    throw SchemaError("missing key", "gt_plan");
  }
  if (!record["gt_plan"].is_array()) {
    throw SchemaError("expected an array of plan lines", "gt_plan");
  }
  for (size_t i = 0; i < record["gt_plan"].size(); ++i) {
    const nlohmann::json& step = record["gt_plan"][i];
    if (!step.is_string()) {
      throw SchemaError("expected a string", "gt_plan[" + std::to_string(i) +
                                                 "]");
    }
    scenario.gt_plan.push_back(step.get<std::string>());
  }

  if (record.contains("hazard_meta")) {
    scenario.hazard_meta = string_map(record["hazard_meta"], "hazard_meta");
  }
  return scenario;
}

std::vector<Scenario> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw SchemaError("cannot open scenario file '" + path + "'", path);
  }

  std::vector<Scenario> scenarios;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record =
        nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded()) {
      throw SchemaError("invalid JSON record",
                        path + ":" + std::to_string(line_no));
    }
    scenarios.push_back(load_scenario(record));
  }
  return scenarios;
}

}  // namespace safel::pipeline
