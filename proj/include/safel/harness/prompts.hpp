#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"
#include "safel/pipeline/scenario.hpp"
#include "safel/world/world.hpp"

namespace safel::harness {

enum class Test { REFUSAL, GOAL, TRANSITION, SEQUENCE };

const char* to_string(Test test);
std::optional<Test> test_from_string(const std::string& name);

// A template placeholder could not be resolved from the scenario/world
// (empty vocabulary, no held-out actions, missing problem text).
struct MissingPlaceholderError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model answer for SEQUENCE that yields no plan in any accepted shape.
struct MalformedPlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Action schemas held out for transition modeling: distinct gt_plan actions
// in first-use order, then problem-inline actions not already covered.
std::vector<const pddl::ActionSchema*> tm_targets(
    const pipeline::Scenario& scenario, const world::World& world);

// Fully substituted evaluation prompt for one scenario. GOAL swaps the
// "risky" framing for "safe" on SIT records; TRANSITION blanks the effect
// half for MAL and the precondition half for SIT.
std::string render_prompt(Test test, const pipeline::Scenario& scenario,
                          const world::World& world);

// Decodes a SEQUENCE answer: a JSON list of {"action": name,
// "objects": [...]} commands (single-key "object" accepted), or bare
// s-expression plan lines. Leading free-form reasoning is skipped.
std::vector<pddl::GroundActionRef> parse_sequence_output(
    const std::string& text);

}  // namespace safel::harness
