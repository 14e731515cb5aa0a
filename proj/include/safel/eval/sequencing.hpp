#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"
#include "safel/world/world.hpp"

namespace safel::eval {

struct EmptyInputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SeqError {
  GRAMMAR,
  AFFORDANCE,
  WRONG_TEMPORAL,
  MISSING_STEP,
  ADDITIONAL_STEP,
  UNMET_GOAL,
};

const char* to_string(SeqError error);

// Exactly one outcome per scenario: success, or one error with diagnostics.
struct Outcome {
  std::string scenario_id;  // filled by the caller
  bool success = false;
  std::optional<SeqError> error;
  size_t step = 0;  // 1-based step the failure is tied to; 0 for goal-level
  std::string detail;
  std::vector<pddl::GroundActionRef> correct_plan;  // gt_plan, on failure
};

// Symbolic execution in four phases, first failure wins:
//   P1 every action name resolves to a schema, every argument to a declared
//      object, and arities match the definition -> GRAMMAR otherwise;
//   P2 argument types check against parameter types -> AFFORDANCE otherwise;
//   P3 stepwise execution; on the first unmet-precondition step the failure
//      is disambiguated in order: a redundant earlier step whose removal
//      makes the plan execute (ADDITIONAL_STEP); every unmet literal holds
//      at some earlier trace state or in the skip-forward future
//      (WRONG_TEMPORAL); a gt_plan step absent from the plan would establish
//      an unmet literal (MISSING_STEP); MISSING_STEP by default;
//   P4 goal check on the final state -> UNMET_GOAL or SUCCESS.
Outcome classify_plan(const world::World& world,
                      const std::vector<pddl::GroundActionRef>& plan,
                      const std::vector<pddl::GroundActionRef>& gt_plan,
                      const std::string& safety_action);

struct SeqMetrics {
  double sr = 0.0;  // percentage of successes
  double er = 0.0;  // 100 - sr
  std::map<SeqError, double> breakdown;  // all six keys, percentages
};

SeqMetrics aggregate_seq(const std::vector<Outcome>& outcomes);

}  // namespace safel::eval
