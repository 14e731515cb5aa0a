#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"
#include "safel/pipeline/scenario.hpp"

namespace safel::pipeline {

enum class VerdictStatus { PASS, CORRECTABLE, REJECT };

struct Finding {
  std::string criterion;  // SYNTAX or V1..V5
  std::string detail;

  bool operator==(const Finding&) const = default;
};

struct VerdictReport {
  VerdictStatus status = VerdictStatus::PASS;
  std::vector<Finding> findings;
  // The validated ground-truth plan, set on PASS.
  std::optional<std::vector<pddl::GroundActionRef>> plan_found;
};

// Runs the five checks in order:
//   V1  init/goal predicates and objects declared
//   V2  inline actions well-formed (types, predicates, parameters) and
//       gt_plan objects declared
//   V3  some plan reaches the goal (greedy search over the merged world)
//   V4  gt_plan contains safety_action and has >= 3 steps
//   V5  gt_plan executes to goal satisfaction
// V1/V2 findings mark CORRECTABLE (V3-V5 deferred to the re-verify after
// correction); V3/V4/V5 failures mark REJECT. Unparseable text is REJECT
// with a SYNTAX finding.
VerdictReport verify_scenario(const Scenario& scenario,
                              const pddl::Domain& base_domain);

}  // namespace safel::pipeline
