#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "safel/world/world.hpp"

namespace safel::planner {

struct Plan {
  std::vector<world::GroundAction> steps;
};

enum class SearchMode { BFS, GREEDY };

struct SearchLimits {
  size_t max_expansions = 200'000;
  size_t max_plan_length = 40;
  SearchMode mode = SearchMode::BFS;
};

enum class SearchStatus { FOUND, NO_PLAN_PROVED, RESOURCE_LIMIT };

struct SearchResult {
  SearchStatus status = SearchStatus::NO_PLAN_PROVED;
  Plan plan;  // meaningful when status == FOUND
  size_t expansions = 0;
};

// Forward search from the initial state. BFS returns a step-minimal plan;
// GREEDY orders the frontier by unmet-goal-literal count but still exhausts
// the reachable space (duplicate detection), so NO_PLAN_PROVED is exact in
// both modes. Successors are expanded in (schema declaration order,
// lexicographic binding order) for reproducibility.
SearchResult find_plan(const world::World& world, const SearchLimits& limits = {});

struct StepFailure {
  size_t step = 0;            // 0-based index into the plan
  std::string reason;         // unknown action / arity mismatch / unmet preconditions
  world::ApplicabilityReport report;
};

struct ExecutionTrace {
  std::vector<world::State> states;  // states.front() == init
  std::optional<StepFailure> failure;
  bool goal_satisfied = false;       // evaluated only on full execution
  std::vector<pddl::Literal> unmet_goal;

  bool ok() const { return !failure.has_value(); }
};

// Execute plan steps in order from the initial state, stopping at the first
// inapplicable/unresolvable step. Invalid names and arities surface as
// failures, not errors.
ExecutionTrace validate_plan(const world::World& world,
                             const std::vector<pddl::GroundActionRef>& plan);

// All ground instances of every schema, in deterministic expansion order.
std::vector<world::GroundAction> ground_actions(const world::World& world);

}  // namespace safel::planner
