#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"

namespace safel::eval {

// Goal-interpretation output that is not a parseable JSON object of the
// expected shape. Callers record it and score the scenario as zero recall.
struct MalformedOutput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Predicted goal literals, split as the model reported them: node goals are
// unary object states, edge goals binary relations.
struct PredictedGoals {
  std::vector<pddl::Literal> node_goals;
  std::vector<pddl::Literal> edge_goals;
};

// Parses {"node goals": [...], "edge goals": [...]} with ["not", [...]]
// negation nesting; names are case-folded. Leading free-form text before
// the JSON object is skipped.
PredictedGoals parse_goal_output(const std::string& text);

struct GoalRecall {
  // Fractions in [0,1]; empty when the goal has no literals of that arity.
  std::optional<double> su_recall;  // unary goal literals
  std::optional<double> sr_recall;  // relational goal literals
};

// Recall of ground-truth goal literals (a conjunction) against the
// prediction: matched iff predicate, argument tuple, and polarity agree.
// Extra predicted literals never change recall.
GoalRecall score_goals(const PredictedGoals& predicted,
                       const pddl::Condition& gt_goal);

}  // namespace safel::eval
