#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"

namespace safel::eval {

// Canonical view of one action schema: precondition as DNF over canonical
// literal strings (variables renamed positionally to ?p0, ?p1, ...; forall
// binders to ?f0, ?f1, ... by nesting depth), effects as a flat feature set
// where when/forall subtrees become structural fingerprints.
struct ExtractedConditions {
  std::vector<std::set<std::string>> pre_disjuncts;
  std::set<std::string> eff_features;
};

ExtractedConditions extract_conditions(const pddl::ActionSchema& schema);

struct TMScore {
  std::string action_name;
  pddl::ActionClass action_class = pddl::ActionClass::PRIMITIVE;
  double pre_score = 0.0;  // fractions in [0,1]
  double eff_score = 0.0;
  double combined = 0.0;  // (pre_score + eff_score) / 2
};

// F1 between canonical condition sets; the precondition half takes the best
// F1 over all (predicted, gt) disjunct pairs. Name and class come from gt.
TMScore score_action(const pddl::ActionSchema& predicted,
                     const pddl::ActionSchema& gt);

struct TMAggregate {
  std::optional<double> ap_s;   // mean combined over PRIMITIVE scores
  std::optional<double> an_s;   // mean combined over NEW scores
  std::optional<double> a_avg;  // mean over all scores
};

TMAggregate aggregate_tm(const std::vector<TMScore>& scores);

}  // namespace safel::eval
