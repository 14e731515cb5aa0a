#pragma once

#include <string>
#include <vector>

#include "safel/pipeline/verifier.hpp"

namespace safel::pipeline {

// Result of the rule-based correction pass. `fixed` is false when the
// scenario stays broken after all applicable rules ran ("buried").
struct CorrectionResult {
  bool fixed = false;
  Scenario scenario;                 // corrected content when fixed
  std::vector<std::string> applied;  // human-readable rule applications
  VerdictReport reverify;            // verdict after correction
};

// Applies the correction rules to a CORRECTABLE scenario and re-verifies:
//   R1  declare undeclared predicates (arity inferred from use, object-typed)
//   R2  declare undeclared types as direct children of the root type
//   R3  declare objects missing from :objects when an init literal names
//       them and the `<type>_<k>` convention implies a declared type
//   R4  drop duplicate init literals
//   R5  drop explicit negative init literals (closed world keeps them false)
// Anything else is out of scope; object or step invention never happens.
// Non-CORRECTABLE input is passed through unchanged with a note.
CorrectionResult correct_scenario(const Scenario& scenario,
                                  const VerdictReport& verdict,
                                  const pddl::Domain& base_domain);

}  // namespace safel::pipeline
