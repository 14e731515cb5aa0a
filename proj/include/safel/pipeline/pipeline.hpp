#pragma once

#include <map>
#include <string>
#include <vector>

#include "safel/pipeline/corrector.hpp"

namespace safel::pipeline {

// Per-scenario trail through verify -> correct -> re-verify.
struct ScenarioOutcome {
  std::string id;
  VerdictReport verdict;               // initial verdict
  std::vector<std::string> corrections;  // rules applied, if any
  enum class Bucket { FILTERED, CORRECTED, BURIED, REJECTED } bucket =
      Bucket::FILTERED;
};

struct PipelineReport {
  std::vector<Scenario> filtered;   // passed verification as-is
  std::vector<Scenario> corrected;  // passed after rule-based correction
  std::vector<std::string> buried;  // correctable but unfixable (ids)
  std::vector<std::string> rejected;  // failed V3-V5 or syntax (ids)
  std::map<std::string, size_t> failure_histogram;  // criterion -> findings
  std::vector<ScenarioOutcome> outcomes;            // input order

  // The dataset that survives: filtered + corrected, input order preserved.
  std::vector<Scenario> accepted() const;
};

PipelineReport run_pipeline(const std::vector<Scenario>& scenarios,
                            const pddl::Domain& base_domain);

}  // namespace safel::pipeline
