#include "safel/pipeline/pipeline.hpp"

namespace safel::pipeline {

std::vector<Scenario> PipelineReport::accepted() const {
  std::vector<Scenario> out;
  size_t fi = 0;
  size_t ci = 0;
  for (const ScenarioOutcome& outcome : outcomes) {
    if (outcome.bucket == ScenarioOutcome::Bucket::FILTERED) {
      out.push_back(filtered[fi++]);
    } else if (outcome.bucket == ScenarioOutcome::Bucket::CORRECTED) {
      out.push_back(corrected[ci++]);
    }
  }
  return out;
}

PipelineReport run_pipeline(const std::vector<Scenario>& scenarios,
                            const pddl::Domain& base_domain) {
  PipelineReport report;

  for (const Scenario& scenario : scenarios) {
    ScenarioOutcome outcome;
    outcome.id = scenario.id;
    outcome.verdict = verify_scenario(scenario, base_domain);
    for (const Finding& finding : outcome.verdict.findings) {
      ++report.failure_histogram[finding.criterion];
    }

    switch (outcome.verdict.status) {
      case VerdictStatus::PASS:
        outcome.bucket = ScenarioOutcome::Bucket::FILTERED;
        report.filtered.push_back(scenario);
        break;
      case VerdictStatus::REJECT:
        outcome.bucket = ScenarioOutcome::Bucket::REJECTED;
        report.rejected.push_back(scenario.id);
        break;
      case VerdictStatus::CORRECTABLE: {
        CorrectionResult correction =
            correct_scenario(scenario, outcome.verdict, base_domain);
        outcome.corrections = correction.applied;
        if (correction.fixed) {
          outcome.bucket = ScenarioOutcome::Bucket::CORRECTED;
          report.corrected.push_back(correction.scenario);
        } else {
          outcome.bucket = ScenarioOutcome::Bucket::BURIED;
          report.buried.push_back(scenario.id);
        }
        break;
      }
    }
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

}  // namespace safel::pipeline
