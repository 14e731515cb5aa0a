#pragma once

#include <set>
#include <string>
#include <vector>

#include "safel/harness/client.hpp"
#include "safel/harness/store.hpp"
#include "safel/pddl/ast.hpp"
#include "safel/pipeline/scenario.hpp"

namespace safel::harness {

struct RunSummary {
  size_t completed = 0;  // records appended with a model answer
  size_t skipped = 0;    // resume hits and subset-restricted skips
  size_t failed = 0;     // recorded per-record failures
  std::vector<std::string> notes;  // one line per skip reason / failure
};

// Runs the selected tests over an already-verified dataset, resuming from
// `store`. Each (scenario, test) renders, queries, parses, and scores into
// one EvalRecord; SEQUENCE runs only on SIT scenarios. Per-record transport
// and parse failures are recorded (reruns skip them); AuthError aborts the
// run since every further call would fail the same way. Endpoint calls run
// on config.max_concurrent workers; store appends are serialized.
RunSummary run_evaluation(const std::vector<pipeline::Scenario>& dataset,
                          const pddl::Domain& base_domain,
                          const EndpointConfig& config,
                          const std::set<Test>& tests, ResultStore& store);

}  // namespace safel::harness
