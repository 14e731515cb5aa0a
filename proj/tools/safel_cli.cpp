#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "safel/eval/sequencing.hpp"
#include "safel/harness/client.hpp"
#include "safel/harness/report.hpp"
#include "safel/harness/runner.hpp"
#include "safel/harness/store.hpp"
#include "safel/pddl/parser.hpp"
#include "safel/pddl/printer.hpp"
#include "safel/pipeline/pipeline.hpp"
#include "safel/planner/planner.hpp"
#include "safel/world/world.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitEndpoint = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string plan_line(const safel::world::GroundAction& action) {
  std::string out = "(" + action.schema->name;
  for (const std::string& arg : action.binding) out += ' ' + arg;
  return out + ")";
}

int cmd_validate(const std::string& dataset_path,
                 const std::string& domain_path) {
  const auto scenarios = safel::pipeline::load_scenario_file(dataset_path);
  const auto domain = safel::pddl::parse_domain(read_file(domain_path));
  const auto report = safel::pipeline::run_pipeline(scenarios, domain);

  using Bucket = safel::pipeline::ScenarioOutcome::Bucket;
  for (const auto& outcome : report.outcomes) {
    std::cout << outcome.id << ": ";
    switch (outcome.bucket) {
      case Bucket::FILTERED:
        std::cout << "pass";
        break;
      case Bucket::CORRECTED: {
        std::cout << "corrected (";
        for (size_t i = 0; i < outcome.corrections.size(); ++i) {
          if (i > 0) std::cout << "; ";
          std::cout << outcome.corrections[i];
        }
        std::cout << ")";
        break;
      }
      case Bucket::BURIED:
        std::cout << "buried";
        break;
      case Bucket::REJECTED:
        std::cout << "rejected";
        break;
    }
    if (outcome.bucket == Bucket::BURIED ||
        outcome.bucket == Bucket::REJECTED) {
      for (const auto& finding : outcome.verdict.findings) {
        std::cout << "\n  " << finding.criterion << ": " << finding.detail;
      }
    }
    std::cout << '\n';
  }

  const size_t accepted = report.filtered.size() + report.corrected.size();
  std::cout << "accepted " << accepted << "/" << report.outcomes.size()
            << " (filtered " << report.filtered.size() << ", corrected "
            << report.corrected.size() << ", buried " << report.buried.size()
            << ", rejected " << report.rejected.size() << ")\n";
  if (!report.failure_histogram.empty()) {
    std::cout << "findings:";
    for (const auto& [criterion, count] : report.failure_histogram) {
      std::cout << ' ' << criterion << " x" << count;
    }
    std::cout << '\n';
  }
  return accepted == report.outcomes.size() ? 0 : kExitData;
}

int cmd_plan(const std::string& domain_path, const std::string& problem_path,
             bool greedy, size_t max_expansions, size_t max_length) {
  const auto domain = safel::pddl::parse_domain(read_file(domain_path));
  const auto problem = safel::pddl::parse_problem(read_file(problem_path));
  const auto world = safel::world::build_world(domain, problem);

  safel::planner::SearchLimits limits;
  limits.mode = greedy ? safel::planner::SearchMode::GREEDY
                       : safel::planner::SearchMode::BFS;
  limits.max_expansions = max_expansions;
  limits.max_plan_length = max_length;
  const auto result = safel::planner::find_plan(world, limits);

  switch (result.status) {
    case safel::planner::SearchStatus::FOUND:
      for (const auto& step : result.plan.steps) {
        std::cout << plan_line(step) << '\n';
      }
      return 0;
    case safel::planner::SearchStatus::NO_PLAN_PROVED:
      std::cerr << "no plan exists (" << result.expansions
                << " states expanded)\n";
      return kExitData;
    case safel::planner::SearchStatus::RESOURCE_LIMIT:
      std::cerr << "search hit its resource limit after " << result.expansions
                << " expansions\n";
      return kExitData;
  }
  return kExitData;
}

int cmd_exec(const std::string& domain_path, const std::string& problem_path,
             const std::string& plan_path, const std::string& gt_plan_path,
             const std::string& safety_action) {
  const auto domain = safel::pddl::parse_domain(read_file(domain_path));
  const auto problem = safel::pddl::parse_problem(read_file(problem_path));
  const auto world = safel::world::build_world(domain, problem);
  const auto plan = safel::pddl::parse_plan(read_lines(plan_path));

  std::vector<safel::pddl::GroundActionRef> gt_plan;
  if (!gt_plan_path.empty()) {
    gt_plan = safel::pddl::parse_plan(read_lines(gt_plan_path));
  }

  const auto outcome =
      safel::eval::classify_plan(world, plan, gt_plan, safety_action);
  if (outcome.success) {
    std::cout << "SUCCESS\n";
    return 0;
  }
  std::cout << to_string(*outcome.error);
  if (outcome.step > 0) std::cout << " at step " << outcome.step;
  std::cout << ": " << outcome.detail << '\n';
  if (!outcome.correct_plan.empty()) {
    std::cout << "reference plan:\n";
    for (const auto& step : outcome.correct_plan) {
      std::cout << "  " << safel::pddl::render(step) << '\n';
    }
  }
  return kExitData;
}

int cmd_eval(const std::string& dataset_path, const std::string& domain_path,
             const std::string& tests_csv,
             const safel::harness::EndpointConfig& config,
             const std::string& store_path) {
  std::set<safel::harness::Test> tests;
  std::stringstream csv(tests_csv);
  std::string name;
  while (std::getline(csv, name, ',')) {
    if (name.empty()) continue;
    const auto test = safel::harness::test_from_string(name);
    if (!test) {
      std::cerr << "unknown test '" << name
                << "' (expected refusal, goal, transition, sequence)\n";
      return kExitUsage;
    }
    tests.insert(*test);
  }
  if (tests.empty()) {
    std::cerr << "no tests selected\n";
    return kExitUsage;
  }

  const auto scenarios = safel::pipeline::load_scenario_file(dataset_path);
  const auto domain = safel::pddl::parse_domain(read_file(domain_path));
  const auto pipeline_report = safel::pipeline::run_pipeline(scenarios, domain);
  const auto dataset = pipeline_report.accepted();
  if (dataset.empty()) {
    std::cerr << "no scenario in " << dataset_path << " passed verification\n";
    return kExitData;
  }
  if (dataset.size() < scenarios.size()) {
    std::cerr << "warning: evaluating " << dataset.size() << " of "
              << scenarios.size() << " scenarios (rest failed verification)\n";
  }

  safel::harness::ResultStore store(store_path);
  const auto summary =
      safel::harness::run_evaluation(dataset, domain, config, tests, store);
  for (const std::string& note : summary.notes) {
    std::cerr << "note: " << note << '\n';
  }
  std::cout << "completed " << summary.completed << ", skipped "
            << summary.skipped << ", failed " << summary.failed << '\n';
  if (summary.completed == 0 && summary.failed > 0) return kExitEndpoint;
  return 0;
}

int cmd_report(const std::string& store_path, const std::string& format_name) {
  const auto format = safel::harness::format_from_string(format_name);
  if (!format) {
    std::cerr << "unknown format '" << format_name
              << "' (expected text, csv, json)\n";
    return kExitUsage;
  }
  const safel::harness::ResultStore store(store_path);
  const auto table = safel::harness::build_report(store);
  std::cout << safel::harness::render_report(table, *format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PDDL embodied-safety scenario toolkit"};
  app.require_subcommand(1);

  std::string dataset_path, domain_path, problem_path, plan_path;
  std::string gt_plan_path, safety_action;
  std::string tests_csv = "refusal,goal,transition,sequence";
  std::string store_path, format_name = "text";
  bool greedy = false;
  size_t max_expansions = 200'000;
  size_t max_length = 40;
  safel::harness::EndpointConfig config;

  auto* validate =
      app.add_subcommand("validate", "verify and correct a scenario dataset");
  validate->add_option("dataset", dataset_path, "scenario JSONL file")
      ->required();
  validate->add_option("--domain", domain_path, "base domain file")
      ->required();

  auto* plan = app.add_subcommand("plan", "search for a goal-reaching plan");
  plan->add_option("domain", domain_path, "domain file")->required();
  plan->add_option("problem", problem_path, "problem file")->required();
  plan->add_flag("--greedy", greedy, "greedy search (default: bfs)");
  plan->add_flag("--bfs", "breadth-first search (default)");
  plan->add_option("--max-expansions", max_expansions);
  plan->add_option("--max-length", max_length);

  auto* exec =
      app.add_subcommand("exec", "execute a plan file and classify failures");
  exec->add_option("domain", domain_path, "domain file")->required();
  exec->add_option("problem", problem_path, "problem file")->required();
  exec->add_option("plan", plan_path, "plan file, one (action args) per line")
      ->required();
  exec->add_option("--gt-plan", gt_plan_path, "reference plan file");
  exec->add_option("--safety-action", safety_action);

  auto* eval = app.add_subcommand("eval", "query a model endpoint and score");
  eval->add_option("--dataset", dataset_path)->required();
  eval->add_option("--domain", domain_path)->required();
  eval->add_option("--tests", tests_csv, "comma list (default: all four)");
  eval->add_option("--endpoint", config.base_url)->required();
  eval->add_option("--model", config.model_name)->required();
  eval->add_option("--out", store_path, "result store (JSONL)")->required();
  eval->add_option("--token-env", config.auth_env,
                   "env var holding the auth token (default SAFEL_API_TOKEN)");
  eval->add_option("--token", config.auth_token, "explicit auth token");
  eval->add_option("--timeout", config.timeout_seconds, "seconds per request");
  eval->add_option("--attempts", config.max_attempts);
  eval->add_option("--concurrency", config.max_concurrent);
  eval->add_option("--backoff", config.backoff_base_seconds);
  eval->add_option("--temperature", config.temperature);
  eval->add_option("--top-p", config.top_p);
  eval->add_option("--max-tokens", config.max_tokens);

  auto* report = app.add_subcommand("report", "aggregate a result store");
  report->add_option("--store", store_path)->required();
  report->add_option("--format", format_name, "text, csv, or json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (app.got_subcommand(validate)) {
      return cmd_validate(dataset_path, domain_path);
    }
    if (app.got_subcommand(plan)) {
      return cmd_plan(domain_path, problem_path, greedy, max_expansions,
                      max_length);
    }
    if (app.got_subcommand(exec)) {
      return cmd_exec(domain_path, problem_path, plan_path, gt_plan_path,
                      safety_action);
    }
    if (app.got_subcommand(eval)) {
      return cmd_eval(dataset_path, domain_path, tests_csv, config,
                      store_path);
    }
    if (app.got_subcommand(report)) {
      return cmd_report(store_path, format_name);
    }
  } catch (const safel::harness::AuthError& err) {
    std::cerr << "auth error: " << err.what() << '\n';
    return kExitEndpoint;
  } catch (const safel::harness::TimeoutError& err) {
    std::cerr << "endpoint timeout: " << err.what() << '\n';
    return kExitEndpoint;
  } catch (const safel::harness::TransportError& err) {
    std::cerr << "endpoint error: " << err.what() << '\n';
    return kExitEndpoint;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
