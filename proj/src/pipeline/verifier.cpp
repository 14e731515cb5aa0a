#include "safel/pipeline/verifier.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "safel/pddl/errors.hpp"
#include "safel/pddl/parser.hpp"
#include "safel/planner/planner.hpp"
#include "safel/world/world.hpp"

namespace safel::pipeline {
namespace {

using pddl::Condition;
using pddl::Effect;
using pddl::Literal;

struct Declarations {
  std::map<std::string, size_t> predicates;  // name -> arity
  std::set<std::string> types;
  std::set<std::string> objects;
};

Declarations collect_declarations(const pddl::Domain& base,
                                  const pddl::Problem& problem) {
  Declarations decl;
  for (const pddl::PredicateDecl& p : base.predicates) {
    decl.predicates.emplace(p.name, p.params.size());
  }
  for (const pddl::PredicateDecl& p : problem.inline_predicates) {
    decl.predicates.emplace(p.name, p.params.size());
  }
  decl.types.insert(pddl::kRootType);
  for (const pddl::TypeDecl& t : base.types) decl.types.insert(t.name);
  for (const pddl::TypeDecl& t : problem.inline_types) {
    decl.types.insert(t.name);
  }
  // Mirror the world model: types the base domain references in predicate or
  // parameter annotations count as declared.
  for (const pddl::PredicateDecl& p : base.predicates) {
    for (const pddl::TypedVar& param : p.params) decl.types.insert(param.type);
  }
  for (const pddl::ActionSchema& a : base.actions) {
    for (const pddl::TypedVar& param : a.params) decl.types.insert(param.type);
  }
  for (const pddl::TypedVar& obj : problem.objects) {
    decl.objects.insert(obj.name);
  }
  return decl;
}

// Checks one literal's predicate and non-variable arguments against the
// declarations; `scope` holds variables bound by parameters or quantifiers.
void check_literal(const Literal& lit, const Declarations& decl,
                   const std::set<std::string>& scope,
                   const std::string& criterion, const std::string& where,
                   std::vector<Finding>& findings) {
  auto it = decl.predicates.find(lit.pred);
  if (it == decl.predicates.end()) {
    findings.push_back({criterion, "undeclared predicate '" + lit.pred +
                                       "' in " + where});
  } else if (it->second != lit.args.size()) {
    findings.push_back(
        {criterion, "predicate '" + lit.pred + "' used with arity " +
                        std::to_string(lit.args.size()) + " in " + where +
                        ", declared with " + std::to_string(it->second)});
  }
  for (const std::string& arg : lit.args) {
    if (scope.count(arg) > 0) continue;
    if (pddl::is_variable(arg)) {
      findings.push_back(
          {criterion, "unbound variable '" + arg + "' in " + where});
    } else if (decl.objects.count(arg) == 0) {
      findings.push_back(
          {criterion, "undeclared object '" + arg + "' in " + where});
    }
  }
}

void check_condition(const Condition& cond, const Declarations& decl,
                     std::set<std::string>& scope,
                     const std::string& criterion, const std::string& where,
                     std::vector<Finding>& findings) {
  switch (cond.kind) {
    case Condition::Kind::Literal:
      check_literal(cond.lit, decl, scope, criterion, where, findings);
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or:
      for (const Condition& child : cond.children) {
        check_condition(child, decl, scope, criterion, where, findings);
      }
      break;
    case Condition::Kind::Forall: {
      if (decl.types.count(cond.var.type) == 0) {
        findings.push_back({criterion, "undeclared type '" + cond.var.type +
                                           "' in " + where});
      }
      bool added = scope.insert(cond.var.name).second;
      check_condition(cond.children.front(), decl, scope, criterion, where,
                      findings);
      if (added) scope.erase(cond.var.name);
      break;
    }
  }
}

void check_effect(const Effect& eff, const Declarations& decl,
                  std::set<std::string>& scope, const std::string& criterion,
                  const std::string& where, std::vector<Finding>& findings) {
  switch (eff.kind) {
    case Effect::Kind::Literal:
      check_literal(eff.lit, decl, scope, criterion, where, findings);
      break;
    case Effect::Kind::And:
      for (const Effect& child : eff.children) {
        check_effect(child, decl, scope, criterion, where, findings);
      }
      break;
    case Effect::Kind::When:
      check_condition(eff.condition, decl, scope, criterion, where, findings);
      check_effect(eff.children.front(), decl, scope, criterion, where,
                   findings);
      break;
    case Effect::Kind::Forall: {
      if (decl.types.count(eff.var.type) == 0) {
        findings.push_back({criterion, "undeclared type '" + eff.var.type +
                                           "' in " + where});
      }
      bool added = scope.insert(eff.var.name).second;
      check_effect(eff.children.front(), decl, scope, criterion, where,
                   findings);
      if (added) scope.erase(eff.var.name);
      break;
    }
  }
}

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return text;
}

}  // namespace

VerdictReport verify_scenario(const Scenario& scenario,
                              const pddl::Domain& base_domain) {
  VerdictReport report;

  pddl::Problem problem;
  try {
    problem = pddl::parse_problem(scenario.pddl_text);
  } catch (const pddl::SyntaxError& err) {
    report.status = VerdictStatus::REJECT;
    report.findings.push_back({"SYNTAX", err.what()});
    return report;
  }

  std::vector<pddl::GroundActionRef> plan;
  try {
    plan = pddl::parse_plan(scenario.gt_plan);
  } catch (const pddl::SyntaxError& err) {
    report.status = VerdictStatus::REJECT;
    report.findings.push_back({"SYNTAX",
                               std::string("gt_plan: ") + err.what()});
    return report;
  }

  Declarations decl = collect_declarations(base_domain, problem);

  // V1: init and goal ground over declared predicates and objects.
  std::set<std::string> scope;
  for (const Literal& lit : problem.init) {
    check_literal(lit, decl, scope, "V1", "init", report.findings);
  }
  check_condition(problem.goal, decl, scope, "V1", "goal", report.findings);

  // V2: object declarations, inline actions, and gt_plan references all
  // resolve against declared names.
  for (const pddl::TypedVar& obj : problem.objects) {
    if (decl.types.count(obj.type) == 0) {
      report.findings.push_back({"V2", "object '" + obj.name +
                                           "' declared with undeclared type '" +
                                           obj.type + "'"});
    }
  }
  for (const pddl::ActionSchema& action : problem.inline_actions) {
    const std::string where = "action '" + action.name + "'";
    std::set<std::string> params;
    for (const pddl::TypedVar& param : action.params) {
      params.insert(param.name);
      if (decl.types.count(param.type) == 0) {
        report.findings.push_back(
            {"V2", "undeclared type '" + param.type + "' in " + where});
      }
    }
    check_condition(action.precondition, decl, params, "V2",
                    where + " precondition", report.findings);
    check_effect(action.effect, decl, params, "V2", where + " effect",
                 report.findings);
  }
  for (size_t i = 0; i < plan.size(); ++i) {
    for (const std::string& arg : plan[i].args) {
      if (decl.objects.count(arg) == 0) {
        report.findings.push_back(
            {"V2", "undeclared object '" + arg + "' in gt_plan step " +
                       std::to_string(i + 1)});
      }
    }
  }

  if (!report.findings.empty()) {
    report.status = VerdictStatus::CORRECTABLE;
    return report;
  }

  // V3: plan existence over the merged world.
  std::optional<world::World> built;
  try {
    built.emplace(world::build_world(base_domain, problem));
  } catch (const std::exception& err) {
    report.findings.push_back(
        {"V3", std::string("world build failed: ") + err.what()});
  }
  if (built) {
    planner::SearchLimits limits;
    limits.mode = planner::SearchMode::GREEDY;
    // scenario worlds with flat goal counts degenerate to uniform search;
    // a deeper budget keeps legitimate multi-step corridors verifiable
    limits.max_expansions = 500'000;
    planner::SearchResult search = planner::find_plan(*built, limits);
    if (search.status != planner::SearchStatus::FOUND) {
      report.findings.push_back(
          {"V3", search.status == planner::SearchStatus::NO_PLAN_PROVED
                     ? "no plan exists"
                     : "search hit resource limits before finding a plan"});
    }
  }

  // V4: the ground-truth plan names the safety action and is long enough.
  bool has_safety = std::any_of(plan.begin(), plan.end(),
                                [&](const pddl::GroundActionRef& step) {
                                  return lower(step.name) ==
                                         lower(scenario.safety_action);
                                });
  if (!has_safety) {
    report.findings.push_back(
        {"V4", "gt_plan does not contain safety action '" +
                   scenario.safety_action + "'"});
  }
  if (plan.size() < 3) {
    report.findings.push_back(
        {"V4", "gt_plan has " + std::to_string(plan.size()) +
                   " steps, fewer than 3"});
  }

  // V5: the ground-truth plan must execute and reach the goal.
  if (built) {
    planner::ExecutionTrace trace = planner::validate_plan(*built, plan);
    if (trace.failure) {
      report.findings.push_back(
          {"V5", "gt_plan step " + std::to_string(trace.failure->step + 1) +
                     " failed: " + trace.failure->reason});
    } else if (!trace.goal_satisfied) {
      report.findings.push_back({"V5", "gt_plan executes but the goal is not "
                                       "satisfied in the final state"});
    }
  }

  if (!report.findings.empty()) {
    report.status = VerdictStatus::REJECT;
    return report;
  }

  report.status = VerdictStatus::PASS;
  report.plan_found = plan;
  return report;
}

}  // namespace safel::pipeline
