#include "safel/pipeline/corrector.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "safel/pddl/errors.hpp"
#include "safel/pddl/parser.hpp"
#include "safel/pddl/printer.hpp"

namespace safel::pipeline {
namespace {

using pddl::Condition;
using pddl::Effect;
using pddl::Literal;

struct Usage {
  std::map<std::string, size_t> predicates;  // name -> arity at first use
  std::vector<std::string> types;            // annotation uses, in order
};

void note_predicate(const Literal& lit, Usage& usage) {
  usage.predicates.emplace(lit.pred, lit.args.size());
}

void walk_condition(const Condition& cond, Usage& usage) {
  switch (cond.kind) {
    case Condition::Kind::Literal:
      note_predicate(cond.lit, usage);
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or:
      for (const Condition& child : cond.children) {
        walk_condition(child, usage);
      }
      break;
    case Condition::Kind::Forall:
      usage.types.push_back(cond.var.type);
      walk_condition(cond.children.front(), usage);
      break;
  }
}

void walk_effect(const Effect& eff, Usage& usage) {
  switch (eff.kind) {
    case Effect::Kind::Literal:
      note_predicate(eff.lit, usage);
      break;
    case Effect::Kind::And:
      for (const Effect& child : eff.children) walk_effect(child, usage);
      break;
    case Effect::Kind::When:
      walk_condition(eff.condition, usage);
      walk_effect(eff.children.front(), usage);
      break;
    case Effect::Kind::Forall:
      usage.types.push_back(eff.var.type);
      walk_effect(eff.children.front(), usage);
      break;
  }
}

// Object-name convention: "<type>_<k>" names an instance of <type>, e.g.
// kettle.n.01_2 -> kettle.n.01, agent_1 -> agent.
std::string type_from_name(const std::string& name) {
  size_t underscore = name.rfind('_');
  if (underscore == std::string::npos || underscore == 0) return {};
  std::string suffix = name.substr(underscore + 1);
  if (suffix.empty() ||
      !std::all_of(suffix.begin(), suffix.end(),
                   [](unsigned char c) { return std::isdigit(c); })) {
    return {};
  }
  return name.substr(0, underscore);
}

}  // namespace

CorrectionResult correct_scenario(const Scenario& scenario,
                                  const VerdictReport& verdict,
                                  const pddl::Domain& base_domain) {
  CorrectionResult result;
  result.scenario = scenario;

  if (verdict.status != VerdictStatus::CORRECTABLE) {
    result.fixed = verdict.status == VerdictStatus::PASS;
    result.applied.push_back(
        "contract violation: correct_scenario called on a non-correctable "
        "verdict; scenario passed through unchanged");
    result.reverify = verdict;
    return result;
  }

  pddl::Problem problem;
  try {
    problem = pddl::parse_problem(scenario.pddl_text);
  } catch (const pddl::SyntaxError&) {
    result.reverify = verdict;
    return result;  // unparseable text is never CORRECTABLE; stay unfixed
  }

  std::map<std::string, size_t> declared_preds;
  for (const pddl::PredicateDecl& p : base_domain.predicates) {
    declared_preds.emplace(p.name, p.params.size());
  }
  for (const pddl::PredicateDecl& p : problem.inline_predicates) {
    declared_preds.emplace(p.name, p.params.size());
  }

  std::set<std::string> declared_types = {pddl::kRootType};
  for (const pddl::TypeDecl& t : base_domain.types) {
    declared_types.insert(t.name);
  }
  for (const pddl::TypeDecl& t : problem.inline_types) {
    declared_types.insert(t.name);
  }
  for (const pddl::PredicateDecl& p : base_domain.predicates) {
    for (const pddl::TypedVar& param : p.params) {
      declared_types.insert(param.type);
    }
  }
  for (const pddl::ActionSchema& a : base_domain.actions) {
    for (const pddl::TypedVar& param : a.params) {
      declared_types.insert(param.type);
    }
  }

  std::set<std::string> declared_objects;
  for (const pddl::TypedVar& obj : problem.objects) {
    declared_objects.insert(obj.name);
  }

  Usage usage;
  for (const Literal& lit : problem.init) note_predicate(lit, usage);
  walk_condition(problem.goal, usage);
  for (const pddl::ActionSchema& action : problem.inline_actions) {
    for (const pddl::TypedVar& param : action.params) {
      usage.types.push_back(param.type);
    }
    walk_condition(action.precondition, usage);
    walk_effect(action.effect, usage);
  }
  for (const pddl::TypedVar& obj : problem.objects) {
    usage.types.push_back(obj.type);
  }

  // R1: declare predicates the scenario uses but never declares.
  for (const auto& [name, arity] : usage.predicates) {
    if (declared_preds.count(name) > 0) continue;
    pddl::PredicateDecl decl;
    decl.name = name;
    for (size_t i = 0; i < arity; ++i) {
      decl.params.push_back({"?p" + std::to_string(i), pddl::kRootType});
    }
    problem.inline_predicates.push_back(decl);
    declared_preds.emplace(name, arity);
    result.applied.push_back("R1: declared predicate (" + name + "/" +
                             std::to_string(arity) + ")");
  }

  // R2: declare missing types as direct children of the root.
  for (const std::string& type : usage.types) {
    if (declared_types.count(type) > 0) continue;
    problem.inline_types.push_back({type, pddl::kRootType});
    declared_types.insert(type);
    result.applied.push_back("R2: declared type " + type);
  }

  // R3: declare objects named by init when the name convention pins a type.
  for (const Literal& lit : problem.init) {
    for (const std::string& arg : lit.args) {
      if (declared_objects.count(arg) > 0 || pddl::is_variable(arg)) continue;
      std::string type = type_from_name(arg);
      if (type.empty() || declared_types.count(type) == 0) continue;
      problem.objects.push_back({arg, type});
      declared_objects.insert(arg);
      result.applied.push_back("R3: declared object " + arg + " - " + type);
    }
  }

  // R4: drop exact duplicate init literals, keeping first occurrences.
  {
    std::vector<Literal> unique;
    for (const Literal& lit : problem.init) {
      if (std::find(unique.begin(), unique.end(), lit) == unique.end()) {
        unique.push_back(lit);
      }
    }
    if (unique.size() != problem.init.size()) {
      result.applied.push_back(
          "R4: dropped " +
          std::to_string(problem.init.size() - unique.size()) +
          " duplicate init literal(s)");
      problem.init = std::move(unique);
    }
  }

  // R5: drop explicit negative init literals; the closed world already
  // treats unlisted atoms as false.
  {
    size_t before = problem.init.size();
    std::erase_if(problem.init, [](const Literal& lit) { return lit.negated; });
    if (problem.init.size() != before) {
      result.applied.push_back(
          "R5: dropped " + std::to_string(before - problem.init.size()) +
          " explicit negative init literal(s)");
    }
  }

  result.scenario.pddl_text = pddl::render(problem);
  result.reverify = verify_scenario(result.scenario, base_domain);
  result.fixed = result.reverify.status == VerdictStatus::PASS;
  return result;
}

}  // namespace safel::pipeline
