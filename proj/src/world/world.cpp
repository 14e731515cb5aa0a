#include "safel/world/world.hpp"

#include <algorithm>
#include <utility>

#include "safel/pddl/normalize.hpp"
#include "safel/pddl/printer.hpp"

namespace safel::world {
namespace {

using pddl::Condition;
using pddl::Effect;
using pddl::Literal;

using Env = std::map<std::string, std::string>;

// Resolve one argument token: parameter/quantifier-bound names come from the
// environment, anything else is a constant kept as written. Bare (non-'?')
// parameter names shadow same-named constants, matching how model outputs
// use e.g. a literal "agent" parameter.
std::string resolve(const std::string& token, const Env& env) {
  auto it = env.find(token);
  if (it != env.end()) return it->second;
  if (pddl::is_variable(token)) {
    throw UnboundVariableError("unbound variable '" + token + "'");
  }
  return token;
}

Literal ground_literal(const Literal& lit, const Env& env) {
  Literal ground = lit;
  for (std::string& arg : ground.args) arg = resolve(arg, env);
  return ground;
}

// Substitute the environment and expand forall over the object universe,
// yielding a variable-free tree of and/or/literal nodes.
Condition ground_condition(const World& world, const Condition& cond,
                           Env& env) {
  switch (cond.kind) {
    case Condition::Kind::Literal:
      return Condition::make_literal(ground_literal(cond.lit, env));
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      std::vector<Condition> children;
      children.reserve(cond.children.size());
      for (const Condition& child : cond.children) {
        children.push_back(ground_condition(world, child, env));
      }
      return cond.kind == Condition::Kind::And
                 ? Condition::make_and(std::move(children))
                 : Condition::make_or(std::move(children));
    }
    case Condition::Kind::Forall: {
      std::vector<Condition> instances;
      for (const std::string& obj : world.objects_of_type(cond.var.type)) {
        auto [it, inserted] = env.insert_or_assign(cond.var.name, obj);
        (void)inserted;
        instances.push_back(
            ground_condition(world, cond.children.front(), env));
      }
      env.erase(cond.var.name);
      return Condition::make_and(std::move(instances));
    }
  }
  throw UnboundVariableError("unreachable condition kind");
}

// A ground literal fails when any argument is undeclared — regardless of
// polarity, so schemas mentioning unknown constants are never applicable and
// can never write atoms over them.
bool eval_literal(const World& world, const State& state, const Literal& lit) {
  for (const std::string& arg : lit.args) {
    if (!world.has_object(arg)) return false;
  }
  bool truth;
  if (lit.pred == "same_obj" && lit.args.size() == 2) {
    truth = lit.args[0] == lit.args[1];
  } else {
    truth = state.contains(Atom{lit.pred, lit.args});
  }
  return lit.negated ? !truth : truth;
}

bool eval_condition(const World& world, const State& state,
                    const Condition& cond) {
  switch (cond.kind) {
    case Condition::Kind::Literal:
      return eval_literal(world, state, cond.lit);
    case Condition::Kind::And:
      return std::all_of(cond.children.begin(), cond.children.end(),
                         [&](const Condition& c) {
                           return eval_condition(world, state, c);
                         });
    case Condition::Kind::Or:
      return std::any_of(cond.children.begin(), cond.children.end(),
                         [&](const Condition& c) {
                           return eval_condition(world, state, c);
                         });
    case Condition::Kind::Forall:
      // Grounded trees carry no quantifiers.
      throw UnboundVariableError("quantifier in grounded condition");
  }
  return false;
}

Env make_binding_env(const GroundAction& action) {
  const pddl::ActionSchema& schema = *action.schema;
  if (action.binding.size() != schema.params.size()) {
    throw ContractViolation("binding arity does not match schema '" +
                            schema.name + "'");
  }
  Env env;
  for (size_t i = 0; i < schema.params.size(); ++i) {
    env[schema.params[i].name] = action.binding[i];
  }
  return env;
}

void collect_effects(const World& world, const Effect& eff, Env& env,
                     const State& pre_state, std::vector<Atom>& adds,
                     std::vector<Atom>& dels) {
  switch (eff.kind) {
    case Effect::Kind::Literal: {
      Literal ground = ground_literal(eff.lit, env);
      for (const std::string& arg : ground.args) {
        if (!world.has_object(arg)) {
          throw UnknownObjectError("effect of '" + pddl::render(eff.lit) +
                                   "' references undeclared object '" + arg +
                                   "'");
        }
      }
      (ground.negated ? dels : adds).push_back(Atom{ground.pred, ground.args});
      break;
    }
    case Effect::Kind::And:
      for (const Effect& child : eff.children) {
        collect_effects(world, child, env, pre_state, adds, dels);
      }
      break;
    case Effect::Kind::When: {
      Condition guard = ground_condition(world, eff.condition, env);
      if (eval_condition(world, pre_state, guard)) {
        collect_effects(world, eff.children.front(), env, pre_state, adds,
                        dels);
      }
      break;
    }
    case Effect::Kind::Forall:
      for (const std::string& obj : world.objects_of_type(eff.var.type)) {
        env.insert_or_assign(eff.var.name, obj);
        collect_effects(world, eff.children.front(), env, pre_state, adds,
                        dels);
      }
      env.erase(eff.var.name);
      break;
  }
}

}  // namespace

const pddl::ActionSchema* World::find_schema(const std::string& name) const {
  auto it = schema_index.find(name);
  return it == schema_index.end() ? nullptr : &domain.actions[it->second];
}

bool World::has_object(const std::string& name) const {
  return object_types.count(name) > 0;
}

bool World::type_is_a(const std::string& type,
                      const std::string& ancestor) const {
  std::string current = type;
  while (true) {
    if (current == ancestor) return true;
    if (current == pddl::kRootType) return false;
    auto it = type_parents.find(current);
    current = it == type_parents.end() ? pddl::kRootType : it->second;
  }
}

std::vector<std::string> World::objects_of_type(const std::string& type) const {
  std::vector<std::string> result;
  for (const std::string& name : objects) {
    if (type_is_a(object_types.at(name), type)) result.push_back(name);
  }
  return result;
}

World build_world(const pddl::Domain& domain, const pddl::Problem& problem,
                  const BuildOptions& options) {
  if (!options.allow_domain_mismatch && problem.domain_name != domain.name) {
    throw DomainMismatchError("problem targets domain '" +
                              problem.domain_name + "', got '" + domain.name +
                              "'");
  }

  World world;
  world.domain = domain;
  world.problem = problem;

  for (const pddl::TypeDecl& type : problem.inline_types) {
    bool known = std::any_of(
        world.domain.types.begin(), world.domain.types.end(),
        [&](const pddl::TypeDecl& t) { return t.name == type.name; });
    if (!known) world.domain.types.push_back(type);
  }
  for (const pddl::PredicateDecl& pred : problem.inline_predicates) {
    bool known = std::any_of(
        world.domain.predicates.begin(), world.domain.predicates.end(),
        [&](const pddl::PredicateDecl& p) { return p.name == pred.name; });
    if (!known) world.domain.predicates.push_back(pred);
  }
  for (const pddl::ActionSchema& schema : problem.inline_actions) {
    bool collision = std::any_of(
        world.domain.actions.begin(), world.domain.actions.end(),
        [&](const pddl::ActionSchema& a) { return a.name == schema.name; });
    if (collision) {
      throw DuplicateActionError("inline action '" + schema.name +
                                 "' shadows a base action");
    }
    world.domain.actions.push_back(schema);
    world.domain.actions.back().action_class = pddl::ActionClass::NEW;
  }

  for (const pddl::TypeDecl& type : world.domain.types) {
    world.type_parents[type.name] = type.parent;
  }
  // Types that only ever appear as predicate/parameter annotations (common in
  // minimal domains that skip :types) count as declared, parented at the
  // root. UnknownTypeError stays reserved for names the domain never mentions.
  auto note_type = [&](const std::string& type) {
    if (type != pddl::kRootType) {
      world.type_parents.emplace(type, pddl::kRootType);
    }
  };
  for (const pddl::PredicateDecl& pred : world.domain.predicates) {
    for (const pddl::TypedVar& param : pred.params) note_type(param.type);
  }
  for (const pddl::ActionSchema& schema : world.domain.actions) {
    for (const pddl::TypedVar& param : schema.params) note_type(param.type);
  }
  // Reject cycles; every chain must reach the root.
  for (const auto& [name, parent] : world.type_parents) {
    std::set<std::string> seen = {name};
    std::string current = parent;
    while (current != pddl::kRootType) {
      if (!seen.insert(current).second) {
        throw UnknownTypeError("type hierarchy cycle through '" + name + "'");
      }
      auto it = world.type_parents.find(current);
      current = it == world.type_parents.end() ? pddl::kRootType : it->second;
    }
  }

  for (const pddl::TypedVar& obj : problem.objects) {
    if (obj.type != pddl::kRootType &&
        world.type_parents.find(obj.type) == world.type_parents.end()) {
      throw UnknownTypeError("object '" + obj.name +
                             "' has undeclared type '" + obj.type + "'");
    }
    world.objects.push_back(obj.name);
    world.object_types[obj.name] = obj.type;
  }

  for (size_t i = 0; i < world.domain.actions.size(); ++i) {
    world.schema_index[world.domain.actions[i].name] = i;
  }

  for (const Literal& lit : problem.init) {
    if (!lit.negated) world.init.atoms.insert(Atom{lit.pred, lit.args});
  }
  world.goal = problem.goal;
  return world;
}

bool holds(const World& world, const State& state, const pddl::Literal& lit) {
  for (const std::string& arg : lit.args) {
    if (!world.has_object(arg)) {
      throw UnknownObjectError("unknown object '" + arg + "'");
    }
  }
  return eval_literal(world, state, lit);
}

bool literal_true(const World& world, const State& state,
                  const pddl::Literal& lit) {
  return eval_literal(world, state, lit);
}

namespace {

std::vector<std::vector<Literal>> to_literal_disjuncts(
    const std::vector<pddl::Disjunct>& disjuncts) {
  std::vector<std::vector<Literal>> out;
  out.reserve(disjuncts.size());
  for (const pddl::Disjunct& disjunct : disjuncts) {
    std::vector<Literal> lits;
    lits.reserve(disjunct.size());
    for (const Condition& leaf : disjunct) lits.push_back(leaf.lit);
    out.push_back(std::move(lits));
  }
  return out;
}

}  // namespace

std::vector<std::vector<pddl::Literal>> precondition_dnf(
    const World& world, const GroundAction& action) {
  Env env = make_binding_env(action);
  Condition ground = ground_condition(world, action.schema->precondition, env);
  return to_literal_disjuncts(pddl::dnf(ground));
}

std::vector<std::vector<pddl::Literal>> goal_dnf(const World& world) {
  Env env;
  Condition ground = ground_condition(world, world.goal, env);
  return to_literal_disjuncts(pddl::dnf(ground));
}

bool has_conditional_effects(const pddl::ActionSchema& schema) {
  std::vector<const Effect*> stack = {&schema.effect};
  while (!stack.empty()) {
    const Effect* eff = stack.back();
    stack.pop_back();
    if (eff->kind == Effect::Kind::When) return true;
    for (const Effect& child : eff->children) stack.push_back(&child);
  }
  return false;
}

EffectDelta effect_delta(const World& world, const State& state,
                         const GroundAction& action) {
  Env env = make_binding_env(action);
  EffectDelta delta;
  collect_effects(world, action.schema->effect, env, state, delta.adds,
                  delta.dels);
  return delta;
}

ApplicabilityReport check_applicable(const World& world, const State& state,
                                     const GroundAction& action) {
  ApplicabilityReport report;
  bool first = true;
  std::vector<std::vector<Literal>> disjuncts = precondition_dnf(world, action);
  for (size_t i = 0; i < disjuncts.size(); ++i) {
    std::vector<Literal> unmet;
    for (const Literal& lit : disjuncts[i]) {
      if (!eval_literal(world, state, lit)) unmet.push_back(lit);
    }
    if (unmet.empty()) {
      report.applicable = true;
      report.best_disjunct = i;
      report.unmet.clear();
      return report;
    }
    if (first || unmet.size() < report.unmet.size()) {
      report.best_disjunct = i;
      report.unmet = std::move(unmet);
      first = false;
    }
  }
  return report;
}

State apply(const World& world, const State& state,
            const GroundAction& action) {
  ApplicabilityReport report = check_applicable(world, state, action);
  if (!report.applicable) {
    throw ContractViolation("apply() on inapplicable action '" +
                            action.schema->name + "'");
  }

  EffectDelta delta = effect_delta(world, state, action);
  State next = state;
  for (const Atom& atom : delta.dels) next.atoms.erase(atom);
  for (const Atom& atom : delta.adds) next.atoms.insert(atom);
  return next;
}

GoalCheck goal_satisfied(const World& world, const State& state,
                         const pddl::Condition& goal) {
  Env env;
  Condition ground = ground_condition(world, goal, env);

  GoalCheck check;
  bool first = true;
  std::vector<pddl::Disjunct> disjuncts = pddl::dnf(ground);
  if (disjuncts.empty()) return check;  // empty (or): unsatisfiable
  for (const pddl::Disjunct& disjunct : disjuncts) {
    std::vector<Literal> unmet;
    for (const Condition& leaf : disjunct) {
      if (!eval_literal(world, state, leaf.lit)) unmet.push_back(leaf.lit);
    }
    if (unmet.empty()) {
      check.satisfied = true;
      check.unmet.clear();
      return check;
    }
    if (first || unmet.size() < check.unmet.size()) {
      check.unmet = std::move(unmet);
      first = false;
    }
  }
  return check;
}

TypeCheckResult type_check_args(const World& world,
                                const pddl::ActionSchema& schema,
                                const std::vector<std::string>& args) {
  TypeCheckResult result;
  if (args.size() != schema.params.size()) {
    result.status = TypeCheckStatus::ARITY_MISMATCH;
    result.expected_arity = schema.params.size();
    result.actual_arity = args.size();
    return result;
  }
  for (size_t i = 0; i < args.size(); ++i) {
    auto it = world.object_types.find(args[i]);
    if (it == world.object_types.end()) {
      result.status = TypeCheckStatus::UNKNOWN_OBJECT;
      result.position = i + 1;
      result.actual_type = args[i];
      return result;
    }
    if (!world.type_is_a(it->second, schema.params[i].type)) {
      result.status = TypeCheckStatus::TYPE_MISMATCH;
      result.position = i + 1;
      result.expected_type = schema.params[i].type;
      result.actual_type = it->second;
      return result;
    }
  }
  return result;
}

}  // namespace safel::world
