#include "safel/planner/planner.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <sstream>

namespace safel::planner {
namespace {

// Canonical sorted encoding of the atom set, used for duplicate detection.
std::string encode(const world::State& state) {
  std::ostringstream out;
  for (const world::Atom& atom : state.atoms) {
    out << atom.pred;
    for (const std::string& arg : atom.args) out << ' ' << arg;
    out << ';';
  }
  return out.str();
}

struct Node {
  world::State state;
  size_t parent = SIZE_MAX;
  size_t via = SIZE_MAX;  // index into the ground action list
  size_t depth = 0;
};

// Per-ground-action data computed once per search: precondition DNF and,
// when the effect tree has no `when` guard, the state-independent delta.
struct Prepped {
  std::vector<std::vector<pddl::Literal>> disjuncts;
  bool static_delta = false;
  world::EffectDelta delta;
  bool usable = true;  // false when effects reference undeclared objects
};

bool all_true(const world::World& world, const world::State& state,
              const std::vector<pddl::Literal>& lits) {
  return std::all_of(lits.begin(), lits.end(),
                     [&](const pddl::Literal& lit) {
                       return world::literal_true(world, state, lit);
                     });
}

}  // namespace

std::vector<world::GroundAction> ground_actions(const world::World& world) {
  std::vector<world::GroundAction> actions;
  for (const pddl::ActionSchema& schema : world.domain.actions) {
    // Candidate objects per parameter, lexicographic.
    std::vector<std::vector<std::string>> candidates;
    bool impossible = false;
    for (const pddl::TypedVar& param : schema.params) {
      std::vector<std::string> objs = world.objects_of_type(param.type);
      std::sort(objs.begin(), objs.end());
      if (objs.empty()) impossible = true;
      candidates.push_back(std::move(objs));
    }
    if (impossible) continue;

    std::vector<size_t> index(schema.params.size(), 0);
    while (true) {
      world::GroundAction action;
      action.schema = &schema;
      for (size_t i = 0; i < index.size(); ++i) {
        action.binding.push_back(candidates[i][index[i]]);
      }
      actions.push_back(std::move(action));
      if (index.empty()) break;
      bool rolled = true;
      for (size_t pos = index.size(); pos-- > 0;) {
        if (++index[pos] < candidates[pos].size()) {
          rolled = false;
          break;
        }
        index[pos] = 0;
      }
      if (rolled) break;
    }
  }
  return actions;
}

SearchResult find_plan(const world::World& world, const SearchLimits& limits) {
  std::vector<world::GroundAction> actions = ground_actions(world);

  std::vector<Prepped> prepped(actions.size());
  for (size_t a = 0; a < actions.size(); ++a) {
    prepped[a].disjuncts = world::precondition_dnf(world, actions[a]);
    prepped[a].static_delta =
        !world::has_conditional_effects(*actions[a].schema);
    if (prepped[a].static_delta) {
      try {
        prepped[a].delta = world::effect_delta(world, world.init, actions[a]);
      } catch (const world::UnknownObjectError&) {
        prepped[a].usable = false;
      }
    }
  }

  std::vector<std::vector<pddl::Literal>> goal = world::goal_dnf(world);
  auto goal_met = [&](const world::State& state) {
    return std::any_of(goal.begin(), goal.end(),
                       [&](const std::vector<pddl::Literal>& d) {
                         return all_true(world, state, d);
                       });
  };
  auto unmet_goal_count = [&](const world::State& state) -> size_t {
    size_t best = SIZE_MAX;
    for (const std::vector<pddl::Literal>& d : goal) {
      size_t unmet = 0;
      for (const pddl::Literal& lit : d) {
        if (!world::literal_true(world, state, lit)) ++unmet;
      }
      best = std::min(best, unmet);
    }
    return best;
  };

  SearchResult result;
  std::vector<Node> nodes;
  nodes.push_back({world.init, SIZE_MAX, SIZE_MAX, 0});

  std::set<std::string> visited;
  visited.insert(encode(world.init));

  // GREEDY: (unmet-goal count, insertion order) min-heap; BFS: FIFO.
  using Entry = std::pair<size_t, size_t>;  // (priority, node index)
  auto cmp = [](const Entry& a, const Entry& b) { return a > b; };
  std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
  std::deque<size_t> fifo;

  auto push = [&](size_t node_idx) {
    if (limits.mode == SearchMode::GREEDY) {
      heap.push({unmet_goal_count(nodes[node_idx].state), node_idx});
    } else {
      fifo.push_back(node_idx);
    }
  };
  auto pop = [&]() -> size_t {
    if (limits.mode == SearchMode::GREEDY) {
      size_t idx = heap.top().second;
      heap.pop();
      return idx;
    }
    size_t idx = fifo.front();
    fifo.pop_front();
    return idx;
  };
  auto empty = [&]() {
    return limits.mode == SearchMode::GREEDY ? heap.empty() : fifo.empty();
  };

  auto reconstruct = [&](size_t idx) {
    std::vector<world::GroundAction> steps;
    while (nodes[idx].parent != SIZE_MAX) {
      steps.push_back(actions[nodes[idx].via]);
      idx = nodes[idx].parent;
    }
    std::reverse(steps.begin(), steps.end());
    result.plan.steps = std::move(steps);
  };

  push(0);
  bool truncated = false;  // some successor was dropped for depth/limits

  while (!empty()) {
    size_t idx = pop();
    if (goal_met(nodes[idx].state)) {
      result.status = SearchStatus::FOUND;
      result.expansions = nodes.size() - 1;
      reconstruct(idx);
      return result;
    }
    if (nodes[idx].depth >= limits.max_plan_length) {
      truncated = true;
      continue;
    }
    for (size_t a = 0; a < actions.size(); ++a) {
      if (!prepped[a].usable) continue;
      bool applicable = std::any_of(
          prepped[a].disjuncts.begin(), prepped[a].disjuncts.end(),
          [&](const std::vector<pddl::Literal>& d) {
            return all_true(world, nodes[idx].state, d);
          });
      if (!applicable) continue;

      world::State next = nodes[idx].state;
      if (prepped[a].static_delta) {
        for (const world::Atom& atom : prepped[a].delta.dels) {
          next.atoms.erase(atom);
        }
        for (const world::Atom& atom : prepped[a].delta.adds) {
          next.atoms.insert(atom);
        }
      } else {
        try {
          next = world::apply(world, nodes[idx].state, actions[a]);
        } catch (const world::UnknownObjectError&) {
          continue;
        }
      }
      if (!visited.insert(encode(next)).second) continue;
      nodes.push_back({std::move(next), idx, a, nodes[idx].depth + 1});
      if (nodes.size() - 1 > limits.max_expansions) {
        result.status = SearchStatus::RESOURCE_LIMIT;
        result.expansions = nodes.size() - 1;
        return result;
      }
      push(nodes.size() - 1);
    }
  }

  result.status =
      truncated ? SearchStatus::RESOURCE_LIMIT : SearchStatus::NO_PLAN_PROVED;
  result.expansions = nodes.size() - 1;
  return result;
}

ExecutionTrace validate_plan(const world::World& world,
                             const std::vector<pddl::GroundActionRef>& plan) {
  ExecutionTrace trace;
  trace.states.push_back(world.init);

  for (size_t i = 0; i < plan.size(); ++i) {
    const pddl::GroundActionRef& ref = plan[i];
    const pddl::ActionSchema* schema = world.find_schema(ref.name);
    if (schema == nullptr) {
      trace.failure = StepFailure{i, "unknown action '" + ref.name + "'", {}};
      return trace;
    }
    if (ref.args.size() != schema->params.size()) {
      trace.failure = StepFailure{
          i,
          "arity mismatch: '" + ref.name + "' takes " +
              std::to_string(schema->params.size()) + " arguments, got " +
              std::to_string(ref.args.size()),
          {}};
      return trace;
    }
    world::GroundAction action{schema, ref.args};
    world::ApplicabilityReport report =
        world::check_applicable(world, trace.states.back(), action);
    if (!report.applicable) {
      trace.failure = StepFailure{i, "unmet preconditions", report};
      return trace;
    }
    try {
      trace.states.push_back(world::apply(world, trace.states.back(), action));
    } catch (const world::UnknownObjectError& err) {
      trace.failure = StepFailure{i, std::string("effect error: ") + err.what(),
                                  report};
      return trace;
    }
  }

  world::GoalCheck check =
      world::goal_satisfied(world, trace.states.back(), world.goal);
  trace.goal_satisfied = check.satisfied;
  trace.unmet_goal = check.unmet;
  return trace;
}

}  // namespace safel::planner
