#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "safel/pddl/parser.hpp"
#include "safel/planner/planner.hpp"
#include "safel/world/world.hpp"
#include "world_gen.hpp"

using namespace safel;
using planner::SearchLimits;
using planner::SearchMode;
using planner::SearchStatus;
using world::World;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string data_path(const std::string& rel) {
  return std::string(SAFEL_DATA_DIR) + "/" + rel;
}

World load_world(const std::string& domain_rel, const std::string& problem_rel) {
  return world::build_world(
      pddl::parse_domain(read_file(data_path(domain_rel))),
      pddl::parse_problem(read_file(data_path(problem_rel))));
}

std::vector<pddl::GroundActionRef> to_refs(const planner::Plan& plan) {
  std::vector<pddl::GroundActionRef> refs;
  for (const world::GroundAction& step : plan.steps) {
    refs.push_back({step.schema->name, step.binding});
  }
  return refs;
}

// replay a found plan through the naive oracle actions
bool oracle_accepts(const testgen::SmallWorld& sw,
                    const std::vector<pddl::GroundActionRef>& refs) {
  testgen::OracleState s = sw.oracle_init;
  for (const pddl::GroundActionRef& ref : refs) {
    std::string label = ref.name;
    for (const std::string& arg : ref.args) label += ' ' + arg;
    const testgen::OracleAction* match = nullptr;
    for (const testgen::OracleAction& a : sw.oracle_actions) {
      if (a.label == label) {
        match = &a;
        break;
      }
    }
    if (match == nullptr || !testgen::oracle_applicable(*match, s)) {
      return false;
    }
    s = testgen::oracle_apply(*match, s);
  }
  return testgen::oracle_goal_holds(sw.oracle_goal, s);
}

}  // namespace

TEST_CASE("bfs finds the minimal room plan") {
  const World w = load_world("domains/room.pddl", "problems/room_goal.pddl");
  const planner::SearchResult result = planner::find_plan(w);
  REQUIRE(result.status == SearchStatus::FOUND);
  REQUIRE(result.plan.steps.size() == 2);
  CHECK(result.plan.steps[0].schema->name == "move");
  CHECK(result.plan.steps[0].binding ==
        std::vector<std::string>{"room1", "room2"});
  CHECK(result.plan.steps[1].binding ==
        std::vector<std::string>{"room2", "room3"});
  CHECK(result.expansions > 0);

  const planner::ExecutionTrace trace =
      planner::validate_plan(w, to_refs(result.plan));
  CHECK(trace.ok());
  CHECK(trace.goal_satisfied);
  REQUIRE(trace.states.size() == 3);
  CHECK(trace.states.front() == w.init);

  // deterministic: a second search returns the identical plan
  const planner::SearchResult again = planner::find_plan(w);
  CHECK(to_refs(again.plan) == to_refs(result.plan));
}

TEST_CASE("bfs solves the cleaning task with the inline action") {
  const World w =
      load_world("domains/cleaning.pddl", "problems/cleaning_spill.pddl");
  const planner::SearchResult result = planner::find_plan(w);
  REQUIRE(result.status == SearchStatus::FOUND);
  REQUIRE(result.plan.steps.size() == 2);
  CHECK(result.plan.steps[0].schema->name == "pick_up");
  CHECK(result.plan.steps[0].binding == std::vector<std::string>{"rag_1"});
  CHECK(result.plan.steps[0].schema->action_class == pddl::ActionClass::NEW);
  CHECK(result.plan.steps[1].schema->name == "clean_spill");
  CHECK(result.plan.steps[1].binding ==
        std::vector<std::string>{"floor_1", "rag_1", "agent"});
}

TEST_CASE("greedy finds a valid (not necessarily minimal) plan") {
  const World w = load_world("domains/room.pddl", "problems/room_goal.pddl");
  SearchLimits limits;
  limits.mode = SearchMode::GREEDY;
  const planner::SearchResult result = planner::find_plan(w, limits);
  REQUIRE(result.status == SearchStatus::FOUND);
  const planner::ExecutionTrace trace =
      planner::validate_plan(w, to_refs(result.plan));
  CHECK(trace.ok());
  CHECK(trace.goal_satisfied);
}

TEST_CASE("unsatisfiable goals are proved plan-free") {
  World w = load_world("domains/room.pddl", "problems/room_goal.pddl");
  pddl::Literal lit;
  lit.pred = "connected";
  lit.args = {"room3", "room1"};  // never true and no action adds it
  w.goal = pddl::Condition::make_literal(lit);
  for (SearchMode mode : {SearchMode::BFS, SearchMode::GREEDY}) {
    SearchLimits limits;
    limits.mode = mode;
    CHECK(planner::find_plan(w, limits).status ==
          SearchStatus::NO_PLAN_PROVED);
  }
}

TEST_CASE("tight budgets surface as resource limits") {
  const World w = load_world("domains/room.pddl", "problems/room_goal.pddl");

  SearchLimits tiny_expansions;
  tiny_expansions.max_expansions = 1;
  CHECK(planner::find_plan(w, tiny_expansions).status ==
        SearchStatus::RESOURCE_LIMIT);

  SearchLimits short_plans;
  short_plans.max_plan_length = 1;  // the task needs two steps
  CHECK(planner::find_plan(w, short_plans).status ==
        SearchStatus::RESOURCE_LIMIT);
}

TEST_CASE("validate_plan reports step failures without throwing") {
  const World w = load_world("domains/room.pddl", "problems/room_goal.pddl");

  SUBCASE("unknown action") {
    const planner::ExecutionTrace trace =
        planner::validate_plan(w, {{"teleport", {"room1"}}});
    REQUIRE(trace.failure.has_value());
    CHECK(trace.failure->step == 0);
    CHECK(trace.failure->reason.find("unknown action") != std::string::npos);
  }

  SUBCASE("arity mismatch") {
    const planner::ExecutionTrace trace =
        planner::validate_plan(w, {{"move", {"room1"}}});
    REQUIRE(trace.failure.has_value());
    CHECK(trace.failure->reason.find("arity") != std::string::npos);
  }

  SUBCASE("unmet preconditions midway") {
    const planner::ExecutionTrace trace = planner::validate_plan(
        w, {{"move", {"room1", "room2"}}, {"move", {"room1", "room2"}}});
    REQUIRE(trace.failure.has_value());
    CHECK(trace.failure->step == 1);
    CHECK(trace.failure->reason == "unmet preconditions");
    REQUIRE_FALSE(trace.failure->report.unmet.empty());
    REQUIRE(trace.states.size() == 2);  // init plus one successful step
  }

  SUBCASE("full execution missing the goal") {
    const planner::ExecutionTrace trace = planner::validate_plan(
        w, {{"move", {"room1", "room2"}}});
    CHECK(trace.ok());
    CHECK_FALSE(trace.goal_satisfied);
    REQUIRE(trace.unmet_goal.size() == 1);
    CHECK(trace.unmet_goal[0].pred == "at");
    CHECK(trace.unmet_goal[0].args == std::vector<std::string>{"room3"});
  }
}

TEST_CASE("ground_actions enumerates schemas in declared, bindings in name order") {
  const World w =
      load_world("domains/cleaning.pddl", "problems/cleaning_spill.pddl");
  const std::vector<world::GroundAction> actions = planner::ground_actions(w);
  // close x4 objects, clean_spill x (1 floor * 1 rag * 1 agent),
  // inline pick_up x4
  REQUIRE(actions.size() == 9);
  CHECK(actions[0].schema->name == "close");
  CHECK(actions[0].binding == std::vector<std::string>{"agent"});
  CHECK(actions[3].binding == std::vector<std::string>{"sink_1"});
  CHECK(actions[4].schema->name == "clean_spill");
  CHECK(actions[4].binding ==
        std::vector<std::string>{"floor_1", "rag_1", "agent"});
  CHECK(actions[5].schema->name == "pick_up");
  CHECK(actions[8].schema->name == "pick_up");
}

TEST_CASE("50 random worlds agree with the enumeration and closure oracles") {
  testgen::SmallWorldGen gen(424242);
  int found = 0;
  int proved_empty = 0;
  for (int i = 0; i < 50; ++i) {
    const testgen::SmallWorld sw = gen.next();
    INFO("world " << i);
    const World w = world::build_world(sw.domain, sw.problem);

    const planner::SearchResult bfs = planner::find_plan(w);
    REQUIRE(bfs.status != SearchStatus::RESOURCE_LIMIT);

    const bool reachable = testgen::oracle_goal_reachable(
        sw.oracle_actions, sw.oracle_goal, sw.oracle_init);
    const std::optional<size_t> shortest = testgen::oracle_min_plan(
        sw.oracle_actions, sw.oracle_goal, sw.oracle_init, 5);

    if (bfs.status == SearchStatus::FOUND) {
      ++found;
      CHECK(reachable);
      CHECK(oracle_accepts(sw, to_refs(bfs.plan)));
      if (bfs.plan.steps.size() <= 5) {
        REQUIRE(shortest.has_value());
        CHECK(*shortest == bfs.plan.steps.size());
      } else {
        CHECK_FALSE(shortest.has_value());
      }
    } else {
      ++proved_empty;
      CHECK_FALSE(reachable);
      CHECK_FALSE(shortest.has_value());
    }

    SearchLimits greedy;
    greedy.mode = SearchMode::GREEDY;
    const planner::SearchResult gr = planner::find_plan(w, greedy);
    REQUIRE(gr.status == bfs.status);
    if (gr.status == SearchStatus::FOUND) {
      CHECK(oracle_accepts(sw, to_refs(gr.plan)));
      CHECK(gr.plan.steps.size() >= bfs.plan.steps.size());
    }
  }
  // the generator must exercise both outcomes
  CHECK(found > 10);
  CHECK(proved_empty > 2);
}
