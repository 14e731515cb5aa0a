#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "safel/harness/client.hpp"
#include "safel/harness/prompts.hpp"
#include "safel/harness/report.hpp"
#include "safel/harness/runner.hpp"
#include "safel/harness/store.hpp"
#include "safel/pddl/parser.hpp"
#include "safel/pddl/printer.hpp"
#include "safel/pipeline/pipeline.hpp"
#include "safel/world/world.hpp"

using namespace safel;
using namespace safel::harness;
using nlohmann::json;

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

std::string temp_store_path(const std::string& tag) {
  std::mt19937_64 rng(std::random_device{}());
  const std::string path =
      (std::filesystem::temp_directory_path() /
       ("safel_" + tag + "_" + std::to_string(rng()) + ".jsonl"))
          .string();
  std::filesystem::remove(path);
  return path;
}

// In-process chat endpoint; the handler sees the extracted prompt text.
struct StubServer {
  using Handler =
      std::function<void(const std::string& prompt, httplib::Response&)>;

  explicit StubServer(Handler handler) {
    server.Post("/v1/chat/completions",
                [this, handler](const httplib::Request& req,
                                httplib::Response& res) {
                  ++requests;
                  last_body = req.body;
                  const json parsed = json::parse(req.body, nullptr, false);
                  std::string prompt;
                  if (parsed.is_object() && parsed.contains("messages") &&
                      !parsed["messages"].empty()) {
                    prompt = parsed["messages"][0].value("content", "");
                  }
                  handler(prompt, res);
                });
    port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~StubServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }

  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port);
  }

  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> requests{0};
  std::string last_body;
};

void reply(httplib::Response& res, const std::string& text) {
  const json body = {
      {"choices", json::array({{{"message", {{"content", text}}}}})}};
  res.set_content(body.dump(), "application/json");
}

EndpointConfig stub_config(const StubServer& server,
                           const std::string& model = "stub-model") {
  EndpointConfig config;
  config.base_url = server.url();
  config.model_name = model;
  config.auth_token = "test-token";
  config.timeout_seconds = 10;
  config.max_attempts = 3;
  config.backoff_base_seconds = 0.01;
  return config;
}

pipeline::Scenario kettle_scenario() {
  const std::vector<pipeline::Scenario> published =
      pipeline::load_scenario_file(data_path("scenarios/published.jsonl"));
  REQUIRE(published.size() == 2);
  REQUIRE(published[0].subset == pipeline::Subset::SIT);
  return published[0];
}

pipeline::Scenario vase_scenario() {
  const std::vector<pipeline::Scenario> published =
      pipeline::load_scenario_file(data_path("scenarios/published.jsonl"));
  REQUIRE(published[1].subset == pipeline::Subset::MAL);
  return published[1];
}

world::World world_for(const pipeline::Scenario& scenario) {
  const pddl::Domain igibson =
      pddl::parse_domain(read_file(data_path("domains/igibson.pddl")));
  return world::build_world(igibson, pddl::parse_problem(scenario.pddl_text));
}

}  // namespace

TEST_CASE("fnv1a_hex matches the published 64-bit vectors") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("prompt body") == fnv1a_hex("prompt body"));
  CHECK(fnv1a_hex("prompt body") != fnv1a_hex("prompt bodz"));
  CHECK(fnv1a_hex("x").size() == 16);
}

TEST_CASE("result store persists records and rejects duplicates") {
  const std::string path = temp_store_path("store");

  EvalRecord first;
  first.scenario_id = "scn_1";
  first.test = Test::GOAL;
  first.model_name = "m1";
  first.subset = pipeline::Subset::SIT;
  first.prompt_hash = fnv1a_hex("p1");
  first.raw_output = "{\"node goals\": []}";
  first.parsed_result = {{"node_goals", json::array()}};
  first.scores = {{"su_recall", 0.5}};
  first.timestamp = "2026-08-14T00:00:00Z";

  EvalRecord second = first;
  second.test = Test::REFUSAL;
  second.raw_output = "Safe, o3";
  second.scores = {{"correct", true}};
  second.error = "none recorded";

  {
    ResultStore store(path);
    store.append(first);
    store.append(second);
    CHECK(store.has("scn_1", Test::GOAL, "m1"));
    CHECK_FALSE(store.has("scn_1", Test::GOAL, "m2"));
    CHECK_FALSE(store.has("scn_2", Test::GOAL, "m1"));
    CHECK_THROWS_AS(store.append(first), StoreError);
  }

  ResultStore reloaded(path);
  REQUIRE(reloaded.records().size() == 2);
  const EvalRecord* found = reloaded.find("scn_1", Test::GOAL, "m1");
  REQUIRE(found != nullptr);
  CHECK(found->raw_output == first.raw_output);
  CHECK(found->prompt_hash == first.prompt_hash);
  CHECK(found->scores == first.scores);
  CHECK(found->subset == pipeline::Subset::SIT);
  CHECK_FALSE(found->error.has_value());
  const EvalRecord* with_error = reloaded.find("scn_1", Test::REFUSAL, "m1");
  REQUIRE(with_error != nullptr);
  REQUIRE(with_error->error.has_value());
  CHECK(*with_error->error == "none recorded");
  CHECK_THROWS_AS(reloaded.append(second), StoreError);

  SUBCASE("json round-trip preserves every field") {
    const EvalRecord copy = record_from_json(to_json(second));
    CHECK(copy.scenario_id == second.scenario_id);
    CHECK(copy.test == second.test);
    CHECK(copy.model_name == second.model_name);
    CHECK(copy.subset == second.subset);
    CHECK(copy.raw_output == second.raw_output);
    CHECK(copy.parsed_result == second.parsed_result);
    CHECK(copy.scores == second.scores);
    CHECK(copy.timestamp == second.timestamp);
    CHECK(copy.error == second.error);
  }

  std::filesystem::remove(path);
}

TEST_CASE("parse_sequence_output accepts the documented answer shapes") {
  SUBCASE("json command list") {
    const std::vector<pddl::GroundActionRef> plan = parse_sequence_output(
        R"([{"action": "Navigate_To", "objects": ["Kettle.n.01_1"]},
            {"action": "grasp", "object": "kettle.n.01_1"},
            {"action": "release", "objects": []}])");
    REQUIRE(plan.size() == 3);
    CHECK(plan[0].name == "navigate_to");
    CHECK(plan[0].args == std::vector<std::string>{"kettle.n.01_1"});
    CHECK(plan[1].args == std::vector<std::string>{"kettle.n.01_1"});
    CHECK(plan[2].args.empty());
  }

  SUBCASE("leading reasoning and code fences are skipped") {
    const std::vector<pddl::GroundActionRef> plan = parse_sequence_output(
        "First I will reach the kettle, then lift it.\n```json\n"
        R"([{"action": "navigate_to", "objects": ["kettle.n.01_1"]}])"
        "\n```\n");
    REQUIRE(plan.size() == 1);
    CHECK(plan[0].name == "navigate_to");
  }

  SUBCASE("bare s-expression lines") {
    const std::vector<pddl::GroundActionRef> plan = parse_sequence_output(
        "Plan:\n(navigate_to kettle.n.01_1)\n(grasp kettle.n.01_1)\n");
    REQUIRE(plan.size() == 2);
    CHECK(plan[1].name == "grasp");
  }

  SUBCASE("no plan in any shape throws") {
    CHECK_THROWS_AS(parse_sequence_output("I refuse to plan this."),
                    MalformedPlanError);
    CHECK_THROWS_AS(parse_sequence_output("[]"), MalformedPlanError);
    CHECK_THROWS_AS(parse_sequence_output(""), MalformedPlanError);
  }
}

TEST_CASE("test names round-trip through strings") {
  for (const Test test :
       {Test::REFUSAL, Test::GOAL, Test::TRANSITION, Test::SEQUENCE}) {
    const auto back = test_from_string(to_string(test));
    REQUIRE(back.has_value());
    CHECK(*back == test);
  }
  CHECK_FALSE(test_from_string("essay").has_value());
}

TEST_CASE("rendered prompts substitute every placeholder") {
  const pipeline::Scenario kettle = kettle_scenario();
  const pipeline::Scenario vase = vase_scenario();
  const world::World kettle_world = world_for(kettle);
  const world::World vase_world = world_for(vase);

  const char* placeholders[] = {
      "<instructions_str>", "<risk_word>",      "<unary_obj_states>",
      "<binary_states>",    "<object_in_scene>", "<all_initial_states>",
      "<tm_title>",         "<domain_name>",    "<domain_types>",
      "<domain_predicates>", "<problem_file>",  "<action_handler>",
      "<action_signatures>", "<init_state>",    "<target_state>",
      "<obj_list>"};

  for (const Test test :
       {Test::REFUSAL, Test::GOAL, Test::TRANSITION, Test::SEQUENCE}) {
    const std::string prompt = render_prompt(test, kettle, kettle_world);
    for (const char* token : placeholders) {
      INFO(to_string(test) << " leaks " << token);
      CHECK(prompt.find(token) == std::string::npos);
    }
  }

  SUBCASE("refusal prompt carries rubric, instruction, and init") {
    const std::string prompt =
        render_prompt(Test::REFUSAL, kettle, kettle_world);
    CHECK(prompt.find("Refusal, o1") != std::string::npos);
    CHECK(prompt.find("Safe, o2") != std::string::npos);
    CHECK(prompt.find("Safe, o3") != std::string::npos);
    CHECK(prompt.find(kettle.instruction) != std::string::npos);
    CHECK(prompt.find("(:init") != std::string::npos);
  }

  SUBCASE("goal prompt framing follows the subset") {
    const std::string sit = render_prompt(Test::GOAL, kettle, kettle_world);
    CHECK(sit.find("safe goal interpretation") != std::string::npos);
    CHECK(sit.find("risky goal interpretation") == std::string::npos);
    CHECK(sit.find("node goals") != std::string::npos);
    const std::string mal = render_prompt(Test::GOAL, vase, vase_world);
    CHECK(mal.find("risky goal interpretation") != std::string::npos);
  }

  SUBCASE("transition prompt blanks the held-out half") {
    const std::string sit =
        render_prompt(Test::TRANSITION, kettle, kettle_world);
    CHECK(sit.find("Safe Precondition Modeling") != std::string::npos);
    CHECK(sit.find(":precondition ()") != std::string::npos);
    CHECK(sit.find(":effect ()") == std::string::npos);
    CHECK(sit.find("(:action unplug_wire") != std::string::npos);
    CHECK(sit.find("(define (domain igibson)") != std::string::npos);
    CHECK(sit.find(kettle.pddl_text) != std::string::npos);

    const std::string mal = render_prompt(Test::TRANSITION, vase, vase_world);
    CHECK(mal.find("Risky Effect Modeling") != std::string::npos);
    CHECK(mal.find(":effect ()") != std::string::npos);
    CHECK(mal.find(":precondition ()") == std::string::npos);
    CHECK(mal.find("(:action drop_vase_on_table") != std::string::npos);
  }

  SUBCASE("sequence prompt lists signatures, states, and objects") {
    const std::string prompt =
        render_prompt(Test::SEQUENCE, kettle, kettle_world);
    CHECK(prompt.find("navigate_to (?obj - object)") != std::string::npos);
    CHECK(prompt.find("\"name\"") != std::string::npos);
    CHECK(prompt.find("['") != std::string::npos);
  }

  SUBCASE("goal prompt needs a unary vocabulary") {
    const pddl::Domain bare = pddl::parse_domain(
        "(define (domain bare) (:requirements :strips)"
        " (:predicates (rel ?a ?b))"
        " (:action link :parameters (?a ?b) :precondition (and)"
        "  :effect (rel ?a ?b)))");
    const pddl::Problem problem = pddl::parse_problem(
        "(define (problem bare-task) (:domain bare)"
        " (:objects o1 o2) (:init (rel o1 o2)) (:goal (rel o2 o1)))");
    pipeline::Scenario scenario = kettle_scenario();
    scenario.pddl_text = pddl::render(problem);
    const world::World w = world::build_world(bare, problem);
    CHECK_THROWS_AS(render_prompt(Test::GOAL, scenario, w),
                    MissingPlaceholderError);
  }
}

TEST_CASE("tm_targets keeps first-use order then uncovered inline actions") {
  const pipeline::Scenario kettle = kettle_scenario();
  const world::World w = world_for(kettle);
  const std::vector<const pddl::ActionSchema*> targets = tm_targets(kettle, w);
  std::vector<std::string> names;
  for (const pddl::ActionSchema* t : targets) names.push_back(t->name);
  CHECK(names == std::vector<std::string>{"navigate_to", "unplug_wire",
                                           "fill_kettle_with_water",
                                           "toggle_on"});
  CHECK(targets[0]->action_class == pddl::ActionClass::PRIMITIVE);
  CHECK(targets[1]->action_class == pddl::ActionClass::NEW);
}

TEST_CASE("chat client talks to the endpoint and retries") {
  SUBCASE("success round-trip carries the sampling config") {
    StubServer server([](const std::string&, httplib::Response& res) {
      reply(res, "Safe, o3");
    });
    const ChatClient client(stub_config(server));
    CHECK(client.query("classify this") == "Safe, o3");
    CHECK(server.requests.load() == 1);
    const json body = json::parse(server.last_body);
    CHECK(body["model"] == "stub-model");
    CHECK(body["messages"][0]["role"] == "user");
    CHECK(body["messages"][0]["content"] == "classify this");
    CHECK(body["temperature"].get<double>() == doctest::Approx(0.7));
    CHECK(body["max_tokens"].get<int>() == 16384);
  }

  SUBCASE("alternate completion shapes are accepted") {
    StubServer server([](const std::string&, httplib::Response& res) {
      res.set_content(R"({"choices": [{"text": "plain text"}]})",
                      "application/json");
    });
    const ChatClient client(stub_config(server));
    CHECK(client.query("p") == "plain text");

    StubServer top_level([](const std::string&, httplib::Response& res) {
      res.set_content(R"({"content": "top level"})", "application/json");
    });
    const ChatClient other(stub_config(top_level));
    CHECK(other.query("p") == "top level");
  }

  SUBCASE("429 twice then success consumes three attempts") {
    std::atomic<int> seen{0};
    StubServer server([&seen](const std::string&, httplib::Response& res) {
      if (++seen <= 2) {
        res.status = 429;
        res.set_content("slow down", "text/plain");
      } else {
        reply(res, "recovered");
      }
    });
    const ChatClient client(stub_config(server));
    CHECK(client.query("p") == "recovered");
    CHECK(server.requests.load() == 3);
  }

  SUBCASE("persistent 5xx exhausts the retry budget") {
    StubServer server([](const std::string&, httplib::Response& res) {
      res.status = 503;
      res.set_content("down", "text/plain");
    });
    EndpointConfig config = stub_config(server);
    config.max_attempts = 2;
    const ChatClient client(config);
    CHECK_THROWS_AS(client.query("p"), TransportError);
    CHECK(server.requests.load() == 2);
  }

  SUBCASE("401 aborts without retrying") {
    StubServer server([](const std::string&, httplib::Response& res) {
      res.status = 401;
      res.set_content("who are you", "text/plain");
    });
    const ChatClient client(stub_config(server));
    CHECK_THROWS_AS(client.query("p"), AuthError);
    CHECK(server.requests.load() == 1);
  }

  SUBCASE("missing token fails before any network traffic") {
    StubServer server([](const std::string&, httplib::Response& res) {
      reply(res, "never reached");
    });
    unsetenv("SAFEL_TEST_ABSENT_TOKEN");
    EndpointConfig config = stub_config(server);
    config.auth_token.clear();
    config.auth_env = "SAFEL_TEST_ABSENT_TOKEN";
    CHECK_THROWS_AS(ChatClient{config}, AuthError);
    CHECK(server.requests.load() == 0);
  }
}

namespace {

// Deterministic answers keyed on unambiguous template markers.
void scripted_reply(const std::string& prompt, httplib::Response& res) {
  if (prompt.find("Classification Categories") != std::string::npos) {
    reply(res, "Refusal, o1, scripted.");
  } else if (prompt.find("Action to be finished") != std::string::npos) {
    reply(res,
          R"json({"output": "(:action stub :parameters () :precondition () :effect ())"})json");
  } else if (prompt.find("node goals") != std::string::npos) {
    reply(res, R"({"node goals": [], "edge goals": []})");
  } else {
    reply(res, R"([{"action": "navigate_to", "objects": ["floor.n.01_1"]}])");
  }
}

}  // namespace

TEST_CASE("run_evaluation covers the corpus, resumes, and reports") {
  const pddl::Domain igibson =
      pddl::parse_domain(read_file(data_path("domains/igibson.pddl")));
  const pipeline::PipelineReport vetted = pipeline::run_pipeline(
      pipeline::load_scenario_file(data_path("scenarios/mini.jsonl")),
      igibson);
  const std::vector<pipeline::Scenario> dataset = vetted.accepted();
  REQUIRE(dataset.size() == 10);

  StubServer server([](const std::string& prompt, httplib::Response& res) {
    scripted_reply(prompt, res);
  });
  const std::set<Test> all_tests = {Test::REFUSAL, Test::GOAL,
                                    Test::TRANSITION, Test::SEQUENCE};

  ResultStore store;
  EndpointConfig config = stub_config(server, "scripted-a");
  config.max_concurrent = 2;
  config.max_attempts = 1;

  const RunSummary first =
      run_evaluation(dataset, igibson, config, all_tests, store);
  CHECK(first.completed == 36);  // 10 scenarios x 4 tests - 4 mal sequence
  CHECK(first.skipped == 4);
  CHECK(first.failed == 0);
  CHECK(store.records().size() == 36);
  bool noted_subset_skip = false;
  for (const std::string& note : first.notes) {
    if (note.find("sequence skipped") != std::string::npos) {
      noted_subset_skip = true;
    }
  }
  CHECK(noted_subset_skip);
  const int first_run_requests = server.requests.load();
  CHECK(first_run_requests == 36);

  SUBCASE("rerunning the same model makes zero endpoint calls") {
    const RunSummary resumed =
        run_evaluation(dataset, igibson, config, all_tests, store);
    CHECK(resumed.completed == 0);
    CHECK(resumed.skipped == 40);
    CHECK(resumed.failed == 0);
    CHECK(server.requests.load() == first_run_requests);
    CHECK(store.records().size() == 36);
  }

  SUBCASE("a second model adds its own records and the report aggregates") {
    EndpointConfig second = config;
    second.model_name = "scripted-b";
    run_evaluation(dataset, igibson, second, all_tests, store);
    REQUIRE(store.records().size() == 72);

    const ReportTable table = build_report(store);
    REQUIRE(table.rows.size() == 4);
    // sit rows carry an SR and sort ahead of mal rows (no sequencing there)
    CHECK(table.rows[0].subset == "sit");
    CHECK(table.rows[1].subset == "sit");
    CHECK(table.rows[0].model == "scripted-a");
    CHECK(table.rows[1].model == "scripted-b");
    CHECK(table.rows[2].subset == "mal");

    for (const MetricsRow& row : table.rows) {
      INFO(row.model << "/" << row.subset);
      REQUIRE(row.refusal_recall.has_value());
      if (row.subset == "mal") {
        CHECK(*row.refusal_recall == doctest::Approx(100.0));  // all refused
        CHECK_FALSE(row.sr.has_value());
        CHECK(row.scenarios == 4);
      } else {
        CHECK(*row.refusal_recall == doctest::Approx(0.0));
        REQUIRE(row.sr.has_value());
        // scripted single-step plans execute but never reach the goal
        CHECK(*row.sr == doctest::Approx(0.0));
        CHECK(*row.er == doctest::Approx(100.0));
        CHECK(row.breakdown.at("unmet_goal") == doctest::Approx(100.0));
        CHECK(row.breakdown.at("grammar") == doctest::Approx(0.0));
        CHECK(std::abs(*row.sr + *row.er - 100.0) <= 0.01);
        CHECK(row.scenarios == 6);
      }
      REQUIRE(row.su_r.has_value());
      CHECK(*row.su_r == doctest::Approx(0.0));  // empty goal predictions
      REQUIRE(row.a_avg.has_value());
      CHECK(*row.a_avg == doctest::Approx(0.0));  // stub never matches
      CHECK(row.failed == 0);
    }

    const std::string text = render_report(table, ReportFormat::TEXT);
    CHECK(text.find("model") == 0);
    CHECK(text.find("unmet_goal") != std::string::npos);
    CHECK(text.find("100.00") != std::string::npos);  // two-decimal er
    CHECK(text.find("100.0 ") != std::string::npos);  // one-decimal refusal
    CHECK(text.find(" - ") != std::string::npos);     // mal sr placeholder

    const std::string csv = render_report(table, ReportFormat::CSV);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
    CHECK(csv.rfind("model,subset,refusal,", 0) == 0);

    const json parsed = json::parse(render_report(table, ReportFormat::JSON));
    REQUIRE(parsed["rows"].size() == 4);
    CHECK(parsed["rows"][0]["subset"] == "sit");
    CHECK(parsed["rows"][2]["sr"].is_null());
  }
}

TEST_CASE("per-record transport failures are recorded, not retried") {
  const pddl::Domain igibson =
      pddl::parse_domain(read_file(data_path("domains/igibson.pddl")));
  const std::vector<pipeline::Scenario> dataset = {kettle_scenario()};

  StubServer server([](const std::string&, httplib::Response& res) {
    res.status = 500;
    res.set_content("boom", "text/plain");
  });
  EndpointConfig config = stub_config(server, "flaky");
  config.max_attempts = 1;

  ResultStore store;
  const RunSummary first = run_evaluation(dataset, igibson, config,
                                          {Test::REFUSAL}, store);
  CHECK(first.completed == 0);
  CHECK(first.failed == 1);
  REQUIRE(store.records().size() == 1);
  REQUIRE(store.records()[0].error.has_value());
  CHECK(*store.records()[0].error == "TransportError");
  CHECK(store.records()[0].scores.is_null());

  const int calls = server.requests.load();
  const RunSummary second = run_evaluation(dataset, igibson, config,
                                           {Test::REFUSAL}, store);
  CHECK(second.skipped == 1);
  CHECK(second.failed == 0);
  CHECK(server.requests.load() == calls);

  // the lone failed record still yields a report row, tallied as failed
  const ReportTable table = build_report(store);
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].failed == 1);
  CHECK(table.rows[0].scenarios == 0);
  CHECK_FALSE(table.rows[0].refusal_recall.has_value());
}

TEST_CASE("auth rejection aborts a run") {
  const pddl::Domain igibson =
      pddl::parse_domain(read_file(data_path("domains/igibson.pddl")));
  const std::vector<pipeline::Scenario> dataset = {kettle_scenario()};

  StubServer server([](const std::string&, httplib::Response& res) {
    res.status = 403;
    res.set_content("forbidden", "text/plain");
  });
  ResultStore store;
  CHECK_THROWS_AS(run_evaluation(dataset, igibson, stub_config(server),
                                 {Test::REFUSAL, Test::GOAL}, store),
                  AuthError);
}

TEST_CASE("report formats and the empty store") {
  ResultStore empty;
  CHECK_THROWS_AS(build_report(empty), EmptyStoreError);

  CHECK(format_from_string("TEXT") == ReportFormat::TEXT);
  CHECK(format_from_string("csv") == ReportFormat::CSV);
  CHECK(format_from_string("Json") == ReportFormat::JSON);
  CHECK_FALSE(format_from_string("pdf").has_value());
}
