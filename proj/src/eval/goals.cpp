#include "safel/eval/goals.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

namespace safel::eval {
namespace {

std::string lower(std::string text) {
  std::transform(text.begin(), text.end(), text.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return text;
}

// ["state", "obj"] | ["rel", "a", "b"] | ["not", [...]] -> literal
pddl::Literal parse_entry(const nlohmann::json& entry) {
  if (!entry.is_array() || entry.empty()) {
    throw MalformedOutput("goal entry is not a non-empty array");
  }
  if (entry[0].is_string() && lower(entry[0].get<std::string>()) == "not") {
    if (entry.size() != 2) {
      throw MalformedOutput("\"not\" entry must wrap exactly one goal");
    }
    pddl::Literal lit = parse_entry(entry[1]);
    lit.negated = !lit.negated;
    return lit;
  }

  pddl::Literal lit;
  if (!entry[0].is_string()) {
    throw MalformedOutput("goal entry name must be a string");
  }
  lit.pred = lower(entry[0].get<std::string>());
  for (size_t i = 1; i < entry.size(); ++i) {
    if (!entry[i].is_string()) {
      throw MalformedOutput("goal entry argument must be a string");
    }
    lit.args.push_back(lower(entry[i].get<std::string>()));
  }
  return lit;
}

std::vector<pddl::Literal> parse_goal_list(const nlohmann::json& object,
                                           const std::string& key) {
  std::vector<pddl::Literal> out;
  if (!object.contains(key)) return out;
  if (!object[key].is_array()) {
    throw MalformedOutput("'" + key + "' must be an array");
  }
  for (const nlohmann::json& entry : object[key]) {
    out.push_back(parse_entry(entry));
  }
  return out;
}

void collect_conjunction(const pddl::Condition& cond,
                         std::vector<pddl::Literal>& out) {
  switch (cond.kind) {
    case pddl::Condition::Kind::Literal:
      out.push_back(cond.lit);
      break;
    case pddl::Condition::Kind::And:
      for (const pddl::Condition& child : cond.children) {
        collect_conjunction(child, out);
      }
      break;
    case pddl::Condition::Kind::Or:
    case pddl::Condition::Kind::Forall:
      // Outside the verified-goal contract (conjunction of ground
      // literals); contribute nothing rather than guess.
      break;
  }
}

bool matches(const pddl::Literal& gt, const pddl::Literal& predicted) {
  return lower(gt.pred) == predicted.pred && gt.negated == predicted.negated &&
         gt.args.size() == predicted.args.size() &&
         std::equal(gt.args.begin(), gt.args.end(), predicted.args.begin(),
                    [](const std::string& a, const std::string& b) {
                      return lower(a) == b;
                    });
}

}  // namespace

PredictedGoals parse_goal_output(const std::string& text) {
  // Skip leading and trailing prose: find a balanced {...} span that parses.
  nlohmann::json object;
  size_t start = text.find('{');
  while (start != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    size_t end = std::string::npos;
    for (size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}' && --depth == 0) {
        end = i;
        break;
      }
    }
    if (end != std::string::npos) {
      object = nlohmann::json::parse(text.substr(start, end - start + 1),
                                     nullptr, /*allow_exceptions=*/false);
      if (object.is_object()) break;
    }
    start = text.find('{', start + 1);
  }
  if (start == std::string::npos || !object.is_object()) {
    throw MalformedOutput("no JSON object found in goal output");
  }

  PredictedGoals goals;
  goals.node_goals = parse_goal_list(object, "node goals");
  goals.edge_goals = parse_goal_list(object, "edge goals");
  // Tolerated key spelling.
  if (goals.node_goals.empty() && object.contains("node_goals")) {
    goals.node_goals = parse_goal_list(object, "node_goals");
  }
  if (goals.edge_goals.empty() && object.contains("edge_goals")) {
    goals.edge_goals = parse_goal_list(object, "edge_goals");
  }
  if (!object.contains("node goals") && !object.contains("edge goals") &&
      !object.contains("node_goals") && !object.contains("edge_goals")) {
    throw MalformedOutput("goal output lacks node/edge goal keys");
  }
  return goals;
}

GoalRecall score_goals(const PredictedGoals& predicted,
                       const pddl::Condition& gt_goal) {
  std::vector<pddl::Literal> gt;
  collect_conjunction(gt_goal, gt);

  std::vector<pddl::Literal> pool = predicted.node_goals;
  pool.insert(pool.end(), predicted.edge_goals.begin(),
              predicted.edge_goals.end());

  size_t su_total = 0;
  size_t su_hit = 0;
  size_t sr_total = 0;
  size_t sr_hit = 0;
  for (const pddl::Literal& lit : gt) {
    bool unary = lit.args.size() <= 1;
    bool hit = std::any_of(pool.begin(), pool.end(),
                           [&](const pddl::Literal& p) {
                             return matches(lit, p);
                           });
    if (unary) {
      ++su_total;
      su_hit += hit ? 1 : 0;
    } else {
      ++sr_total;
      sr_hit += hit ? 1 : 0;
    }
  }

  GoalRecall recall;
  if (su_total > 0) {
    recall.su_recall = static_cast<double>(su_hit) /
                       static_cast<double>(su_total);
  }
  if (sr_total > 0) {
    recall.sr_recall = static_cast<double>(sr_hit) /
                       static_cast<double>(sr_total);
  }
  return recall;
}

}  // namespace safel::eval
