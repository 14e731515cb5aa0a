#include "safel/eval/transition.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "safel/pddl/normalize.hpp"

namespace safel::eval {
namespace {

using pddl::Condition;
using pddl::Effect;
using pddl::Literal;

using Env = std::map<std::string, std::string>;

std::string canon_arg(const std::string& arg, const Env& env) {
  auto it = env.find(arg);
  return it == env.end() ? arg : it->second;
}

std::string canon_literal(const Literal& lit, const Env& env) {
  std::ostringstream out;
  if (lit.negated) out << '!';
  out << lit.pred << '(';
  for (size_t i = 0; i < lit.args.size(); ++i) {
    if (i > 0) out << ',';
    out << canon_arg(lit.args[i], env);
  }
  out << ')';
  return out.str();
}

std::string join_sorted(std::vector<std::string> parts) {
  std::sort(parts.begin(), parts.end());
  std::ostringstream out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out << ' ';
    out << parts[i];
  }
  return out.str();
}

std::string condition_fingerprint(const Condition& cond, Env& env,
                                  size_t depth) {
  switch (cond.kind) {
    case Condition::Kind::Literal:
      return canon_literal(cond.lit, env);
    case Condition::Kind::And:
    case Condition::Kind::Or: {
      std::vector<std::string> parts;
      for (const Condition& child : cond.children) {
        parts.push_back(condition_fingerprint(child, env, depth));
      }
      return std::string(cond.kind == Condition::Kind::And ? "and" : "or") +
             "{" + join_sorted(std::move(parts)) + "}";
    }
    case Condition::Kind::Forall: {
      std::string bound = "?f" + std::to_string(depth);
      auto previous = env.find(cond.var.name);
      std::optional<std::string> saved;
      if (previous != env.end()) saved = previous->second;
      env[cond.var.name] = bound;
      std::string body =
          condition_fingerprint(cond.children.front(), env, depth + 1);
      if (saved) {
        env[cond.var.name] = *saved;
      } else {
        env.erase(cond.var.name);
      }
      return "forall[" + bound + "-" + cond.var.type + "]{" + body + "}";
    }
  }
  return {};
}

void effect_features(const Effect& eff, Env& env, size_t depth,
                     std::set<std::string>& out) {
  switch (eff.kind) {
    case Effect::Kind::Literal:
      out.insert(canon_literal(eff.lit, env));
      break;
    case Effect::Kind::And:
      for (const Effect& child : eff.children) {
        effect_features(child, env, depth, out);
      }
      break;
    case Effect::Kind::When: {
      std::string guard = condition_fingerprint(eff.condition, env, depth);
      std::set<std::string> body;
      effect_features(eff.children.front(), env, depth, body);
      out.insert("when[" + guard + "]{" +
                 join_sorted({body.begin(), body.end()}) + "}");
      break;
    }
    case Effect::Kind::Forall: {
      std::string bound = "?f" + std::to_string(depth);
      auto previous = env.find(eff.var.name);
      std::optional<std::string> saved;
      if (previous != env.end()) saved = previous->second;
      env[eff.var.name] = bound;
      std::set<std::string> body;
      effect_features(eff.children.front(), env, depth + 1, body);
      if (saved) {
        env[eff.var.name] = *saved;
      } else {
        env.erase(eff.var.name);
      }
      out.insert("forall[" + bound + "-" + eff.var.type + "]{" +
                 join_sorted({body.begin(), body.end()}) + "}");
      break;
    }
  }
}

double f1(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  if (a.empty() || b.empty()) return 0.0;
  std::vector<std::string> overlap;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(overlap));
  if (overlap.empty()) return 0.0;
  double precision = static_cast<double>(overlap.size()) /
                     static_cast<double>(a.size());
  double recall = static_cast<double>(overlap.size()) /
                  static_cast<double>(b.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> mean(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

ExtractedConditions extract_conditions(const pddl::ActionSchema& schema) {
  Env env;
  for (size_t i = 0; i < schema.params.size(); ++i) {
    env[schema.params[i].name] = "?p" + std::to_string(i);
  }

  ExtractedConditions out;
  for (const pddl::Disjunct& disjunct : pddl::dnf(schema.precondition)) {
    std::set<std::string> leaves;
    for (const Condition& leaf : disjunct) {
      leaves.insert(condition_fingerprint(leaf, env, 0));
    }
    out.pre_disjuncts.push_back(std::move(leaves));
  }
  effect_features(schema.effect, env, 0, out.eff_features);
  return out;
}

TMScore score_action(const pddl::ActionSchema& predicted,
                     const pddl::ActionSchema& gt) {
  ExtractedConditions p = extract_conditions(predicted);
  ExtractedConditions g = extract_conditions(gt);

  TMScore score;
  score.action_name = gt.name;
  score.action_class = gt.action_class;
  for (const std::set<std::string>& pd : p.pre_disjuncts) {
    for (const std::set<std::string>& gd : g.pre_disjuncts) {
      score.pre_score = std::max(score.pre_score, f1(pd, gd));
    }
  }
  score.eff_score = f1(p.eff_features, g.eff_features);
  score.combined = (score.pre_score + score.eff_score) / 2.0;
  return score;
}

TMAggregate aggregate_tm(const std::vector<TMScore>& scores) {
  std::vector<double> primitive;
  std::vector<double> fresh;
  std::vector<double> all;
  for (const TMScore& score : scores) {
    all.push_back(score.combined);
    if (score.action_class == pddl::ActionClass::PRIMITIVE) {
      primitive.push_back(score.combined);
    } else {
      fresh.push_back(score.combined);
    }
  }

  TMAggregate aggregate;
  aggregate.ap_s = mean(primitive);
  aggregate.an_s = mean(fresh);
  aggregate.a_avg = mean(all);
  return aggregate;
}

}  // namespace safel::eval
