#include "safel/pddl/normalize.hpp"

#include <algorithm>
#include <utility>

namespace safel::pddl {
namespace {

std::vector<Disjunct> combine(const std::vector<std::vector<Disjunct>>& parts) {
  std::vector<Disjunct> acc = {{}};
  for (const std::vector<Disjunct>& part : parts) {
    std::vector<Disjunct> merged;
    for (const Disjunct& left : acc) {
      for (const Disjunct& right : part) {
        Disjunct row = left;
        row.insert(row.end(), right.begin(), right.end());
        merged.push_back(std::move(row));
      }
    }
    acc = std::move(merged);
  }
  return acc;
}

void dedupe(std::vector<Disjunct>& disjuncts) {
  for (Disjunct& d : disjuncts) {
    Disjunct unique;
    for (Condition& leaf : d) {
      if (std::find(unique.begin(), unique.end(), leaf) == unique.end()) {
        unique.push_back(std::move(leaf));
      }
    }
    d = std::move(unique);
  }
  std::vector<Disjunct> unique;
  for (Disjunct& d : disjuncts) {
    if (std::find(unique.begin(), unique.end(), d) == unique.end()) {
      unique.push_back(std::move(d));
    }
  }
  disjuncts = std::move(unique);
}

}  // namespace

std::vector<Disjunct> dnf(const Condition& cond) {
  std::vector<Disjunct> result;
  switch (cond.kind) {
    case Condition::Kind::Literal:
      result = {{cond}};
      break;
    case Condition::Kind::Forall: {
      Condition leaf =
          Condition::make_forall(cond.var, normalize(cond.children.front()));
      result = {{std::move(leaf)}};
      break;
    }
    case Condition::Kind::And: {
      std::vector<std::vector<Disjunct>> parts;
      parts.reserve(cond.children.size());
      for (const Condition& child : cond.children) parts.push_back(dnf(child));
      result = combine(parts);
      break;
    }
    case Condition::Kind::Or: {
      for (const Condition& child : cond.children) {
        std::vector<Disjunct> sub = dnf(child);
        result.insert(result.end(), std::make_move_iterator(sub.begin()),
                      std::make_move_iterator(sub.end()));
      }
      break;
    }
  }
  dedupe(result);
  return result;
}

Condition normalize(const Condition& cond) {
  std::vector<Condition> disjuncts;
  for (Disjunct& d : dnf(cond)) {
    disjuncts.push_back(Condition::make_and(std::move(d)));
  }
  return Condition::make_or(std::move(disjuncts));
}

}  // namespace safel::pddl
