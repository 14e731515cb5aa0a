#pragma once

#include <vector>

#include "safel/pddl/ast.hpp"

namespace safel::pddl {

// A DNF disjunct: conjunction of leaves, each either Kind::Literal or
// Kind::Forall (quantifiers are expanded later, against a concrete object
// universe).
using Disjunct = std::vector<Condition>;

// Flatten a condition into disjuncts. And distributes over Or; duplicate
// leaves in a disjunct and duplicate disjuncts are dropped (first occurrence
// wins). An always-true condition yields one empty disjunct; an always-false
// one (empty or) yields none.
std::vector<Disjunct> dnf(const Condition& cond);

// Canonical DNF tree: Or of Ands of leaves. Idempotent.
Condition normalize(const Condition& cond);

}  // namespace safel::pddl
