#pragma once

#include <string>

#include "safel/pddl/ast.hpp"

namespace safel::pddl {

// Canonical text renderers. parse(render(x)) is structurally identical to x.
std::string render(const Literal& lit);
std::string render(const Condition& cond);
std::string render(const Effect& eff);
std::string render(const ActionSchema& schema);
std::string render(const Domain& domain);
std::string render(const Problem& problem);
std::string render(const GroundActionRef& ref);  // one plan line

}  // namespace safel::pddl
