#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "safel/pddl/ast.hpp"
#include "safel/pddl/errors.hpp"

namespace safel::pddl {

Domain parse_domain(std::string_view text);
Problem parse_problem(std::string_view text);

// Parse one or more (:action ...) blocks from free-form model output.
// Tolerates a JSON wrapper of the shape {"output": "..."} as well as stray
// text between and around the blocks. Throws EmptyOutputError when no action
// block is present.
std::vector<ActionSchema> parse_action_block(std::string_view text);

// Parse "(name arg*)" plan lines. Empty/blank lines are skipped. Names are
// not validated against any domain; a SyntaxError carries the 1-based index
// of the offending line.
std::vector<GroundActionRef> parse_plan(const std::vector<std::string>& lines);

}  // namespace safel::pddl
