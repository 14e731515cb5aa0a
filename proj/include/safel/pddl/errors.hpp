#pragma once

#include <stdexcept>
#include <string>

namespace safel::pddl {

// Malformed input with a source position (1-based line/column).
struct SyntaxError : std::runtime_error {
  int line = 0;
  int col = 0;

  SyntaxError(const std::string& message, int line_, int col_)
      : std::runtime_error(message + " (line " + std::to_string(line_) +
                           ", col " + std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct DuplicateObjectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// parse_action_block found no (:action ...) form in the text.
struct EmptyOutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NormalizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace safel::pddl
