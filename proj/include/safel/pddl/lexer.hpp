#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace safel::pddl {

struct Token {
  enum class Kind { LParen, RParen, Symbol, End };

  Kind kind = Kind::End;
  std::string text;  // lowercased symbol text
  int line = 1;
  int col = 1;
};

// Tokenize s-expression text. Case-insensitive dialect: symbols are folded to
// lowercase. '.' and '-' are ordinary identifier characters ("kettle.n.01_1",
// "room-navigation"); a lone '-' is the typed-list separator. ',' is treated
// as whitespace and ';' starts a comment running to end of line. A detached
// section marker (": precondition") is merged into one ":precondition" token.
std::vector<Token> lex(std::string_view text);

}  // namespace safel::pddl
