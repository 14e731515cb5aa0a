#include "safel/pddl/lexer.hpp"

#include <cctype>

namespace safel::pddl {
namespace {

bool is_delim(char c) {
  return c == '(' || c == ')' || c == ';' || c == ',' ||
         std::isspace(static_cast<unsigned char>(c)) != 0;
}

}  // namespace

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> tokens;
  int line = 1;
  int col = 1;
  size_t i = 0;

  auto advance = [&](char c) {
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') {
        advance(text[i]);
        ++i;
      }
      continue;
    }
    if (c == ',' || std::isspace(static_cast<unsigned char>(c)) != 0) {
      advance(c);
      ++i;
      continue;
    }
    if (c == '(' || c == ')') {
      tokens.push_back({c == '(' ? Token::Kind::LParen : Token::Kind::RParen,
                        std::string(1, c), line, col});
      advance(c);
      ++i;
      continue;
    }
    Token tok{Token::Kind::Symbol, "", line, col};
    while (i < text.size() && !is_delim(text[i])) {
      tok.text.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(text[i]))));
      advance(text[i]);
      ++i;
    }
    // Merge a stray ":" with the following word so ": precondition" lexes
    // like ":precondition" (seen in model output).
    if (!tokens.empty() && tokens.back().kind == Token::Kind::Symbol &&
        tokens.back().text == ":" && tok.text.front() != ':') {
      tokens.back().text += tok.text;
      continue;
    }
    tokens.push_back(std::move(tok));
  }
  tokens.push_back({Token::Kind::End, "", line, col});
  return tokens;
}

}  // namespace safel::pddl
