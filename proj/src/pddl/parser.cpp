#include "safel/pddl/parser.hpp"

#include <cctype>
#include <set>
#include <utility>

#include <json.hpp>

#include "safel/pddl/lexer.hpp"

namespace safel::pddl {

Condition Condition::make_literal(Literal l) {
  Condition c;
  c.kind = Kind::Literal;
  c.lit = std::move(l);
  return c;
}

Condition Condition::make_and(std::vector<Condition> cs) {
  Condition c;
  c.kind = Kind::And;
  c.children = std::move(cs);
  return c;
}

Condition Condition::make_or(std::vector<Condition> cs) {
  Condition c;
  c.kind = Kind::Or;
  c.children = std::move(cs);
  return c;
}

Condition Condition::make_forall(TypedVar v, Condition body) {
  Condition c;
  c.kind = Kind::Forall;
  c.var = std::move(v);
  c.children.push_back(std::move(body));
  return c;
}

Effect Effect::make_literal(Literal l) {
  Effect e;
  e.kind = Kind::Literal;
  e.lit = std::move(l);
  return e;
}

Effect Effect::make_and(std::vector<Effect> es) {
  Effect e;
  e.kind = Kind::And;
  e.children = std::move(es);
  return e;
}

Effect Effect::make_when(Condition cond, Effect body) {
  Effect e;
  e.kind = Kind::When;
  e.condition = std::move(cond);
  e.children.push_back(std::move(body));
  return e;
}

Effect Effect::make_forall(TypedVar v, Effect body) {
  Effect e;
  e.kind = Kind::Forall;
  e.var = std::move(v);
  e.children.push_back(std::move(body));
  return e;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  Domain domain() {
    expect_lparen();
    expect_symbol("define");
    expect_lparen();
    expect_symbol("domain");
    Domain d;
    d.name = symbol("domain name");
    expect_rparen();
    while (!at_rparen()) {
      expect_lparen();
      const Token& section = peek();
      if (section.text == ":requirements") {
        next();
        while (!at_rparen()) d.requirements.push_back(symbol("requirement"));
        expect_rparen();
      } else if (section.text == ":types") {
        next();
        parse_type_decls(d.types);
      } else if (section.text == ":predicates") {
        next();
        parse_predicate_decls(d.predicates);
      } else if (section.text == ":action") {
        d.actions.push_back(action_schema(ActionClass::PRIMITIVE));
      } else {
        fail("unknown section keyword '" + section.text + "'", section);
      }
    }
    expect_rparen();
    expect_end();
    return d;
  }

  Problem problem() {
    expect_lparen();
    expect_symbol("define");
    expect_lparen();
    expect_symbol("problem");
    Problem p;
    p.name = symbol("problem name");
    expect_rparen();
    while (!at_rparen()) {
      expect_lparen();
      const Token& section = peek();
      if (section.text == ":domain") {
        next();
        p.domain_name = symbol("domain name");
        expect_rparen();
      } else if (section.text == ":objects") {
        next();
        std::set<std::string> seen;
        for (const TypedVar& obj : typed_list()) {
          if (!seen.insert(obj.name).second) {
            throw DuplicateObjectError("duplicate object '" + obj.name + "'");
          }
          p.objects.push_back(obj);
        }
        expect_rparen();
      } else if (section.text == ":init") {
        next();
        while (!at_rparen()) p.init.push_back(init_literal());
        expect_rparen();
      } else if (section.text == ":goal") {
        next();
        p.goal = condition();
        expect_rparen();
      } else if (section.text == ":types") {
        next();
        parse_type_decls(p.inline_types);
      } else if (section.text == ":predicates") {
        next();
        parse_predicate_decls(p.inline_predicates);
      } else if (section.text == ":action") {
        p.inline_actions.push_back(action_schema(ActionClass::NEW));
      } else {
        fail("unknown section keyword '" + section.text + "'", section);
      }
    }
    expect_rparen();
    expect_end();
    return p;
  }

  // Scan for (:action ...) forms anywhere in the token stream, skipping
  // unrelated tokens between them.
  std::vector<ActionSchema> action_blocks() {
    std::vector<ActionSchema> schemas;
    while (peek().kind != Token::Kind::End) {
      if (peek().kind == Token::Kind::LParen &&
          peek(1).kind == Token::Kind::Symbol && peek(1).text == ":action") {
        next();  // consume '('
        schemas.push_back(action_schema(ActionClass::NEW));
      } else {
        next();
      }
    }
    return schemas;
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t idx = pos_ + ahead;
    if (idx >= tokens_.size()) idx = tokens_.size() - 1;
    return tokens_[idx];
  }

  const Token& next() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail(const std::string& message, const Token& at) const {
    throw SyntaxError(message, at.line, at.col);
  }

  bool at_rparen() const { return peek().kind == Token::Kind::RParen; }

  void expect_lparen() {
    if (peek().kind != Token::Kind::LParen) fail("expected '('", peek());
    next();
  }

  void expect_rparen() {
    if (peek().kind != Token::Kind::RParen) fail("expected ')'", peek());
    next();
  }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("trailing input", peek());
  }

  void expect_symbol(const std::string& text) {
    if (peek().kind != Token::Kind::Symbol || peek().text != text) {
      fail("expected '" + text + "'", peek());
    }
    next();
  }

  std::string symbol(const std::string& what) {
    if (peek().kind != Token::Kind::Symbol) {
      fail("expected " + what, peek());
    }
    return next().text;
  }

  // names... [- type] groups, up to (but not consuming) the closing ')'.
  std::vector<TypedVar> typed_list() {
    std::vector<TypedVar> vars;
    std::vector<std::string> pending;
    while (!at_rparen()) {
      std::string tok = symbol("name in typed list");
      if (tok == "-") {
        std::string type = symbol("type name");
        for (std::string& name : pending) {
          vars.push_back({std::move(name), type});
        }
        pending.clear();
      } else {
        pending.push_back(std::move(tok));
      }
    }
    for (std::string& name : pending) {
      vars.push_back({std::move(name), kRootType});
    }
    return vars;
  }

  void parse_type_decls(std::vector<TypeDecl>& out) {
    for (const TypedVar& tv : typed_list()) {
      out.push_back({tv.name, tv.type});
    }
    expect_rparen();
  }

  void parse_predicate_decls(std::vector<PredicateDecl>& out) {
    while (!at_rparen()) {
      expect_lparen();
      PredicateDecl decl;
      decl.name = symbol("predicate name");
      decl.params = typed_list();
      expect_rparen();
      out.push_back(std::move(decl));
    }
    expect_rparen();
  }

  // Caller has consumed '('; consumes through the closing ')'.
  ActionSchema action_schema(ActionClass action_class) {
    expect_symbol(":action");
    ActionSchema schema;
    schema.action_class = action_class;
    schema.name = symbol("action name");
    while (!at_rparen()) {
      const Token& key = peek();
      if (key.text == ":parameters") {
        next();
        expect_lparen();
        schema.params = typed_list();
        expect_rparen();
      } else if (key.text == ":precondition") {
        next();
        schema.precondition = condition();
      } else if (key.text == ":effect") {
        next();
        schema.effect = effect();
      } else {
        fail("unknown action keyword '" + key.text + "'", key);
      }
    }
    expect_rparen();
    return schema;
  }

  Literal atom() {
    Literal lit;
    lit.pred = symbol("predicate name");
    while (!at_rparen()) lit.args.push_back(symbol("argument"));
    expect_rparen();
    return lit;
  }

  // :init entry: (pred args...) or (not (pred args...)).
  Literal init_literal() {
    expect_lparen();
    if (peek().text == "not") {
      next();
      expect_lparen();
      Literal lit = atom();
      lit.negated = true;
      expect_rparen();
      return lit;
    }
    return atom();
  }

  TypedVar quantified_var() {
    expect_lparen();
    std::vector<TypedVar> vars = typed_list();
    expect_rparen();
    if (vars.size() != 1) {
      fail("expected exactly one quantified variable", peek());
    }
    return vars.front();
  }

  // Caller positions us at '('; consumes the full form.
  Condition condition() {
    expect_lparen();
    if (at_rparen()) {  // "()" — vacuous truth, as in blanked preconditions
      next();
      return Condition::make_and({});
    }
    const Token& head = peek();
    if (head.text == "and" || head.text == "or") {
      bool conj = head.text == "and";
      next();
      std::vector<Condition> children;
      while (!at_rparen()) children.push_back(condition());
      expect_rparen();
      return conj ? Condition::make_and(std::move(children))
                  : Condition::make_or(std::move(children));
    }
    if (head.text == "not") {
      Token at = head;
      next();
      Condition inner = condition();
      expect_rparen();
      return negate(std::move(inner), at);
    }
    if (head.text == "forall") {
      next();
      TypedVar var = quantified_var();
      Condition body = condition();
      expect_rparen();
      return Condition::make_forall(std::move(var), std::move(body));
    }
    return Condition::make_literal(atom());
  }

  // Push negation down so it rests on literals only (De Morgan); negated
  // quantifiers are outside the supported subset.
  Condition negate(Condition c, const Token& at) {
    switch (c.kind) {
      case Condition::Kind::Literal:
        c.lit.negated = !c.lit.negated;
        return c;
      case Condition::Kind::And:
      case Condition::Kind::Or: {
        std::vector<Condition> flipped;
        flipped.reserve(c.children.size());
        for (Condition& child : c.children) {
          flipped.push_back(negate(std::move(child), at));
        }
        return c.kind == Condition::Kind::And
                   ? Condition::make_or(std::move(flipped))
                   : Condition::make_and(std::move(flipped));
      }
      case Condition::Kind::Forall:
        fail("negated quantifier is not supported", at);
    }
    fail("unreachable", at);
  }

  Effect effect() {
    expect_lparen();
    if (at_rparen()) {  // "()" — blank effect handler
      next();
      return Effect::make_and({});
    }
    const Token& head = peek();
    if (head.text == "and") {
      next();
      std::vector<Effect> children;
      while (!at_rparen()) children.push_back(effect());
      expect_rparen();
      return Effect::make_and(std::move(children));
    }
    if (head.text == "or") {
      fail("'or' is not allowed inside effects", head);
    }
    if (head.text == "not") {
      Token at = head;
      next();
      expect_lparen();
      if (peek().text == "and" || peek().text == "or" ||
          peek().text == "not" || peek().text == "when" ||
          peek().text == "forall") {
        fail("effect negation applies to literals only", at);
      }
      Literal lit = atom();
      lit.negated = true;
      expect_rparen();
      return Effect::make_literal(std::move(lit));
    }
    if (head.text == "when") {
      next();
      Condition cond = condition();
      Effect body = effect();
      expect_rparen();
      return Effect::make_when(std::move(cond), std::move(body));
    }
    if (head.text == "forall") {
      next();
      TypedVar var = quantified_var();
      Effect body = effect();
      expect_rparen();
      return Effect::make_forall(std::move(var), std::move(body));
    }
    return Effect::make_literal(atom());
  }

  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

// Model outputs arrive either as bare PDDL or wrapped as {"output": "..."}.
std::string unwrap_json_output(std::string_view text) {
  size_t open = text.find('{');
  size_t close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    return std::string(text);
  }
  auto doc = nlohmann::json::parse(text.substr(open, close - open + 1),
                                   nullptr, /*allow_exceptions=*/false);
  if (doc.is_object() && doc.contains("output") &&
      doc["output"].is_string()) {
    return doc["output"].get<std::string>();
  }
  return std::string(text);
}

}  // namespace

Domain parse_domain(std::string_view text) {
  return Parser(text).domain();
}

Problem parse_problem(std::string_view text) {
  return Parser(text).problem();
}

std::vector<ActionSchema> parse_action_block(std::string_view text) {
  std::string unwrapped = unwrap_json_output(text);
  std::vector<ActionSchema> schemas = Parser(unwrapped).action_blocks();
  if (schemas.empty()) {
    throw EmptyOutputError("no (:action ...) block found in output");
  }
  return schemas;
}

std::vector<GroundActionRef> parse_plan(
    const std::vector<std::string>& lines) {
  std::vector<GroundActionRef> plan;
  for (size_t i = 0; i < lines.size(); ++i) {
    const std::string& line = lines[i];
    bool blank = true;
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c)) == 0) {
        blank = false;
        break;
      }
    }
    if (blank) continue;
    std::vector<Token> tokens = lex(line);
    size_t pos = 0;
    auto bad = [&](const std::string& message) {
      throw SyntaxError("plan line " + std::to_string(i + 1) + ": " + message,
                        static_cast<int>(i + 1), tokens[pos].col);
    };
    if (tokens[pos].kind != Token::Kind::LParen) bad("expected '('");
    ++pos;
    if (tokens[pos].kind != Token::Kind::Symbol) bad("expected action name");
    GroundActionRef ref;
    ref.name = tokens[pos++].text;
    while (tokens[pos].kind == Token::Kind::Symbol) {
      ref.args.push_back(tokens[pos++].text);
    }
    if (tokens[pos].kind != Token::Kind::RParen) bad("expected ')'");
    ++pos;
    if (tokens[pos].kind != Token::Kind::End) bad("trailing input");
    plan.push_back(std::move(ref));
  }
  return plan;
}

}  // namespace safel::pddl
