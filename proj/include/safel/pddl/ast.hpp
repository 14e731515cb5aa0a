#pragma once

#include <string>
#include <vector>

namespace safel::pddl {

// The builtin root of every type hierarchy.
inline constexpr const char* kRootType = "object";

// One predicate application, lifted or ground. Arguments are variable
// names (leading '?') or object/constant names.
struct Literal {
  std::string pred;
  std::vector<std::string> args;
  bool negated = false;

  bool operator==(const Literal&) const = default;
};

// A name/type pair, used for parameters, quantified variables, object
// declarations and predicate arguments. Bare (non-'?') parameter names are
// accepted; untyped entries default to the root type.
struct TypedVar {
  std::string name;
  std::string type = kRootType;

  bool operator==(const TypedVar&) const = default;
};

// Precondition / goal tree. Negation lives on literals only; (not ...) over
// compound formulas is rewritten by the parser (De Morgan).
struct Condition {
  enum class Kind { Literal, And, Or, Forall };

  Kind kind = Kind::And;
  Literal lit;                      // Kind::Literal
  std::vector<Condition> children;  // And / Or; single element for Forall
  TypedVar var;                     // Forall

  bool operator==(const Condition&) const = default;

  static Condition make_literal(Literal l);
  static Condition make_and(std::vector<Condition> cs);
  static Condition make_or(std::vector<Condition> cs);
  static Condition make_forall(TypedVar v, Condition body);
};

// Effect tree: like Condition but with When instead of Or.
struct Effect {
  enum class Kind { Literal, And, When, Forall };

  Kind kind = Kind::And;
  Literal lit;                   // Kind::Literal
  std::vector<Effect> children;  // And; single element for When / Forall
  Condition condition;           // When guard, evaluated on the pre-state
  TypedVar var;                  // Forall

  bool operator==(const Effect&) const = default;

  static Effect make_literal(Literal l);
  static Effect make_and(std::vector<Effect> es);
  static Effect make_when(Condition cond, Effect body);
  static Effect make_forall(TypedVar v, Effect body);
};

enum class ActionClass { PRIMITIVE, NEW };

struct ActionSchema {
  std::string name;
  std::vector<TypedVar> params;
  Condition precondition;  // empty conjunction when omitted
  Effect effect;           // empty conjunction when omitted
  ActionClass action_class = ActionClass::PRIMITIVE;

  bool operator==(const ActionSchema&) const = default;
};

struct TypeDecl {
  std::string name;
  std::string parent = kRootType;

  bool operator==(const TypeDecl&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<TypedVar> params;

  bool operator==(const PredicateDecl&) const = default;
};

struct Domain {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<PredicateDecl> predicates;
  std::vector<ActionSchema> actions;

  bool operator==(const Domain&) const = default;
};

// A grounded task. Scenario problems may carry inline :types/:predicates/
// :action sections (scenario-local extensions over the base domain); explicit
// negative :init literals are retained for round-trip fidelity and are
// semantically redundant under the closed-world reading.
struct Problem {
  std::string name;
  std::string domain_name;
  std::vector<TypedVar> objects;
  std::vector<Literal> init;
  Condition goal;
  std::vector<TypeDecl> inline_types;
  std::vector<PredicateDecl> inline_predicates;
  std::vector<ActionSchema> inline_actions;

  bool operator==(const Problem&) const = default;
};

// An action instance by name, as written in a plan file. Never validated at
// parse time; the executor owns name/arity/type diagnostics.
struct GroundActionRef {
  std::string name;
  std::vector<std::string> args;

  bool operator==(const GroundActionRef&) const = default;
};

inline bool is_variable(const std::string& name) {
  return !name.empty() && name.front() == '?';
}

}  // namespace safel::pddl
