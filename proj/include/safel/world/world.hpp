#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "safel/pddl/ast.hpp"

namespace safel::world {

struct UnknownTypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DuplicateActionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownObjectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnboundVariableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Raised by apply() when the action's precondition does not hold.
struct ContractViolation : std::logic_error {
  using std::logic_error::logic_error;
};

// A ground positive atom. Ordered so states have one canonical encoding.
struct Atom {
  std::string pred;
  std::vector<std::string> args;

  auto operator<=>(const Atom&) const = default;
};

// Set of true ground atoms; everything absent is false (closed world).
struct State {
  std::set<Atom> atoms;

  bool operator==(const State&) const = default;
  bool contains(const Atom& atom) const { return atoms.count(atom) > 0; }
};

// Grounded domain + problem: merged schema list (base actions PRIMITIVE,
// problem-inline actions NEW), typed object universe, and the initial state.
// Immutable after build_world; safe to share across threads.
struct World {
  pddl::Domain domain;            // merged view, including inline extensions
  pddl::Problem problem;          // as parsed (inline sections retained)
  std::vector<std::string> objects;             // declaration order
  std::map<std::string, std::string> object_types;
  std::map<std::string, std::string> type_parents;  // child -> parent
  std::map<std::string, size_t> schema_index;       // name -> domain.actions
  State init;
  pddl::Condition goal;

  const pddl::ActionSchema* find_schema(const std::string& name) const;
  bool has_object(const std::string& name) const;
  // True when `type` equals `ancestor` or descends from it.
  bool type_is_a(const std::string& type, const std::string& ancestor) const;
  // Objects whose type is compatible with `type`, in declaration order.
  std::vector<std::string> objects_of_type(const std::string& type) const;
};

struct GroundAction {
  const pddl::ActionSchema* schema = nullptr;
  std::vector<std::string> binding;  // one object name per parameter
};

struct ApplicabilityReport {
  bool applicable = false;
  // Index of the DNF disjunct with the fewest unmet literals.
  size_t best_disjunct = 0;
  std::vector<pddl::Literal> unmet;  // ground literals failing there
};

enum class TypeCheckStatus { OK, ARITY_MISMATCH, UNKNOWN_OBJECT, TYPE_MISMATCH };

struct TypeCheckResult {
  TypeCheckStatus status = TypeCheckStatus::OK;
  size_t position = 0;  // 1-based argument position for mismatches
  std::string expected_type;
  std::string actual_type;  // or the unknown object name
  size_t expected_arity = 0;
  size_t actual_arity = 0;

  bool ok() const { return status == TypeCheckStatus::OK; }
};

struct BuildOptions {
  bool allow_domain_mismatch = false;
};

World build_world(const pddl::Domain& domain, const pddl::Problem& problem,
                  const BuildOptions& options = {});

// Closed-world membership; same_obj is a builtin equality predicate.
bool holds(const World& world, const State& state, const pddl::Literal& lit);

// Non-throwing counterpart of holds() for search hot loops: ground literals
// naming undeclared objects are false regardless of polarity.
bool literal_true(const World& world, const State& state,
                  const pddl::Literal& lit);

// Precondition of a ground action as DNF disjuncts of ground literals.
std::vector<std::vector<pddl::Literal>> precondition_dnf(
    const World& world, const GroundAction& action);

// The problem goal as DNF disjuncts of ground literals (forall expanded).
std::vector<std::vector<pddl::Literal>> goal_dnf(const World& world);

// True when the effect tree carries a `when` guard anywhere (the only case
// where the effect delta depends on the pre-state).
bool has_conditional_effects(const pddl::ActionSchema& schema);

// Add/delete atom lists the action would produce from `state`. Does not
// check applicability.
struct EffectDelta {
  std::vector<Atom> adds;
  std::vector<Atom> dels;
};
EffectDelta effect_delta(const World& world, const State& state,
                         const GroundAction& action);

ApplicabilityReport check_applicable(const World& world, const State& state,
                                     const GroundAction& action);

// Delete-before-add; `when` guards are evaluated against the pre-state;
// `forall` expands over the typed object universe.
State apply(const World& world, const State& state,
            const GroundAction& action);

struct GoalCheck {
  bool satisfied = false;
  std::vector<pddl::Literal> unmet;  // failing literals of the best disjunct
};

GoalCheck goal_satisfied(const World& world, const State& state,
                         const pddl::Condition& goal);

TypeCheckResult type_check_args(const World& world,
                                const pddl::ActionSchema& schema,
                                const std::vector<std::string>& args);

}  // namespace safel::world
