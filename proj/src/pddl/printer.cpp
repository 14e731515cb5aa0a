#include "safel/pddl/printer.hpp"

#include <sstream>

namespace safel::pddl {
namespace {

std::string typed_vars(const std::vector<TypedVar>& vars) {
  std::ostringstream out;
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i > 0) out << ' ';
    out << vars[i].name << " - " << vars[i].type;
  }
  return out.str();
}

void render_action(std::ostringstream& out, const ActionSchema& schema,
                   const std::string& indent) {
  out << indent << "(:action " << schema.name << '\n';
  out << indent << "  :parameters (" << typed_vars(schema.params) << ")\n";
  out << indent << "  :precondition " << render(schema.precondition) << '\n';
  out << indent << "  :effect " << render(schema.effect) << ")\n";
}

}  // namespace

std::string render(const Literal& lit) {
  std::ostringstream out;
  if (lit.negated) out << "(not ";
  out << '(' << lit.pred;
  for (const std::string& arg : lit.args) out << ' ' << arg;
  out << ')';
  if (lit.negated) out << ')';
  return out.str();
}

std::string render(const Condition& cond) {
  std::ostringstream out;
  switch (cond.kind) {
    case Condition::Kind::Literal:
      out << render(cond.lit);
      break;
    case Condition::Kind::And:
    case Condition::Kind::Or:
      out << (cond.kind == Condition::Kind::And ? "(and" : "(or");
      for (const Condition& child : cond.children) {
        out << ' ' << render(child);
      }
      out << ')';
      break;
    case Condition::Kind::Forall:
      out << "(forall (" << cond.var.name << " - " << cond.var.type << ") "
          << render(cond.children.front()) << ')';
      break;
  }
  return out.str();
}

std::string render(const Effect& eff) {
  std::ostringstream out;
  switch (eff.kind) {
    case Effect::Kind::Literal:
      out << render(eff.lit);
      break;
    case Effect::Kind::And:
      out << "(and";
      for (const Effect& child : eff.children) out << ' ' << render(child);
      out << ')';
      break;
    case Effect::Kind::When:
      out << "(when " << render(eff.condition) << ' '
          << render(eff.children.front()) << ')';
      break;
    case Effect::Kind::Forall:
      out << "(forall (" << eff.var.name << " - " << eff.var.type << ") "
          << render(eff.children.front()) << ')';
      break;
  }
  return out.str();
}

std::string render(const ActionSchema& schema) {
  std::ostringstream out;
  render_action(out, schema, "");
  return out.str();
}

std::string render(const Domain& domain) {
  std::ostringstream out;
  out << "(define (domain " << domain.name << ")\n";
  if (!domain.requirements.empty()) {
    out << "  (:requirements";
    for (const std::string& req : domain.requirements) out << ' ' << req;
    out << ")\n";
  }
  if (!domain.types.empty()) {
    out << "  (:types\n";
    for (const TypeDecl& type : domain.types) {
      out << "    " << type.name << " - " << type.parent << '\n';
    }
    out << "  )\n";
  }
  out << "  (:predicates\n";
  for (const PredicateDecl& pred : domain.predicates) {
    out << "    (" << pred.name;
    if (!pred.params.empty()) out << ' ' << typed_vars(pred.params);
    out << ")\n";
  }
  out << "  )\n";
  for (const ActionSchema& schema : domain.actions) {
    render_action(out, schema, "  ");
  }
  out << ")\n";
  return out.str();
}

std::string render(const Problem& problem) {
  std::ostringstream out;
  out << "(define (problem " << problem.name << ")\n";
  out << "  (:domain " << problem.domain_name << ")\n";
  out << "  (:objects\n";
  for (const TypedVar& obj : problem.objects) {
    out << "    " << obj.name << " - " << obj.type << '\n';
  }
  out << "  )\n";
  if (!problem.inline_types.empty()) {
    out << "  (:types\n";
    for (const TypeDecl& type : problem.inline_types) {
      out << "    " << type.name << " - " << type.parent << '\n';
    }
    out << "  )\n";
  }
  if (!problem.inline_predicates.empty()) {
    out << "  (:predicates\n";
    for (const PredicateDecl& pred : problem.inline_predicates) {
      out << "    (" << pred.name;
      if (!pred.params.empty()) out << ' ' << typed_vars(pred.params);
      out << ")\n";
    }
    out << "  )\n";
  }
  out << "  (:init\n";
  for (const Literal& lit : problem.init) {
    out << "    " << render(lit) << '\n';
  }
  out << "  )\n";
  out << "  (:goal " << render(problem.goal) << ")\n";
  for (const ActionSchema& schema : problem.inline_actions) {
    render_action(out, schema, "  ");
  }
  out << ")\n";
  return out.str();
}

std::string render(const GroundActionRef& ref) {
  std::ostringstream out;
  out << '(' << ref.name;
  for (const std::string& arg : ref.args) out << ' ' << arg;
  out << ')';
  return out.str();
}

}  // namespace safel::pddl
