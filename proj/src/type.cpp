#include "picomp/type.hpp"

#include <cassert>

namespace picomp {

namespace {
TypePtr make(TypeKind k) {
  auto t = std::make_shared<TypeExpr>();
  t->kind = k;
  return t;
}
}  // namespace

TypePtr t_unit() {
  static const TypePtr t = make(TypeKind::Unit);
  return t;
}

TypePtr t_behavior() {
  static const TypePtr t = make(TypeKind::Behavior);
  return t;
}

TypePtr t_result() {
  static const TypePtr t = make(TypeKind::Result);
  return t;
}

TypePtr t_arrow(std::vector<TypePtr> domain, TypePtr codomain) {
  assert(!domain.empty());
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeKind::Arrow;
  t->domain = std::move(domain);
  t->codomain = std::move(codomain);
  return t;
}

TypePtr t_chan(TypePtr payload) {
  assert(payload->kind == TypeKind::Unit || payload->kind == TypeKind::Arrow);
  auto t = std::make_shared<TypeExpr>();
  t->kind = TypeKind::Chan;
  t->payload = std::move(payload);
  return t;
}

TypePtr t_chan_arrow(std::vector<TypePtr> domain, TypePtr codomain) {
  return t_chan(t_arrow(std::move(domain), std::move(codomain)));
}

bool type_equal(const TypePtr& a, const TypePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TypeKind::Unit:
    case TypeKind::Behavior:
    case TypeKind::Result:
      return true;
    case TypeKind::Arrow: {
      if (a->domain.size() != b->domain.size()) return false;
      for (size_t i = 0; i < a->domain.size(); ++i)
        if (!type_equal(a->domain[i], b->domain[i])) return false;
      return type_equal(a->codomain, b->codomain);
    }
    case TypeKind::Chan:
      return type_equal(a->payload, b->payload);
  }
  return false;
}

namespace {

// Arrows are right associative; a left-nested arrow argument needs parens.
void show_rec(const TypePtr& t, std::string& out, bool arrow_left) {
  switch (t->kind) {
    case TypeKind::Unit:
      out += "Unit";
      return;
    case TypeKind::Behavior:
      out += "#b";
      return;
    case TypeKind::Result:
      out += "#R";
      return;
    case TypeKind::Chan:
      out += "Ch[";
      if (t->payload->kind == TypeKind::Unit) {
        out += "Unit";
      } else {
        const auto& a = t->payload;
        for (size_t i = 0; i < a->domain.size(); ++i) {
          if (i) out += ", ";
          show_rec(a->domain[i], out, false);
        }
        out += " -> ";
        show_rec(a->codomain, out, false);
      }
      out += "]";
      return;
    case TypeKind::Arrow: {
      if (arrow_left) out += "(";
      // Unary at the lambda level; polyadic arrows only occur under Ch.
      for (size_t i = 0; i < t->domain.size(); ++i) {
        if (i) out += ", ";
        show_rec(t->domain[i], out, true);
      }
      out += " -> ";
      show_rec(t->codomain, out, false);
      if (arrow_left) out += ")";
      return;
    }
  }
}

}  // namespace

std::string show_type(const TypePtr& t) {
  std::string out;
  show_rec(t, out, false);
  return out;
}

std::string show_type_pi(const TypePtr& t) {
  if (t->kind != TypeKind::Chan) return show_type(t);
  if (t->payload->kind == TypeKind::Unit) return "Ch[Unit]";
  std::string out = "Ch[";
  const auto& a = t->payload;
  for (size_t i = 0; i < a->domain.size(); ++i) {
    if (i) out += ", ";
    out += show_type_pi(a->domain[i]);
  }
  out += "]";
  return out;
}

}  // namespace picomp
