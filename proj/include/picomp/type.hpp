#pragma once

#include <memory>
#include <string>
#include <vector>

namespace picomp {

class TypeExpr;
using TypePtr = std::shared_ptr<const TypeExpr>;

// One unified type language for all calculi:
//   Unit       the base type 1
//   Behavior   the type b of terms running in parallel
//   Result     the opaque result type R of the functional CPS fragment
//   Arrow      polyadic function type A1,...,An -> codomain (n >= 1)
//   Chan       the name type Ch(P) where P is Unit or an Arrow;
//              pi-calculus channel types are Chan(Unit) and
//              Chan(A+ -> Behavior).
// Which shapes are legal in which calculus is a well-formedness
// predicate, not a structural property (see typecheck.hpp).
enum class TypeKind { Unit, Behavior, Result, Arrow, Chan };

class TypeExpr {
 public:
  TypeKind kind;
  std::vector<TypePtr> domain;  // Arrow
  TypePtr codomain;             // Arrow
  TypePtr payload;              // Chan
};

TypePtr t_unit();
TypePtr t_behavior();
TypePtr t_result();
TypePtr t_arrow(std::vector<TypePtr> domain, TypePtr codomain);
TypePtr t_chan(TypePtr payload);

// Ch(A1,...,An -> codo) in one call.
TypePtr t_chan_arrow(std::vector<TypePtr> domain, TypePtr codomain);

bool type_equal(const TypePtr& a, const TypePtr& b);

// Surface spellings: Unit | #b | #R | Ch[...] | A -> B (right assoc).
std::string show_type(const TypePtr& t);
// Pi spelling of a channel type: Ch[Unit] or Ch[A1, ..., An].
std::string show_type_pi(const TypePtr& t);

}  // namespace picomp
