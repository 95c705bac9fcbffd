#pragma once

#include <map>
#include <unordered_map>
#include <vector>

#include "picomp/ast.hpp"
#include "picomp/diag.hpp"

namespace picomp {

// Finite map from variables to value types. Behavior and Result never
// enter a context.
class TypingContext {
 public:
  TypingContext() = default;

  // Throws if x is already bound or the type is not a value type.
  void extend(const Ident& x, TypePtr type);
  // Replaces silently; used by generators when re-seeding.
  void set(const Ident& x, TypePtr type);

  const TypePtr* lookup(const Ident& x) const;
  bool contains(const Ident& x) const { return entries_.count(x) != 0; }
  const std::map<Ident, TypePtr>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<Ident, TypePtr> entries_;
};

std::string show(const TypingContext& ctx);

// Value-type well-formedness per calculus. Behavior and Result are
// never value types; they may appear only where the calculus permits
// (arrow codomains, and for the CPS fragments the codomain is forced).
bool type_well_formed(const TypePtr& t, Calculus calc);

// Monadic type grammar: Ch(1) | Ch(A -> A) with unary arrows all the
// way down (Behavior permitted as a codomain in the parallel case).
bool is_monadic(const TypePtr& t);

// Monadic fragment of a declaration: every annotation monadic and every
// application unary.
bool is_monadic_decl(const AdmDeclPtr& d);

// The CPS-fragment shape: applications have variable heads and variable
// arguments, no bare variable stands as a declaration body, and Par is
// confined to the concurrent calculus.
bool cps_shape(const AdmDeclPtr& d, bool allow_par);

// Type synthesis. Throws Diag on failure.
TypePtr infer_type(const TypingContext& ctx, const LamPtr& t, Calculus calc);
TypePtr infer_type(const TypingContext& ctx, const AdmDeclPtr& d,
                   Calculus calc);

// Typing of the parallel-free embedding target: simply typed lambda
// over base types Unit and Behavior, Behavior usable as an ordinary
// base type.
TypePtr infer_lam_p(const TypingContext& ctx, const LamPtr& t);

// Pi typing carries no type; success returns the reconstructed types of
// restricted names and guard parameters (the surface syntax has no
// annotations, so checking reconstructs them).
struct PiTypeInfo {
  std::unordered_map<const PiProc*, TypePtr> restricted;
  std::unordered_map<const PiProc*, std::vector<TypePtr>> params;
};

PiTypeInfo check_pi(const TypingContext& ctx, const PiPtr& p);

// Dispatcher used by the CLI: returns the synthesized type, or null for
// pi (judgments carry no type).
TypePtr infer_any(const TypingContext& ctx, const AnyTerm& t);

// The declared channel type of a binding, shared between the checker
// and the translations: for a live abstraction the codomain is the
// synthesized body type; for usage 0 the value is not typed and the
// codomain defaults to the calculus result type (Behavior, or Result in
// the functional fragment) unless the body happens to synthesize.
TypePtr binding_channel_type(const TypingContext& ctx, const AdmBinding& b,
                             Calculus calc);

// Type of a term in argument position (used by the CPS translation to
// annotate the continuation parameters it introduces).
TypePtr infer_term_type(const TypingContext& ctx, const AdmTermPtr& t,
                        Calculus calc);

}  // namespace picomp
