#pragma once

#include "picomp/ast.hpp"
#include "picomp/faults.hpp"
#include "picomp/typecheck.hpp"

namespace picomp {

// ------------------------------------------------ administrative form ---

// Value naming: every value is bound by a fresh let with usage inf, the
// image is monadic (all applications unary), declaration-position
// arguments are lifted. Free variables map to themselves.
AdmDeclPtr to_admin(const LamPtr& m);
TypePtr to_admin_type(const TypePtr& a);
TypingContext to_admin_context(const TypingContext& ctx);

// ------------------------------------------------------------ readback ---

// Substitutes each let-bound value for its name; defined only when
// every usage (recursively) is inf. Polyadic applications read back as
// left-nested binary applications.
LamPtr readback(const AdmDeclPtr& d, const FaultInjection* faults = nullptr);
TypePtr readback_type(const TypePtr& a);
TypingContext readback_context(const TypingContext& ctx);

// ----------------------------------------------------------------- cps ---

// The optimized CPS translation D : k. `which` selects the functional
// (Adm -> Cps, result type R, plain continuation binding) or the
// concurrent fragment (AdmPar -> CpsPar, result type b, usage-1
// continuation binding). The context is needed to annotate the
// continuation parameters it introduces.
AdmDeclPtr cps_transform(const TypingContext& ctx, const AdmDeclPtr& d,
                         const Ident& k, Calculus which,
                         const FaultInjection* faults = nullptr);
AdmValuePtr cps_value(const TypingContext& ctx, const AdmValuePtr& v,
                      Calculus which, const FaultInjection* faults = nullptr);
TypePtr cps_type(const TypePtr& a, Calculus which);   // type translation
TypePtr cont_type(const TypePtr& a, Calculus which);  // K(alpha)
TypingContext cps_context(const TypingContext& ctx, Calculus which);

// ------------------------------------------------------------ pi bridge ---

// The syntactic correspondence between the concurrent CPS fragment and
// the rigid pi-calculus. to_pi requires the CPS shape; from_pi requires
// a typable process (the reconstructed typing picks between the * and
// the placeholder reading of a bare restriction).
PiPtr to_pi(const AdmDeclPtr& d);
AdmDeclPtr from_pi(const TypingContext& ctx, const PiPtr& p);

// The placeholder value used for a usage-0 binding of the given channel
// type: a syntactically valid non-* value that is never typed.
AdmValuePtr usage_zero_placeholder(const TypePtr& channel_type);

TypePtr pi_type_of(const TypePtr& a);    // Ch(A+ -> b) and Ch(1) are pi types
TypingContext pi_context(const TypingContext& ctx);

// ----------------------------------------------------------- embedding ---

// Parallel-free image of a parallel term over the distinguished
// variable p : b -> (b -> b); homomorphic except on Par.
LamPtr embed_parallel(const LamPtr& m, const Ident& p);

// ---------------------------------------------------------- saturation ---

// Replaces every usage with inf; usage-0 values are replaced by a
// canonically synthesized inhabitant of the declared payload type.
// Fails with CannotSaturate when a Behavior codomain has no inhabitant
// in scope.
AdmDeclPtr saturate_usages(const TypingContext& ctx, const AdmDeclPtr& d);

}  // namespace picomp
