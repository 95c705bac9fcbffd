#pragma once

#include <map>
#include <vector>

#include "picomp/ast.hpp"

namespace picomp {

// ------------------------------------------------------------ free names ---

IdentSet free_vars(const LamPtr& t);
IdentSet free_vars(const AdmValuePtr& v);
IdentSet free_vars(const AdmTermPtr& t);
IdentSet free_vars(const AdmDeclPtr& d);
IdentSet free_vars(const PiPtr& p);
IdentSet free_vars(const AnyTerm& t);

// Every identifier occurring anywhere (free, bound, binder, annotation-less).
IdentSet all_idents(const LamPtr& t);
IdentSet all_idents(const AdmDeclPtr& d);
IdentSet all_idents(const PiPtr& p);

// --------------------------------------------------------- substitution ---

// Lambda substitution replaces variables by values (Star/Var/Abs);
// anything else at an occurrence is a sort error. Administrative and pi
// reduction only ever substitute names for names.
LamPtr substitute(const LamPtr& t, const std::map<Ident, LamPtr>& sigma);
AdmTermPtr substitute(const AdmTermPtr& t, const std::map<Ident, Ident>& sigma);
AdmValuePtr substitute(const AdmValuePtr& v, const std::map<Ident, Ident>& sigma);
AdmDeclPtr substitute(const AdmDeclPtr& d, const std::map<Ident, Ident>& sigma);
PiPtr substitute(const PiPtr& p, const std::map<Ident, Ident>& sigma);

// ---------------------------------------------------------- alpha layer ---

bool alpha_equal(const LamPtr& a, const LamPtr& b);
bool alpha_equal(const AdmDeclPtr& a, const AdmDeclPtr& b);
bool alpha_equal(const AdmValuePtr& a, const AdmValuePtr& b);
bool alpha_equal(const PiPtr& a, const PiPtr& b);
bool alpha_equal(const AnyTerm& a, const AnyTerm& b);

// Canonical renaming of bound names (binders become v_1, v_2, ... in
// walk order, skipping free names). alpha_equal(a, b) iff the
// normalized forms are structurally identical.
LamPtr alpha_normalize(const LamPtr& t);

// Barendregt freshening: all binders distinct, and distinct from free
// names plus `extra_taken` (typically the domain of a typing context).
// Reduction and the translations assume this convention.
LamPtr rename_apart(const LamPtr& t, const IdentSet& extra_taken = {});
AdmDeclPtr rename_apart(const AdmDeclPtr& d, const IdentSet& extra_taken = {});
PiPtr rename_apart(const PiPtr& p, const IdentSet& extra_taken = {});

// ------------------------------------------------- structural congruence ---

// One primitive congruence move, recorded so a test can replay the
// rewrite and confirm the canonical form is reachable by (eq1)/(eq2)/
// alpha steps alone. `at` addresses the declaration owning the prefix.
struct CongruenceStep {
  enum Kind { EraseBinding, SwapBindings, AlphaNormalize } kind;
  Path at;
  int index = 0;  // EraseBinding: erased slot; SwapBindings: left slot
};

// Canonical representative of the congruence class: unused bindings
// erased, mutually independent bindings reordered to first use in the
// body (dependencies hoisted just before their first dependent), then
// alpha-normalized. Decides the congruence of Table 2/8/13.
AdmDeclPtr normalize_congruence(const AdmDeclPtr& d,
                                std::vector<CongruenceStep>* trace = nullptr);
PiPtr normalize_congruence(const PiPtr& p,
                           std::vector<CongruenceStep>* trace = nullptr);
AnyTerm normalize_congruence(const AnyTerm& t);

bool congruent(const AdmDeclPtr& a, const AdmDeclPtr& b);
bool congruent(const PiPtr& a, const PiPtr& b);

// Replay support: apply one recorded step (validating its side
// condition) to a declaration.
AdmDeclPtr apply_congruence_step(const AdmDeclPtr& d, const CongruenceStep& s);

// -------------------------------------------------------------- desugar ---

// @(D0, D1, ..., Dn): every let-prefix is lifted outward left to right
// (renamed fresh) and the application is formed over the stripped
// bodies.
AdmDeclPtr apply_declarations(const AdmDeclPtr& fn,
                              const std::vector<AdmDeclPtr>& args);

// D1 | D2 at the declaration level: both prefixes lifted, the bodies
// composed in parallel.
AdmDeclPtr par_declarations(const AdmDeclPtr& left, const AdmDeclPtr& right);

// E[D] where E is a declaration whose body contains exactly one Hole:
// D's bindings are hoisted above E's prefix and D's body fills the
// hole. Fails if E's prefix names occur free in D (the side condition
// on the abbreviation).
AdmDeclPtr plug_declaration(const AdmDeclPtr& context, const AdmDeclPtr& d);

}  // namespace picomp
