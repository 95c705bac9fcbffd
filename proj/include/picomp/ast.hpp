#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "picomp/ident.hpp"
#include "picomp/type.hpp"

namespace picomp {

// ---------------------------------------------------------------- lambda ---

class LamTerm;
using LamPtr = std::shared_ptr<const LamTerm>;

enum class LamKind { Star, Var, Abs, App, Par };

// Values are exactly Star, Var, Abs. Par is absent in the pure
// functional sub-calculus.
class LamTerm {
 public:
  LamKind kind;
  Ident var;    // Var, Abs (parameter)
  TypePtr ann;  // Abs
  LamPtr a;     // Abs body; App fn; Par left
  LamPtr b;     // App arg; Par right
};

LamPtr l_star();
LamPtr l_var(Ident x);
LamPtr l_abs(Ident param, TypePtr ann, LamPtr body);
LamPtr l_app(LamPtr fn, LamPtr arg);
LamPtr l_par(LamPtr left, LamPtr right);

bool lam_is_value(const LamPtr& t);
int term_size(const LamPtr& t);

// ---------------------------------------------------------- administrative ---

class AdmValue;
class AdmDecl;
class AdmTerm;
using AdmValuePtr = std::shared_ptr<const AdmValue>;
using AdmDeclPtr = std::shared_ptr<const AdmDecl>;
using AdmTermPtr = std::shared_ptr<const AdmTerm>;

enum class Usage { Infinite, One, Zero };

// The paper's down-arrow; defined only on Infinite and One.
Usage decrement(Usage u);
std::string show_usage(Usage u);

struct AdmParam {
  Ident name;
  TypePtr ann;
};

// * or a polyadic abstraction over a declaration.
class AdmValue {
 public:
  bool star;
  std::vector<AdmParam> params;  // non-empty when !star
  AdmDeclPtr body;
};

struct AdmBinding {
  Usage usage;
  Ident name;
  AdmValuePtr value;
};

enum class AdmTermKind { Var, App, Par, Hole };

// Terms carry no binders: declarations keep the whole let-prefix as a
// list and parallel composition joins prefix-free terms. Hole only
// appears in evaluation contexts handed to plug_declaration.
class AdmTerm {
 public:
  AdmTermKind kind;
  Ident var;                      // Var
  std::vector<AdmTermPtr> parts;  // App: parts[0] fn, parts[1..] args
  AdmTermPtr left, right;         // Par
};

class AdmDecl {
 public:
  std::vector<AdmBinding> bindings;
  AdmTermPtr body;
};

AdmValuePtr v_star();
AdmValuePtr v_abs(std::vector<AdmParam> params, AdmDeclPtr body);
AdmTermPtr a_var(Ident x);
AdmTermPtr a_app(std::vector<AdmTermPtr> parts);
AdmTermPtr a_par(AdmTermPtr left, AdmTermPtr right);
AdmTermPtr a_hole();
AdmDeclPtr d_make(std::vector<AdmBinding> bindings, AdmTermPtr body);

int term_size(const AdmDeclPtr& d);
int term_size(const AdmTermPtr& t);

// ------------------------------------------------------------------- pi ---

class PiProc;
using PiPtr = std::shared_ptr<const PiProc>;

struct PiGuard {
  bool replicated;
  Ident channel;  // always equals the restricted name of the enclosing Nu
  std::vector<Ident> params;
  PiPtr body;
};

enum class PiKind { Nu, Out, Par };

// Restrictions form a spine over a parallel tree of outputs, mirroring
// the flat let-prefix of the administrative calculus. The restricted
// name scopes over the guard body and the rest.
class PiProc {
 public:
  PiKind kind;
  Ident name;                   // Nu
  std::optional<PiGuard> guard; // Nu
  PiPtr rest;                   // Nu
  Ident channel;                // Out
  std::vector<Ident> args;      // Out (non-empty)
  PiPtr left, right;            // Par
};

PiPtr p_nu(Ident name, std::optional<PiGuard> guard, PiPtr rest);
PiPtr p_out(Ident channel, std::vector<Ident> args);
PiPtr p_par(PiPtr left, PiPtr right);

int term_size(const PiPtr& p);

// Structural well-formedness of the rigid grammar: guards input on
// their own restriction, Par joins restriction-free processes, outputs
// are polyadic (>= 1 argument).
bool pi_well_formed(const PiPtr& p);

// ------------------------------------------------------------- any term ---

enum class Calculus { Lam, LamPar, Adm, AdmPar, Cps, CpsPar, Pi };

const char* calculus_name(Calculus c);
bool calculus_is_lam(Calculus c);
bool calculus_is_adm(Calculus c);
bool calculus_is_parallel(Calculus c);

// A term of whichever calculus a command or corpus item works on.
struct AnyTerm {
  Calculus calc = Calculus::Lam;
  LamPtr lam;
  AdmDeclPtr adm;
  PiPtr pi;
};

AnyTerm any_of(Calculus c, LamPtr t);
AnyTerm any_of(Calculus c, AdmDeclPtr d);
AnyTerm any_of(PiPtr p);
int term_size(const AnyTerm& t);

// ----------------------------------------------------------------- paths ---

enum class Sel : uint8_t {
  AbsBody,       // lambda: under an abstraction
  AppFn,         // lambda: function position
  AppArg,        // lambda: argument position
  ParLeft,       // both: left of a parallel composition
  ParRight,      // both: right of a parallel composition
  BindingValue,  // adm: into the value of binding `index`
  ValueBody,     // adm: under a polyadic abstraction
  DeclBody,      // adm: the body term of a declaration
  AppPart,       // adm: component `index` of an application (0 = fn)
  GuardBody,     // pi: under an input guard
  NuRest,        // pi: the continuation of a restriction
};

struct PathStep {
  Sel sel;
  int index = 0;
  bool operator==(const PathStep&) const = default;
};

using Path = std::vector<PathStep>;

std::string show_path(const Path& p);

enum class RedexRule { BetaV, BetaVAdm, PiBang, PiOnce };
const char* rule_name(RedexRule r);

// One evaluation-context decomposition E[redex].
//   path             addresses the application / output contracted
//   binding_index    adm: index of the consumed binding in the root prefix
//   definition_site  pi: path of the Nu whose guard is consumed
struct RedexDescriptor {
  Path path;
  RedexRule rule;
  int binding_index = -1;
  Path definition_site;

  bool operator==(const RedexDescriptor&) const = default;
};

}  // namespace picomp
