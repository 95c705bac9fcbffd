#include "picomp/ast.hpp"

#include <cassert>

#include "picomp/diag.hpp"

namespace picomp {

LamPtr l_star() {
  static const LamPtr t = [] {
    auto n = std::make_shared<LamTerm>();
    n->kind = LamKind::Star;
    return n;
  }();
  return t;
}

LamPtr l_var(Ident x) {
  auto n = std::make_shared<LamTerm>();
  n->kind = LamKind::Var;
  n->var = std::move(x);
  return n;
}

LamPtr l_abs(Ident param, TypePtr ann, LamPtr body) {
  auto n = std::make_shared<LamTerm>();
  n->kind = LamKind::Abs;
  n->var = std::move(param);
  n->ann = std::move(ann);
  n->a = std::move(body);
  return n;
}

LamPtr l_app(LamPtr fn, LamPtr arg) {
  auto n = std::make_shared<LamTerm>();
  n->kind = LamKind::App;
  n->a = std::move(fn);
  n->b = std::move(arg);
  return n;
}

LamPtr l_par(LamPtr left, LamPtr right) {
  auto n = std::make_shared<LamTerm>();
  n->kind = LamKind::Par;
  n->a = std::move(left);
  n->b = std::move(right);
  return n;
}

bool lam_is_value(const LamPtr& t) {
  return t->kind == LamKind::Star || t->kind == LamKind::Var ||
         t->kind == LamKind::Abs;
}

int term_size(const LamPtr& t) {
  switch (t->kind) {
    case LamKind::Star:
    case LamKind::Var:
      return 1;
    case LamKind::Abs:
      return 1 + term_size(t->a);
    case LamKind::App:
    case LamKind::Par:
      return 1 + term_size(t->a) + term_size(t->b);
  }
  return 0;
}

Usage decrement(Usage u) {
  switch (u) {
    case Usage::Infinite:
      return Usage::Infinite;
    case Usage::One:
      return Usage::Zero;
    case Usage::Zero:
      break;
  }
  throw Diag(Errc::UsageViolation, "decrement undefined on usage 0");
}

std::string show_usage(Usage u) {
  switch (u) {
    case Usage::Infinite:
      return "inf";
    case Usage::One:
      return "1";
    case Usage::Zero:
      return "0";
  }
  return "?";
}

AdmValuePtr v_star() {
  static const AdmValuePtr v = [] {
    auto n = std::make_shared<AdmValue>();
    n->star = true;
    return n;
  }();
  return v;
}

AdmValuePtr v_abs(std::vector<AdmParam> params, AdmDeclPtr body) {
  assert(!params.empty());
  auto n = std::make_shared<AdmValue>();
  n->star = false;
  n->params = std::move(params);
  n->body = std::move(body);
  return n;
}

AdmTermPtr a_var(Ident x) {
  auto n = std::make_shared<AdmTerm>();
  n->kind = AdmTermKind::Var;
  n->var = std::move(x);
  return n;
}

AdmTermPtr a_app(std::vector<AdmTermPtr> parts) {
  assert(parts.size() >= 2);
  auto n = std::make_shared<AdmTerm>();
  n->kind = AdmTermKind::App;
  n->parts = std::move(parts);
  return n;
}

AdmTermPtr a_par(AdmTermPtr left, AdmTermPtr right) {
  auto n = std::make_shared<AdmTerm>();
  n->kind = AdmTermKind::Par;
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

AdmTermPtr a_hole() {
  auto n = std::make_shared<AdmTerm>();
  n->kind = AdmTermKind::Hole;
  return n;
}

AdmDeclPtr d_make(std::vector<AdmBinding> bindings, AdmTermPtr body) {
  auto n = std::make_shared<AdmDecl>();
  n->bindings = std::move(bindings);
  n->body = std::move(body);
  return n;
}

int term_size(const AdmTermPtr& t) {
  switch (t->kind) {
    case AdmTermKind::Var:
    case AdmTermKind::Hole:
      return 1;
    case AdmTermKind::App: {
      int s = 1;
      for (const auto& p : t->parts) s += term_size(p);
      return s;
    }
    case AdmTermKind::Par:
      return 1 + term_size(t->left) + term_size(t->right);
  }
  return 0;
}

int term_size(const AdmDeclPtr& d) {
  int s = term_size(d->body);
  for (const auto& b : d->bindings) {
    s += 1;
    if (!b.value->star) s += term_size(b.value->body);
  }
  return s;
}

PiPtr p_nu(Ident name, std::optional<PiGuard> guard, PiPtr rest) {
  auto n = std::make_shared<PiProc>();
  n->kind = PiKind::Nu;
  n->name = std::move(name);
  n->guard = std::move(guard);
  n->rest = std::move(rest);
  return n;
}

PiPtr p_out(Ident channel, std::vector<Ident> args) {
  assert(!args.empty());
  auto n = std::make_shared<PiProc>();
  n->kind = PiKind::Out;
  n->channel = std::move(channel);
  n->args = std::move(args);
  return n;
}

PiPtr p_par(PiPtr left, PiPtr right) {
  auto n = std::make_shared<PiProc>();
  n->kind = PiKind::Par;
  n->left = std::move(left);
  n->right = std::move(right);
  return n;
}

int term_size(const PiPtr& p) {
  switch (p->kind) {
    case PiKind::Out:
      return 1;
    case PiKind::Par:
      return 1 + term_size(p->left) + term_size(p->right);
    case PiKind::Nu: {
      int s = 1 + term_size(p->rest);
      if (p->guard) s += 1 + term_size(p->guard->body);
      return s;
    }
  }
  return 0;
}

namespace {
// Par joins restriction-free processes in the rigid grammar.
bool pi_par_tree(const PiPtr& p) {
  switch (p->kind) {
    case PiKind::Out:
      return true;
    case PiKind::Par:
      return pi_par_tree(p->left) && pi_par_tree(p->right);
    case PiKind::Nu:
      return false;
  }
  return false;
}
}  // namespace

bool pi_well_formed(const PiPtr& p) {
  switch (p->kind) {
    case PiKind::Out:
      return !p->args.empty();
    case PiKind::Par:
      return pi_par_tree(p->left) && pi_par_tree(p->right) &&
             pi_well_formed(p->left) && pi_well_formed(p->right);
    case PiKind::Nu:
      if (p->guard) {
        if (!(p->guard->channel == p->name)) return false;
        if (p->guard->params.empty()) return false;
        if (!pi_well_formed(p->guard->body)) return false;
      }
      return pi_well_formed(p->rest);
  }
  return false;
}

const char* calculus_name(Calculus c) {
  switch (c) {
    case Calculus::Lam:
      return "lam";
    case Calculus::LamPar:
      return "lam-par";
    case Calculus::Adm:
      return "adm";
    case Calculus::AdmPar:
      return "adm-par";
    case Calculus::Cps:
      return "cps";
    case Calculus::CpsPar:
      return "cps-par";
    case Calculus::Pi:
      return "pi";
  }
  return "?";
}

bool calculus_is_lam(Calculus c) {
  return c == Calculus::Lam || c == Calculus::LamPar;
}

bool calculus_is_adm(Calculus c) {
  return c == Calculus::Adm || c == Calculus::AdmPar || c == Calculus::Cps ||
         c == Calculus::CpsPar;
}

bool calculus_is_parallel(Calculus c) {
  return c == Calculus::LamPar || c == Calculus::AdmPar ||
         c == Calculus::CpsPar || c == Calculus::Pi;
}

AnyTerm any_of(Calculus c, LamPtr t) {
  assert(calculus_is_lam(c));
  AnyTerm a;
  a.calc = c;
  a.lam = std::move(t);
  return a;
}

AnyTerm any_of(Calculus c, AdmDeclPtr d) {
  assert(calculus_is_adm(c));
  AnyTerm a;
  a.calc = c;
  a.adm = std::move(d);
  return a;
}

AnyTerm any_of(PiPtr p) {
  AnyTerm a;
  a.calc = Calculus::Pi;
  a.pi = std::move(p);
  return a;
}

int term_size(const AnyTerm& t) {
  if (t.lam) return term_size(t.lam);
  if (t.adm) return term_size(t.adm);
  if (t.pi) return term_size(t.pi);
  return 0;
}

std::string show_path(const Path& p) {
  std::string out;
  for (const auto& s : p) {
    if (!out.empty()) out += ".";
    switch (s.sel) {
      case Sel::AbsBody: out += "abs"; break;
      case Sel::AppFn: out += "fn"; break;
      case Sel::AppArg: out += "arg"; break;
      case Sel::ParLeft: out += "parL"; break;
      case Sel::ParRight: out += "parR"; break;
      case Sel::BindingValue: out += "bind" + std::to_string(s.index); break;
      case Sel::ValueBody: out += "vbody"; break;
      case Sel::DeclBody: out += "body"; break;
      case Sel::AppPart: out += "part" + std::to_string(s.index); break;
      case Sel::GuardBody: out += "guard"; break;
      case Sel::NuRest: out += "rest"; break;
    }
  }
  return out.empty() ? "root" : out;
}

const char* rule_name(RedexRule r) {
  switch (r) {
    case RedexRule::BetaV:
      return "beta-v";
    case RedexRule::BetaVAdm:
      return "beta-v-adm";
    case RedexRule::PiBang:
      return "pi-bang";
    case RedexRule::PiOnce:
      return "pi-once";
  }
  return "?";
}

}  // namespace picomp
