#include "picomp/typecheck.hpp"

#include <cassert>
#include <functional>

namespace picomp {

// ---------------------------------------------------------------- context ---

void TypingContext::extend(const Ident& x, TypePtr type) {
  if (type->kind == TypeKind::Behavior || type->kind == TypeKind::Result)
    throw Diag(Errc::BehaviorMisuse,
               "context entry " + show(x) + " cannot have a non-value type");
  auto [it, inserted] = entries_.emplace(x, std::move(type));
  (void)it;
  if (!inserted)
    throw Diag(Errc::BadArgument, show(x) + " is already in the context");
}

void TypingContext::set(const Ident& x, TypePtr type) {
  entries_[x] = std::move(type);
}

const TypePtr* TypingContext::lookup(const Ident& x) const {
  auto it = entries_.find(x);
  return it == entries_.end() ? nullptr : &it->second;
}

// ---------------------------------------------------------- type shapes ---

namespace {

TypePtr result_type_of(Calculus calc) {
  return calc == Calculus::Cps ? t_result() : t_behavior();
}

bool wf_value(const TypePtr& t, Calculus calc);

bool wf_codomain(const TypePtr& t, Calculus calc) {
  switch (calc) {
    case Calculus::Lam:
    case Calculus::Adm:
      return wf_value(t, calc);
    case Calculus::LamPar:
    case Calculus::AdmPar:
      return t->kind == TypeKind::Behavior || wf_value(t, calc);
    case Calculus::Cps:
      return t->kind == TypeKind::Result;
    case Calculus::CpsPar:
    case Calculus::Pi:
      return t->kind == TypeKind::Behavior;
  }
  return false;
}

bool wf_value(const TypePtr& t, Calculus calc) {
  switch (calc) {
    case Calculus::Lam:
    case Calculus::LamPar:
      if (t->kind == TypeKind::Unit) return true;
      if (t->kind != TypeKind::Arrow || t->domain.size() != 1) return false;
      return wf_value(t->domain[0], calc) && wf_codomain(t->codomain, calc);
    case Calculus::Adm:
    case Calculus::AdmPar:
    case Calculus::Cps:
    case Calculus::CpsPar:
    case Calculus::Pi: {
      if (t->kind != TypeKind::Chan) return false;
      if (t->payload->kind == TypeKind::Unit) return true;
      if (t->payload->kind != TypeKind::Arrow) return false;
      for (const auto& d : t->payload->domain)
        if (!wf_value(d, calc)) return false;
      return wf_codomain(t->payload->codomain, calc);
    }
  }
  return false;
}

}  // namespace

bool type_well_formed(const TypePtr& t, Calculus calc) {
  return wf_value(t, calc);
}

bool is_monadic(const TypePtr& t) {
  if (t->kind == TypeKind::Behavior) return true;
  if (t->kind != TypeKind::Chan) return false;
  if (t->payload->kind == TypeKind::Unit) return true;
  const auto& a = t->payload;
  if (a->domain.size() != 1) return false;
  return is_monadic(a->domain[0]) && is_monadic(a->codomain);
}

namespace {

bool monadic_decl_rec(const AdmDeclPtr& d);

bool monadic_value(const AdmValuePtr& v) {
  if (v->star) return true;
  if (v->params.size() != 1) return false;
  for (const auto& p : v->params)
    if (!is_monadic(p.ann)) return false;
  return monadic_decl_rec(v->body);
}

bool monadic_term(const AdmTermPtr& t) {
  switch (t->kind) {
    case AdmTermKind::Var:
    case AdmTermKind::Hole:
      return true;
    case AdmTermKind::App:
      if (t->parts.size() != 2) return false;
      return monadic_term(t->parts[0]) && monadic_term(t->parts[1]);
    case AdmTermKind::Par:
      return monadic_term(t->left) && monadic_term(t->right);
  }
  return false;
}

bool monadic_decl_rec(const AdmDeclPtr& d) {
  for (const auto& b : d->bindings)
    if (!monadic_value(b.value)) return false;
  return monadic_term(d->body);
}

}  // namespace

bool is_monadic_decl(const AdmDeclPtr& d) { return monadic_decl_rec(d); }

namespace {

bool cps_term(const AdmTermPtr& t, bool allow_par) {
  switch (t->kind) {
    case AdmTermKind::Var:
    case AdmTermKind::Hole:
      return false;  // no bare variable stands at term position
    case AdmTermKind::App: {
      for (const auto& p : t->parts)
        if (p->kind != AdmTermKind::Var) return false;
      return true;
    }
    case AdmTermKind::Par:
      return allow_par && cps_term(t->left, allow_par) &&
             cps_term(t->right, allow_par);
  }
  return false;
}

bool cps_decl(const AdmDeclPtr& d, bool allow_par) {
  for (const auto& b : d->bindings)
    if (!b.value->star && !cps_decl(b.value->body, allow_par)) return false;
  return cps_term(d->body, allow_par);
}

}  // namespace

bool cps_shape(const AdmDeclPtr& d, bool allow_par) {
  return cps_decl(d, allow_par);
}

// ---------------------------------------------------------------- lambda ---

namespace {

struct LamChecker {
  Calculus calc;

  TypePtr check(TypingContext& ctx, const LamPtr& t) {
    switch (t->kind) {
      case LamKind::Star:
        return t_unit();
      case LamKind::Var: {
        const TypePtr* ty = ctx.lookup(t->var);
        if (!ty)
          throw Diag(Errc::UnboundVariable, show(t->var) + " is not in scope",
                     t.get());
        return *ty;
      }
      case LamKind::Abs: {
        if (!wf_value(t->ann, calc))
          throw Diag(Errc::BehaviorMisuse,
                     "annotation " + show_type(t->ann) +
                         " is not a value type of this calculus",
                     t.get());
        TypingContext inner = ctx;
        inner.set(t->var, t->ann);  // inner binders shadow
        TypePtr body = check(inner, t->a);
        return t_arrow({t->ann}, body);
      }
      case LamKind::App: {
        TypePtr fn = check(ctx, t->a);
        if (fn->kind != TypeKind::Arrow)
          throw Diag(Errc::TypeMismatch,
                     "applied term has type " + show_type(fn), t.get());
        if (fn->domain.size() != 1)
          throw Diag(Errc::ArityMismatch, "lambda arrows are unary", t.get());
        TypePtr arg = check(ctx, t->b);
        if (!type_equal(arg, fn->domain[0]))
          throw Diag(Errc::TypeMismatch,
                     "argument has type " + show_type(arg) + ", expected " +
                         show_type(fn->domain[0]),
                     t.get());
        return fn->codomain;
      }
      case LamKind::Par: {
        if (calc != Calculus::LamPar)
          throw Diag(Errc::NotInFragment,
                     "parallel composition is not in the functional calculus",
                     t.get());
        TypePtr l = check(ctx, t->a);
        TypePtr r = check(ctx, t->b);
        if (l->kind != TypeKind::Behavior || r->kind != TypeKind::Behavior)
          throw Diag(Errc::TypeMismatch,
                     "parallel components must have the behavior type",
                     t.get());
        return t_behavior();
      }
    }
    throw Diag(Errc::BadArgument, "malformed term");
  }
};

}  // namespace

TypePtr infer_type(const TypingContext& ctx, const LamPtr& t, Calculus calc) {
  if (!calculus_is_lam(calc))
    throw Diag(Errc::BadArgument, "term sort does not match the calculus");
  for (const auto& [x, ty] : ctx.entries())
    if (!wf_value(ty, calc))
      throw Diag(Errc::BehaviorMisuse,
                 "context entry " + show(x) + " : " + show_type(ty) +
                     " is not a value type of this calculus");
  LamChecker checker{calc};
  TypingContext local = ctx;
  return checker.check(local, t);
}

namespace {

// Typing for the embedding target: b is an ordinary base type here.
bool wf_lam_p(const TypePtr& t) {
  switch (t->kind) {
    case TypeKind::Unit:
    case TypeKind::Behavior:
      return true;
    case TypeKind::Arrow:
      if (t->domain.size() != 1) return false;
      return wf_lam_p(t->domain[0]) && wf_lam_p(t->codomain);
    default:
      return false;
  }
}

TypePtr check_lam_p(TypingContext& ctx, const LamPtr& t) {
  switch (t->kind) {
    case LamKind::Star:
      return t_unit();
    case LamKind::Var: {
      const TypePtr* ty = ctx.lookup(t->var);
      if (!ty)
        throw Diag(Errc::UnboundVariable, show(t->var) + " is not in scope",
                   t.get());
      return *ty;
    }
    case LamKind::Abs: {
      if (!wf_lam_p(t->ann))
        throw Diag(Errc::TypeMismatch, "bad annotation in the embedding image",
                   t.get());
      TypingContext inner = ctx;
      inner.set(t->var, t->ann);
      TypePtr body = check_lam_p(inner, t->a);
      return t_arrow({t->ann}, body);
    }
    case LamKind::App: {
      TypePtr fn = check_lam_p(ctx, t->a);
      if (fn->kind != TypeKind::Arrow || fn->domain.size() != 1)
        throw Diag(Errc::TypeMismatch, "applied term is not a function",
                   t.get());
      TypePtr arg = check_lam_p(ctx, t->b);
      if (!type_equal(arg, fn->domain[0]))
        throw Diag(Errc::TypeMismatch, "argument type mismatch", t.get());
      return fn->codomain;
    }
    case LamKind::Par:
      throw Diag(Errc::NotInFragment,
                 "the embedding image contains no parallel composition",
                 t.get());
  }
  throw Diag(Errc::BadArgument, "malformed term");
}

}  // namespace

TypePtr infer_lam_p(const TypingContext& ctx, const LamPtr& t) {
  TypingContext local = ctx;
  return check_lam_p(local, t);
}

// --------------------------------------------------------- administrative ---

namespace {

struct AdmChecker {
  Calculus calc;

  bool functional() const {
    return calc == Calculus::Adm || calc == Calculus::Cps;
  }
  bool cps() const { return calc == Calculus::Cps || calc == Calculus::CpsPar; }

  [[noreturn]] void unbound(const Ident& x, const IdentSet& forbidden,
                            const void* node) {
    if (forbidden.count(x))
      throw Diag(Errc::RecursiveDefinition,
                 show(x) + " is used before its definition is complete "
                           "(definitions must be linearly ordered)",
                 node);
    throw Diag(Errc::UnboundVariable, show(x) + " is not in scope", node);
  }

  TypePtr check_term(const TypingContext& ctx, const AdmTermPtr& t,
                     const IdentSet& forbidden, bool term_position) {
    switch (t->kind) {
      case AdmTermKind::Hole:
        throw Diag(Errc::BadArgument, "hole in a checked term", t.get());
      case AdmTermKind::Var: {
        if (cps() && term_position)
          throw Diag(Errc::NotInFragment,
                     "bare variables are not CPS terms (functions are "
                     "always applied)",
                     t.get());
        const TypePtr* ty = ctx.lookup(t->var);
        if (!ty) unbound(t->var, forbidden, t.get());
        return *ty;
      }
      case AdmTermKind::App: {
        if (cps()) {
          for (const auto& p : t->parts)
            if (p->kind != AdmTermKind::Var)
              throw Diag(Errc::NotInFragment,
                         "CPS applications take variables only", t.get());
        }
        TypePtr fn = check_term(ctx, t->parts[0], forbidden, false);
        if (fn->kind != TypeKind::Chan || fn->payload->kind != TypeKind::Arrow)
          throw Diag(Errc::TypeMismatch,
                     "applied name has type " + show_type(fn), t.get());
        const auto& arrow = fn->payload;
        size_t nargs = t->parts.size() - 1;
        if (arrow->domain.size() != nargs)
          throw Diag(Errc::ArityMismatch,
                     "expected " + std::to_string(arrow->domain.size()) +
                         " arguments, got " + std::to_string(nargs),
                     t.get());
        for (size_t i = 0; i < nargs; ++i) {
          TypePtr ai = check_term(ctx, t->parts[i + 1], forbidden, false);
          if (!type_equal(ai, arrow->domain[i]))
            throw Diag(Errc::TypeMismatch,
                       "argument " + std::to_string(i + 1) + " has type " +
                           show_type(ai) + ", expected " +
                           show_type(arrow->domain[i]),
                       t->parts[i + 1].get());
        }
        return arrow->codomain;
      }
      case AdmTermKind::Par: {
        if (functional())
          throw Diag(Errc::NotInFragment,
                     "parallel composition is not in the functional calculus",
                     t.get());
        TypePtr l = check_term(ctx, t->left, forbidden, true);
        TypePtr r = check_term(ctx, t->right, forbidden, true);
        if (l->kind != TypeKind::Behavior || r->kind != TypeKind::Behavior)
          throw Diag(Errc::TypeMismatch,
                     "parallel components must have the behavior type",
                     t.get());
        return t_behavior();
      }
    }
    throw Diag(Errc::BadArgument, "malformed term");
  }

  // The declared channel type of one binding; body typing happens here.
  TypePtr channel_type(const TypingContext& ctx, const AdmBinding& b,
                       const IdentSet& forbidden) {
    if (b.value->star) {
      if (b.usage != Usage::Infinite)
        throw Diag(Errc::UsageViolation,
                   "a * binding requires usage inf", b.value.get());
      return t_chan(t_unit());
    }
    if (functional() && b.usage != Usage::Infinite)
      throw Diag(Errc::NotInFragment,
                 "usages other than inf are not in the functional calculus",
                 b.value.get());
    std::vector<TypePtr> domain;
    for (const auto& p : b.value->params) {
      if (!wf_value(p.ann, calc))
        throw Diag(Errc::BehaviorMisuse,
                   "annotation " + show_type(p.ann) +
                       " is not a value type of this calculus",
                   b.value.get());
      domain.push_back(p.ann);
    }
    if (b.usage == Usage::Zero) {
      // (lambda-a-0): the value is not typed at all. The codomain is
      // the fragment's result type unless the body happens to
      // synthesize one.
      TypePtr codo;
      if (cps()) {
        codo = result_type_of(calc);
      } else {
        try {
          TypingContext inner = ctx;
          for (const auto& p : b.value->params) inner.set(p.name, p.ann);
          codo = check_decl(inner, b.value->body, forbidden);
        } catch (const Diag&) {
          codo = t_behavior();
        }
      }
      return t_chan_arrow(std::move(domain), std::move(codo));
    }
    TypingContext inner = ctx;
    for (const auto& p : b.value->params) inner.set(p.name, p.ann);
    TypePtr codo = check_decl(inner, b.value->body, forbidden);
    if (cps() && !type_equal(codo, result_type_of(calc)))
      throw Diag(Errc::NotInFragment,
                 "CPS bodies must have the result type", b.value.get());
    return t_chan_arrow(std::move(domain), std::move(codo));
  }

  TypePtr check_decl(const TypingContext& ctx0, const AdmDeclPtr& d,
                     const IdentSet& forbidden) {
    TypingContext ctx = ctx0;
    const auto& bs = d->bindings;
    for (size_t i = 0; i < bs.size(); ++i) {
      // The binding's own name and every later sibling name is out of
      // scope for this value; referencing one is a recursion error
      // unless an ambient binding supplies it.
      IdentSet fb = forbidden;
      for (size_t j = i; j < bs.size(); ++j)
        if (!ctx.contains(bs[j].name)) fb.insert(bs[j].name);
      TypePtr ty = channel_type(ctx, bs[i], fb);
      ctx.set(bs[i].name, ty);  // later bindings shadow
    }
    TypePtr body = check_term(ctx, d->body, forbidden, true);
    if (cps() && !type_equal(body, result_type_of(calc)))
      throw Diag(Errc::NotInFragment, "CPS declarations have the result type",
                 d->body.get());
    return body;
  }
};

}  // namespace

TypePtr infer_type(const TypingContext& ctx, const AdmDeclPtr& d,
                   Calculus calc) {
  if (!calculus_is_adm(calc))
    throw Diag(Errc::BadArgument, "term sort does not match the calculus");
  for (const auto& [x, ty] : ctx.entries())
    if (!wf_value(ty, calc))
      throw Diag(Errc::BehaviorMisuse,
                 "context entry " + show(x) + " : " + show_type(ty) +
                     " is not a value type of this calculus");
  AdmChecker checker{calc};
  return checker.check_decl(ctx, d, {});
}

TypePtr binding_channel_type(const TypingContext& ctx, const AdmBinding& b,
                             Calculus calc) {
  AdmChecker checker{calc};
  return checker.channel_type(ctx, b, {});
}

TypePtr infer_term_type(const TypingContext& ctx, const AdmTermPtr& t,
                        Calculus calc) {
  AdmChecker checker{calc};
  return checker.check_term(ctx, t, {}, false);
}

// --------------------------------------------------------------------- pi ---

namespace {

// First-order unification over channel shapes; pi binders carry no
// annotations, so checking reconstructs every type.
struct PiUnifier {
  enum Tag { Free, Chan1, ChanN };
  struct Node {
    int rep;
    Tag tag = Free;
    std::vector<int> kids;
  };
  std::vector<Node> nodes;

  int fresh() {
    nodes.push_back(Node{static_cast<int>(nodes.size()), Free, {}});
    return static_cast<int>(nodes.size()) - 1;
  }

  int find(int i) {
    while (nodes[i].rep != i) {
      nodes[i].rep = nodes[nodes[i].rep].rep;
      i = nodes[i].rep;
    }
    return i;
  }

  void unify(int a, int b, const void* site) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (nodes[a].tag == Free) {
      nodes[a].rep = b;
      return;
    }
    if (nodes[b].tag == Free) {
      nodes[b].rep = a;
      return;
    }
    if (nodes[a].tag != nodes[b].tag)
      throw Diag(Errc::TypeMismatch, "channel used at incompatible types",
                 site);
    if (nodes[a].tag == ChanN) {
      if (nodes[a].kids.size() != nodes[b].kids.size())
        throw Diag(Errc::ArityMismatch,
                   "channel used at incompatible arities", site);
      auto ka = nodes[a].kids;
      auto kb = nodes[b].kids;
      nodes[b].rep = a;
      for (size_t i = 0; i < ka.size(); ++i) unify(ka[i], kb[i], site);
    } else {
      nodes[b].rep = a;
    }
  }

  int of_type(const TypePtr& t) {
    if (t->kind != TypeKind::Chan)
      throw Diag(Errc::BadArgument,
                 show_type(t) + " is not a pi channel type");
    if (t->payload->kind == TypeKind::Unit) {
      int n = fresh();
      nodes[n].tag = Chan1;
      return n;
    }
    if (t->payload->kind != TypeKind::Arrow ||
        t->payload->codomain->kind != TypeKind::Behavior)
      throw Diag(Errc::BadArgument,
                 show_type(t) + " is not a pi channel type");
    std::vector<int> kids;
    for (const auto& d : t->payload->domain) kids.push_back(of_type(d));
    int n = fresh();  // fresh() reallocates; never hold a node reference
    nodes[n].tag = ChanN;
    nodes[n].kids = std::move(kids);
    return n;
  }

  int chan_of(const std::vector<int>& kids) {
    int n = fresh();
    nodes[n].tag = ChanN;
    nodes[n].kids = kids;
    return n;
  }

  TypePtr extract(int i, std::vector<int>& seen) {
    i = find(i);
    for (int s : seen)
      if (s == i)
        throw Diag(Errc::TypeMismatch, "cyclic channel type");
    switch (nodes[i].tag) {
      case Free:
      case Chan1:
        // Unconstrained names get the unit channel type.
        return t_chan(t_unit());
      case ChanN: {
        seen.push_back(i);
        std::vector<TypePtr> doms;
        for (int k : nodes[i].kids) doms.push_back(extract(k, seen));
        seen.pop_back();
        return t_chan_arrow(std::move(doms), t_behavior());
      }
    }
    return t_chan(t_unit());
  }
};

void spine_names(const PiPtr& p, IdentSet& out) {
  if (p->kind == PiKind::Nu) {
    out.insert(p->name);
    spine_names(p->rest, out);
  }
}

struct PiChecker {
  PiUnifier uni;
  PiTypeInfo info;
  std::unordered_map<const PiProc*, int> restricted_vars;
  std::unordered_map<const PiProc*, std::vector<int>> param_vars;

  int lookup(const std::map<Ident, int>& env, const Ident& x,
             const IdentSet& forbidden, const void* node) {
    auto it = env.find(x);
    if (it != env.end()) return it->second;
    if (forbidden.count(x))
      throw Diag(Errc::RecursiveDefinition,
                 show(x) + " refers to its own or a later definition", node);
    throw Diag(Errc::UnboundVariable, show(x) + " is not in scope", node);
  }

  void walk(const PiPtr& p, std::map<Ident, int> env, IdentSet forbidden) {
    switch (p->kind) {
      case PiKind::Out: {
        int ch = lookup(env, p->channel, forbidden, p.get());
        std::vector<int> kids;
        for (const auto& a : p->args)
          kids.push_back(lookup(env, a, forbidden, p.get()));
        uni.unify(ch, uni.chan_of(kids), p.get());
        return;
      }
      case PiKind::Par:
        walk(p->left, env, forbidden);
        walk(p->right, env, forbidden);
        return;
      case PiKind::Nu: {
        int x = uni.fresh();
        restricted_vars[p.get()] = x;
        if (p->guard) {
          std::vector<int> params;
          std::map<Ident, int> genv = env;
          for (const auto& y : p->guard->params) {
            int v = uni.fresh();
            params.push_back(v);
            genv[y] = v;
          }
          param_vars[p.get()] = params;
          // The guard body is typed without the restricted name and
          // without names restricted later along the spine.
          IdentSet fb = forbidden;
          fb.insert(p->name);
          spine_names(p->rest, fb);
          genv.erase(p->name);
          walk(p->guard->body, std::move(genv), std::move(fb));
          uni.unify(x, uni.chan_of(params), p.get());
        }
        env[p->name] = x;
        walk(p->rest, std::move(env), std::move(forbidden));
        return;
      }
    }
  }
};

}  // namespace

PiTypeInfo check_pi(const TypingContext& ctx, const PiPtr& p) {
  if (!pi_well_formed(p))
    throw Diag(Errc::NotInFragment,
               "process is outside the rigid pi grammar", p.get());
  PiChecker checker;
  std::map<Ident, int> env;
  for (const auto& [x, ty] : ctx.entries())
    env[x] = checker.uni.of_type(ty);
  checker.walk(p, std::move(env), {});
  for (const auto& [node, var] : checker.restricted_vars) {
    std::vector<int> seen;
    checker.info.restricted[node] = checker.uni.extract(var, seen);
  }
  for (const auto& [node, vars] : checker.param_vars) {
    std::vector<TypePtr> tys;
    for (int v : vars) {
      std::vector<int> seen;
      tys.push_back(checker.uni.extract(v, seen));
    }
    checker.info.params[node] = std::move(tys);
  }
  return checker.info;
}

TypePtr infer_any(const TypingContext& ctx, const AnyTerm& t) {
  if (t.lam) return infer_type(ctx, t.lam, t.calc);
  if (t.adm) return infer_type(ctx, t.adm, t.calc);
  check_pi(ctx, t.pi);
  return nullptr;
}

}  // namespace picomp
