#include "picomp/translate.hpp"

#include <cassert>
#include <functional>

#include "picomp/kernel.hpp"

namespace picomp {

namespace {

NameSupply supply_for(IdentSet used) {
  NameSupply ns;
  ns.reserve(used);
  return ns;
}

IdentSet ctx_names(const TypingContext& ctx) {
  IdentSet out;
  for (const auto& [x, ty] : ctx.entries()) {
    (void)ty;
    out.insert(x);
  }
  return out;
}

}  // namespace

// ------------------------------------------------ administrative form ---

TypePtr to_admin_type(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Unit:
      return t_chan(t_unit());
    case TypeKind::Behavior:
      return t_behavior();
    case TypeKind::Arrow: {
      if (a->domain.size() != 1)
        throw Diag(Errc::BadArgument, "lambda arrows are unary");
      return t_chan_arrow({to_admin_type(a->domain[0])},
                          to_admin_type(a->codomain));
    }
    default:
      throw Diag(Errc::BadArgument,
                 show_type(a) + " is not a lambda type");
  }
}

TypingContext to_admin_context(const TypingContext& ctx) {
  TypingContext out;
  for (const auto& [x, ty] : ctx.entries()) out.extend(x, to_admin_type(ty));
  return out;
}

namespace {

AdmDeclPtr adm_rec(const LamPtr& m, NameSupply& ns) {
  switch (m->kind) {
    case LamKind::Star: {
      Ident x = ns.fresh("u");
      return d_make({AdmBinding{Usage::Infinite, x, v_star()}}, a_var(x));
    }
    case LamKind::Var:
      return d_make({}, a_var(m->var));
    case LamKind::Abs: {
      // Always a fresh outer name; the paper reuses the bound variable.
      Ident f = ns.fresh("f");
      AdmValuePtr value = v_abs({AdmParam{m->var, to_admin_type(m->ann)}},
                                adm_rec(m->a, ns));
      return d_make({AdmBinding{Usage::Infinite, f, std::move(value)}},
                    a_var(f));
    }
    case LamKind::App:
      return apply_declarations(adm_rec(m->a, ns), {adm_rec(m->b, ns)});
    case LamKind::Par:
      return par_declarations(adm_rec(m->a, ns), adm_rec(m->b, ns));
  }
  throw Diag(Errc::BadArgument, "malformed term");
}

}  // namespace

AdmDeclPtr to_admin(const LamPtr& m) {
  NameSupply ns = supply_for(all_idents(m));
  return adm_rec(m, ns);
}

// ------------------------------------------------------------ readback ---

TypePtr readback_type(const TypePtr& a) {
  switch (a->kind) {
    case TypeKind::Behavior:
      return a;
    case TypeKind::Chan: {
      if (a->payload->kind == TypeKind::Unit) return t_unit();
      TypePtr out = readback_type(a->payload->codomain);
      const auto& doms = a->payload->domain;
      for (auto it = doms.rbegin(); it != doms.rend(); ++it)
        out = t_arrow({readback_type(*it)}, out);
      return out;
    }
    default:
      throw Diag(Errc::BadArgument,
                 show_type(a) + " is not an administrative type");
  }
}

TypingContext readback_context(const TypingContext& ctx) {
  TypingContext out;
  for (const auto& [x, ty] : ctx.entries()) out.extend(x, readback_type(ty));
  return out;
}

namespace {

void require_all_infinite(const AdmDeclPtr& d) {
  for (const auto& b : d->bindings) {
    if (b.usage != Usage::Infinite)
      throw Diag(Errc::UsageNotInfinite,
                 "readback is defined on inf usages only; " + show(b.name) +
                     " has usage " + show_usage(b.usage));
    if (!b.value->star) require_all_infinite(b.value->body);
  }
}

LamPtr rb_decl(const AdmDeclPtr& d, const FaultInjection* faults);

LamPtr rb_value(const AdmValuePtr& v, const FaultInjection* faults) {
  if (v->star) return l_star();
  LamPtr body = rb_decl(v->body, faults);
  for (auto it = v->params.rbegin(); it != v->params.rend(); ++it)
    body = l_abs(it->name, readback_type(it->ann), std::move(body));
  return body;
}

LamPtr rb_term(const AdmTermPtr& t, const FaultInjection* faults) {
  switch (t->kind) {
    case AdmTermKind::Var:
      return l_var(t->var);
    case AdmTermKind::App: {
      LamPtr out = rb_term(t->parts[0], faults);
      for (size_t i = 1; i < t->parts.size(); ++i)
        out = l_app(std::move(out), rb_term(t->parts[i], faults));
      return out;
    }
    case AdmTermKind::Par:
      return l_par(rb_term(t->left, faults), rb_term(t->right, faults));
    case AdmTermKind::Hole:
      throw Diag(Errc::BadArgument, "hole in a readback argument");
  }
  throw Diag(Errc::BadArgument, "malformed term");
}

LamPtr rb_decl(const AdmDeclPtr& d, const FaultInjection* faults) {
  LamPtr out = rb_term(d->body, faults);
  if (faults && faults->swap_readback_substitution) {
    // Injected fault: outermost substitution applied first, so names a
    // later value mentions never get replaced.
    for (const auto& b : d->bindings)
      out = substitute(out, {{b.name, rb_value(b.value, faults)}});
    return out;
  }
  for (auto it = d->bindings.rbegin(); it != d->bindings.rend(); ++it)
    out = substitute(out, {{it->name, rb_value(it->value, faults)}});
  return out;
}

}  // namespace

LamPtr readback(const AdmDeclPtr& d, const FaultInjection* faults) {
  require_all_infinite(d);
  return rb_decl(d, faults);
}

// ----------------------------------------------------------------- cps ---

namespace {

bool cps_source_concurrent(Calculus which) {
  switch (which) {
    case Calculus::Adm:
      return false;
    case Calculus::AdmPar:
      return true;
    default:
      throw Diag(Errc::BadArgument,
                 "the CPS translation starts from adm or adm-par");
  }
}

}  // namespace

TypePtr cps_type(const TypePtr& a, Calculus which) {
  bool conc = cps_source_concurrent(which);
  TypePtr result = conc ? t_behavior() : t_result();
  switch (a->kind) {
    case TypeKind::Behavior:
      if (!conc)
        throw Diag(Errc::BadArgument, "behavior type in the functional case");
      return a;
    case TypeKind::Chan: {
      if (a->payload->kind == TypeKind::Unit) return a;
      std::vector<TypePtr> doms;
      for (const auto& dom : a->payload->domain)
        doms.push_back(cps_type(dom, which));
      doms.push_back(cont_type(a->payload->codomain, which));
      return t_chan_arrow(std::move(doms), result);
    }
    default:
      throw Diag(Errc::BadArgument,
                 show_type(a) + " is not an administrative type");
  }
}

TypePtr cont_type(const TypePtr& a, Calculus which) {
  bool conc = cps_source_concurrent(which);
  if (a->kind == TypeKind::Behavior) {
    if (!conc)
      throw Diag(Errc::BadArgument, "behavior type in the functional case");
    return t_chan(t_unit());  // K(b) is conventionally the unit channel
  }
  return t_chan_arrow({cps_type(a, which)}, conc ? t_behavior() : t_result());
}

TypingContext cps_context(const TypingContext& ctx, Calculus which) {
  TypingContext out;
  for (const auto& [x, ty] : ctx.entries()) out.extend(x, cps_type(ty, which));
  return out;
}

namespace {

struct CpsState {
  Calculus src;
  NameSupply ns;
  const FaultInjection* faults;

  Usage cont_usage() const {
    // Table 12 requires a non-zero usage; the functional fragment has
    // no usages, which our representation writes as inf.
    return src == Calculus::AdmPar ? Usage::One : Usage::Infinite;
  }

  TypePtr body_type_or_default(const TypingContext& ctx, const AdmDeclPtr& b,
                               const std::vector<AdmParam>& params) {
    try {
      TypingContext inner = ctx;
      for (const auto& p : params) inner.set(p.name, p.ann);
      return infer_type(inner, b, src);
    } catch (const Diag&) {
      return src == Calculus::AdmPar ? t_behavior() : t_result();
    }
  }

  TypePtr term_type_or_unit(const TypingContext& ctx, const AdmTermPtr& t) {
    try {
      return infer_term_type(ctx, t, src);
    } catch (const Diag&) {
      return t_chan(t_unit());
    }
  }

  AdmValuePtr value(const TypingContext& ctx, const AdmValuePtr& v) {
    if (v->star) return v;
    TypePtr body_ty = body_type_or_default(ctx, v->body, v->params);
    Ident k = ns.fresh("k");
    std::vector<AdmParam> params;
    params.reserve(v->params.size() + 1);
    for (const auto& p : v->params)
      params.push_back(AdmParam{p.name, cps_type(p.ann, src)});
    params.push_back(AdmParam{k, cont_type(body_ty, src)});
    TypingContext inner = ctx;
    for (const auto& p : v->params) inner.set(p.name, p.ann);
    return v_abs(std::move(params), decl(inner, v->body, k));
  }

  AdmDeclPtr term(const TypingContext& ctx, const AdmTermPtr& t,
                  const Ident& k) {
    switch (t->kind) {
      case AdmTermKind::Var:
        if (faults && faults->drop_cps_administrative_step)
          return d_make({}, a_var(t->var));
        return d_make({}, a_app({a_var(k), a_var(t->var)}));
      case AdmTermKind::App: {
        size_t split = t->parts.size();
        for (size_t i = 0; i < t->parts.size(); ++i) {
          if (t->parts[i]->kind != AdmTermKind::Var) {
            split = i;
            break;
          }
        }
        if (split == t->parts.size()) {
          auto parts = t->parts;
          parts.push_back(a_var(k));
          return d_make({}, a_app(std::move(parts)));
        }
        // @(x*, N, M*) : k with N the first non-variable component:
        //   let k' = \y. @(x*, y, M*) : k in N : k'
        AdmTermPtr nested = t->parts[split];
        TypePtr nested_ty = term_type_or_unit(ctx, nested);
        Ident y = ns.fresh("y");
        Ident kp = ns.fresh("k");
        auto rest_parts = t->parts;
        rest_parts[split] = a_var(y);
        TypingContext with_y = ctx;
        with_y.set(y, nested_ty);
        AdmDeclPtr outer = term(with_y, a_app(std::move(rest_parts)), k);
        AdmValuePtr kval =
            v_abs({AdmParam{y, cps_type(nested_ty, src)}}, std::move(outer));
        AdmDeclPtr tail = term(ctx, nested, kp);
        std::vector<AdmBinding> bindings;
        bindings.push_back(AdmBinding{cont_usage(), kp, std::move(kval)});
        for (const auto& b : tail->bindings) bindings.push_back(b);
        return d_make(std::move(bindings), tail->body);
      }
      case AdmTermKind::Par: {
        AdmDeclPtr l = term(ctx, t->left, k);
        AdmDeclPtr r = term(ctx, t->right, k);
        std::vector<AdmBinding> bindings = l->bindings;
        for (const auto& b : r->bindings) bindings.push_back(b);
        return d_make(std::move(bindings), a_par(l->body, r->body));
      }
      case AdmTermKind::Hole:
        throw Diag(Errc::BadArgument, "hole in a CPS argument");
    }
    throw Diag(Errc::BadArgument, "malformed term");
  }

  AdmDeclPtr decl(const TypingContext& ctx0, const AdmDeclPtr& d,
                  const Ident& k) {
    TypingContext ctx = ctx0;
    std::vector<AdmBinding> bindings;
    bindings.reserve(d->bindings.size());
    for (const auto& b : d->bindings) {
      AdmValuePtr v = value(ctx, b.value);
      TypePtr ty = binding_channel_type(ctx, b, src);
      ctx.set(b.name, ty);
      bindings.push_back(AdmBinding{b.usage, b.name, std::move(v)});
    }
    AdmDeclPtr tail = term(ctx, d->body, k);
    for (const auto& b : tail->bindings) bindings.push_back(b);
    return d_make(std::move(bindings), tail->body);
  }
};

}  // namespace

AdmValuePtr cps_value(const TypingContext& ctx, const AdmValuePtr& v,
                      Calculus which, const FaultInjection* faults) {
  IdentSet used = ctx_names(ctx);
  if (!v->star) {
    IdentSet inner = all_idents(v->body);
    used.insert(inner.begin(), inner.end());
    for (const auto& p : v->params) used.insert(p.name);
  }
  CpsState st{which, supply_for(used), faults};
  return st.value(ctx, v);
}

AdmDeclPtr cps_transform(const TypingContext& ctx, const AdmDeclPtr& d,
                         const Ident& k, Calculus which,
                         const FaultInjection* faults) {
  cps_source_concurrent(which);  // validates `which`
  IdentSet used = all_idents(d);
  IdentSet cn = ctx_names(ctx);
  used.insert(cn.begin(), cn.end());
  used.insert(k);
  CpsState st{which, supply_for(used), faults};
  return st.decl(ctx, d, k);
}

// ------------------------------------------------------------ pi bridge ---

TypePtr pi_type_of(const TypePtr& a) {
  if (!type_well_formed(a, Calculus::Pi))
    throw Diag(Errc::BadArgument, show_type(a) + " is not a pi channel type");
  return a;
}

TypingContext pi_context(const TypingContext& ctx) {
  TypingContext out;
  for (const auto& [x, ty] : ctx.entries()) out.extend(x, pi_type_of(ty));
  return out;
}

namespace {

PiPtr pi_of_term(const AdmTermPtr& t) {
  switch (t->kind) {
    case AdmTermKind::App: {
      std::vector<Ident> args;
      for (size_t i = 1; i < t->parts.size(); ++i)
        args.push_back(t->parts[i]->var);
      return p_out(t->parts[0]->var, std::move(args));
    }
    case AdmTermKind::Par:
      return p_par(pi_of_term(t->left), pi_of_term(t->right));
    default:
      throw Diag(Errc::NotCpsShape, "bare variable at term position");
  }
}

PiPtr pi_of_decl(const AdmDeclPtr& d) {
  PiPtr out = pi_of_term(d->body);
  for (auto it = d->bindings.rbegin(); it != d->bindings.rend(); ++it) {
    const AdmBinding& b = *it;
    if (b.value->star) {
      if (b.usage != Usage::Infinite)
        throw Diag(Errc::NotCpsShape, "a * binding requires usage inf");
      out = p_nu(b.name, std::nullopt, std::move(out));
      continue;
    }
    if (b.usage == Usage::Zero) {
      out = p_nu(b.name, std::nullopt, std::move(out));
      continue;
    }
    std::vector<Ident> params;
    for (const auto& p : b.value->params) params.push_back(p.name);
    out = p_nu(b.name,
               PiGuard{b.usage == Usage::Infinite, b.name, std::move(params),
                       pi_of_decl(b.value->body)},
               std::move(out));
  }
  return out;
}

}  // namespace

PiPtr to_pi(const AdmDeclPtr& d) {
  if (!cps_shape(d, true))
    throw Diag(Errc::NotCpsShape,
               "the pi correspondence is defined on the CPS fragment");
  return pi_of_decl(d);
}

AdmValuePtr usage_zero_placeholder(const TypePtr& channel_type) {
  if (channel_type->kind != TypeKind::Chan ||
      channel_type->payload->kind != TypeKind::Arrow)
    throw Diag(Errc::BadArgument,
               "usage-0 placeholders exist at arrow channel types only");
  const auto& doms = channel_type->payload->domain;
  std::vector<AdmParam> params;
  std::vector<AdmTermPtr> parts;
  for (size_t i = 0; i < doms.size(); ++i)
    params.push_back(AdmParam{Ident{"w", static_cast<uint32_t>(i + 1)},
                              doms[i]});
  // Re-emit the parameters as a call: syntactically a CPS term, never
  // typed (the usage-0 rule ignores the value).
  parts.push_back(a_var(params[0].name));
  for (const auto& p : params) parts.push_back(a_var(p.name));
  return v_abs(std::move(params), d_make({}, a_app(std::move(parts))));
}

namespace {

AdmTermPtr term_of_pi(const PiPtr& p) {
  switch (p->kind) {
    case PiKind::Out: {
      std::vector<AdmTermPtr> parts;
      parts.push_back(a_var(p->channel));
      for (const auto& a : p->args) parts.push_back(a_var(a));
      return a_app(std::move(parts));
    }
    case PiKind::Par:
      return a_par(term_of_pi(p->left), term_of_pi(p->right));
    case PiKind::Nu:
      throw Diag(Errc::BadArgument, "restriction under a parallel tree");
  }
  throw Diag(Errc::BadArgument, "malformed process");
}

AdmDeclPtr decl_of_pi(const PiPtr& p, const PiTypeInfo& info) {
  if (p->kind != PiKind::Nu) return d_make({}, term_of_pi(p));
  std::vector<AdmBinding> bindings;
  const PiProc* cur = p.get();
  PiPtr tail = p;
  while (tail->kind == PiKind::Nu) {
    cur = tail.get();
    if (cur->guard) {
      const auto& tys = info.params.at(cur);
      std::vector<AdmParam> params;
      for (size_t i = 0; i < cur->guard->params.size(); ++i)
        params.push_back(AdmParam{cur->guard->params[i], tys[i]});
      AdmValuePtr v =
          v_abs(std::move(params), decl_of_pi(cur->guard->body, info));
      bindings.push_back(
          AdmBinding{cur->guard->replicated ? Usage::Infinite : Usage::One,
                     cur->name, std::move(v)});
    } else {
      TypePtr ty = info.restricted.at(cur);
      if (ty->payload->kind == TypeKind::Unit) {
        bindings.push_back(AdmBinding{Usage::Infinite, cur->name, v_star()});
      } else {
        bindings.push_back(AdmBinding{Usage::Zero, cur->name,
                                      usage_zero_placeholder(ty)});
      }
    }
    tail = tail->rest;
  }
  return d_make(std::move(bindings), term_of_pi(tail));
}

}  // namespace

AdmDeclPtr from_pi(const TypingContext& ctx, const PiPtr& p) {
  PiTypeInfo info;
  try {
    info = check_pi(pi_context(ctx), p);
  } catch (const Diag& d) {
    throw Diag(Errc::UntypablePi, d.what(), d.node);
  }
  return decl_of_pi(p, info);
}

// ----------------------------------------------------------- embedding ---

namespace {

LamPtr embed_rec(const LamPtr& m, const Ident& p) {
  switch (m->kind) {
    case LamKind::Star:
    case LamKind::Var:
      return m;
    case LamKind::Abs:
      return l_abs(m->var, m->ann, embed_rec(m->a, p));
    case LamKind::App:
      return l_app(embed_rec(m->a, p), embed_rec(m->b, p));
    case LamKind::Par:
      return l_app(l_app(l_var(p), embed_rec(m->a, p)), embed_rec(m->b, p));
  }
  throw Diag(Errc::BadArgument, "malformed term");
}

}  // namespace

LamPtr embed_parallel(const LamPtr& m, const Ident& p) {
  if (free_vars(m).count(p))
    throw Diag(Errc::BadArgument,
               show(p) + " must not occur free in the embedded term");
  // A binder spelled like p would capture the inserted occurrences.
  return embed_rec(rename_apart(m, {p}), p);
}

// ---------------------------------------------------------- saturation ---

namespace {

struct Saturator {
  NameSupply ns;

  // Smallest inhabitant of a type, built from unit and abstraction
  // constructors plus ambient variables for Behavior.
  AdmDeclPtr inhabit(const TypingContext& ctx, const TypePtr& ty, int depth) {
    if (depth <= 0)
      throw Diag(Errc::CannotSaturate, "inhabitant search depth exhausted");
    switch (ty->kind) {
      case TypeKind::Chan: {
        if (ty->payload->kind == TypeKind::Unit) {
          Ident u = ns.fresh("u");
          return d_make({AdmBinding{Usage::Infinite, u, v_star()}}, a_var(u));
        }
        Ident f = ns.fresh("f");
        std::vector<AdmParam> params;
        TypingContext inner = ctx;
        for (const auto& dom : ty->payload->domain) {
          Ident z = ns.fresh("z");
          params.push_back(AdmParam{z, dom});
          inner.set(z, dom);
        }
        AdmDeclPtr body = inhabit(inner, ty->payload->codomain, depth - 1);
        return d_make(
            {AdmBinding{Usage::Infinite, f, v_abs(std::move(params), body)}},
            a_var(f));
      }
      case TypeKind::Behavior: {
        // Behavior has no closed inhabitant: call some ambient name
        // whose codomain is Behavior.
        for (const auto& [x, xty] : ctx.entries()) {
          if (xty->kind != TypeKind::Chan ||
              xty->payload->kind != TypeKind::Arrow)
            continue;
          if (xty->payload->codomain->kind != TypeKind::Behavior) continue;
          try {
            std::vector<AdmDeclPtr> args;
            for (const auto& dom : xty->payload->domain)
              args.push_back(inhabit(ctx, dom, depth - 1));
            return apply_declarations(d_make({}, a_var(x)), args);
          } catch (const Diag&) {
            continue;  // try the next candidate
          }
        }
        throw Diag(Errc::CannotSaturate,
                   "no ambient name provides a behavior-typed call");
      }
      default:
        throw Diag(Errc::CannotSaturate,
                   show_type(ty) + " has no canonical inhabitant");
    }
  }

  AdmDeclPtr decl(const TypingContext& ctx0, const AdmDeclPtr& d) {
    TypingContext ctx = ctx0;
    std::vector<AdmBinding> bindings;
    for (const auto& b : d->bindings) {
      TypePtr ty = binding_channel_type(ctx, b, Calculus::AdmPar);
      AdmValuePtr v;
      if (b.usage == Usage::Zero) {
        const auto& arrow = ty->payload;
        std::vector<AdmParam> params;
        TypingContext inner = ctx;
        for (const auto& dom : arrow->domain) {
          Ident y = ns.fresh("y");
          params.push_back(AdmParam{y, dom});
          inner.set(y, dom);
        }
        AdmDeclPtr body = inhabit(inner, arrow->codomain, 8);
        v = v_abs(std::move(params), std::move(body));
      } else if (b.value->star) {
        v = b.value;
      } else {
        TypingContext inner = ctx;
        for (const auto& p : b.value->params) inner.set(p.name, p.ann);
        v = v_abs(b.value->params, decl(inner, b.value->body));
      }
      ctx.set(b.name, ty);
      bindings.push_back(AdmBinding{Usage::Infinite, b.name, std::move(v)});
    }
    return d_make(std::move(bindings), d->body);
  }
};

}  // namespace

AdmDeclPtr saturate_usages(const TypingContext& ctx, const AdmDeclPtr& d) {
  IdentSet used = all_idents(d);
  IdentSet cn = ctx_names(ctx);
  used.insert(cn.begin(), cn.end());
  Saturator st{supply_for(used)};
  return st.decl(ctx, d);
}

}  // namespace picomp
