#include "picomp/encodings.hpp"

#include "picomp/kernel.hpp"

namespace picomp {

const char* encoding_name(EncodingName e) {
  switch (e) {
    case EncodingName::OutputPrefix: return "output-prefix";
    case EncodingName::InternalChoice: return "internal-choice";
    case EncodingName::ExternalChoice: return "external-choice";
    case EncodingName::MultiDef: return "multi-def";
    case EncodingName::JoinedDef: return "joined-def";
    case EncodingName::LockUnlock: return "lock-unlock";
    case EncodingName::CcsChannel: return "ccs-channel";
  }
  return "?";
}

EncodingName encoding_of_string(const std::string& s) {
  for (EncodingName e :
       {EncodingName::OutputPrefix, EncodingName::InternalChoice,
        EncodingName::ExternalChoice, EncodingName::MultiDef,
        EncodingName::JoinedDef, EncodingName::LockUnlock,
        EncodingName::CcsChannel})
    if (s == encoding_name(e)) return e;
  throw Diag(Errc::BadArgument, "unknown encoding " + s);
}

namespace {

// Ch(Ch(1) -> b): the pervasive acknowledgment-continuation type.
TypePtr ack_cont_type() {
  return t_chan_arrow({t_chan(t_unit())}, t_behavior());
}

NameSupply supply_avoiding(const EncodingArgs& args,
                           const TypingContext& ctx) {
  IdentSet used;
  for (const auto& n : args.names) used.insert(n);
  for (const auto& d : args.decls) {
    IdentSet s = all_idents(d);
    used.insert(s.begin(), s.end());
  }
  for (const auto& v : args.values) {
    IdentSet s = free_vars(v);
    used.insert(s.begin(), s.end());
  }
  for (const auto& [x, ty] : ctx.entries()) {
    (void)ty;
    used.insert(x);
  }
  NameSupply ns;
  ns.reserve(used);
  return ns;
}

void need(bool cond, const std::string& msg) {
  if (!cond) throw Diag(Errc::ArityMismatch, msg);
}

void check_behavior(const TypingContext& ctx, const AdmDeclPtr& d,
                    const std::string& what) {
  TypePtr ty;
  try {
    ty = infer_type(ctx, d, Calculus::AdmPar);
  } catch (const Diag& diag) {
    throw Diag(Errc::IllTypedArgument, what + ": " + diag.what());
  }
  if (ty->kind != TypeKind::Behavior)
    throw Diag(Errc::IllTypedArgument,
               what + " must have the behavior type, got " + show_type(ty));
}

// let_1 k = \w.D in @(x, y, k)
AdmDeclPtr output_prefix(const EncodingArgs& args, const TypingContext& ctx,
                         NameSupply& ns) {
  need(args.names.size() == 2 && args.decls.size() == 1,
       "output-prefix takes names x, y and one continuation declaration");
  const Ident& x = args.names[0];
  const Ident& y = args.names[1];
  const TypePtr* xty = ctx.lookup(x);
  const TypePtr* yty = ctx.lookup(y);
  if (!xty || !yty)
    throw Diag(Errc::IllTypedArgument, "x and y must be in the context");
  if ((*xty)->kind != TypeKind::Chan ||
      (*xty)->payload->kind != TypeKind::Arrow ||
      (*xty)->payload->domain.size() != 2)
    throw Diag(Errc::IllTypedArgument,
               "x must carry a payload and a continuation");
  const TypePtr& payload = (*xty)->payload->domain[0];
  const TypePtr& cont = (*xty)->payload->domain[1];
  if (!type_equal(payload, *yty))
    throw Diag(Errc::IllTypedArgument, "y does not fit x's payload type");
  if (cont->kind != TypeKind::Chan || cont->payload->kind != TypeKind::Arrow ||
      cont->payload->domain.size() != 1)
    throw Diag(Errc::IllTypedArgument, "x's continuation slot is not unary");
  TypePtr w_ty = cont->payload->domain[0];

  Ident k = ns.fresh("k");
  Ident w = ns.fresh("w");
  TypingContext inner = ctx;
  inner.set(w, w_ty);
  check_behavior(inner, args.decls[0], "the continuation declaration");

  AdmValuePtr kval = v_abs({AdmParam{w, w_ty}}, args.decls[0]);
  return d_make({AdmBinding{Usage::One, k, std::move(kval)}},
                a_app({a_var(x), a_var(y), a_var(k)}));
}

// let x = * in let_1 y = \k.@(k,x) in let_1 k1 = \w.M in
// let_1 k2 = \w.N in (@(y,k1) | @(y,k2))
AdmDeclPtr internal_choice(const AdmDeclPtr& m, const AdmDeclPtr& n,
                           const TypingContext& ctx, NameSupply& ns) {
  check_behavior(ctx, m, "the left branch");
  check_behavior(ctx, n, "the right branch");
  Ident x = ns.fresh("x");
  Ident y = ns.fresh("y");
  Ident k = ns.fresh("k");
  Ident k1 = ns.fresh("k");
  Ident k2 = ns.fresh("k");
  Ident w1 = ns.fresh("w");
  Ident w2 = ns.fresh("w");

  std::vector<AdmBinding> bs;
  bs.push_back(AdmBinding{Usage::Infinite, x, v_star()});
  bs.push_back(AdmBinding{
      Usage::One, y,
      v_abs({AdmParam{k, ack_cont_type()}},
            d_make({}, a_app({a_var(k), a_var(x)})))});
  bs.push_back(AdmBinding{Usage::One, k1,
                          v_abs({AdmParam{w1, t_chan(t_unit())}}, m)});
  bs.push_back(AdmBinding{Usage::One, k2,
                          v_abs({AdmParam{w2, t_chan(t_unit())}}, n)});
  return d_make(std::move(bs),
                a_par(a_app({a_var(y), a_var(k1)}),
                      a_app({a_var(y), a_var(k2)})));
}

// let x = * in
// let_1 y = \z. let km = \w.M in let kn = \w.N in @(@(z, km, kn), x)
// in D
AdmDeclPtr external_choice(const EncodingArgs& args, const TypingContext& ctx,
                           NameSupply& ns) {
  need(args.names.size() == 1 && args.decls.size() == 3,
       "external-choice takes the choice name and declarations M, N, D");
  const Ident& y = args.names[0];
  check_behavior(ctx, args.decls[0], "the left branch");
  check_behavior(ctx, args.decls[1], "the right branch");

  TypePtr kt = ack_cont_type();
  TypePtr bool_ty = t_chan_arrow({kt, kt}, kt);  // projections pick a branch

  Ident x = ns.fresh("x");
  Ident z = ns.fresh("z");
  Ident km = ns.fresh("k");
  Ident kn = ns.fresh("k");
  Ident wm = ns.fresh("w");
  Ident wn = ns.fresh("w");

  AdmDeclPtr guard_body = d_make(
      {AdmBinding{Usage::Infinite, km,
                  v_abs({AdmParam{wm, t_chan(t_unit())}}, args.decls[0])},
       AdmBinding{Usage::Infinite, kn,
                  v_abs({AdmParam{wn, t_chan(t_unit())}}, args.decls[1])}},
      a_app({a_app({a_var(z), a_var(km), a_var(kn)}), a_var(x)}));

  std::vector<AdmBinding> bs;
  bs.push_back(AdmBinding{Usage::Infinite, x, v_star()});
  bs.push_back(AdmBinding{
      Usage::One, y, v_abs({AdmParam{z, bool_ty}}, std::move(guard_body))});

  TypingContext inner = ctx;
  inner.set(y, t_chan_arrow({bool_ty}, t_behavior()));
  check_behavior(inner, args.decls[2], "the continuation declaration");
  AdmDeclPtr tail = args.decls[2];
  for (const auto& b : tail->bindings) bs.push_back(b);
  return d_make(std::move(bs), tail->body);
}

// A unique definition that receives its arguments and internally
// chooses among the branches.
AdmDeclPtr multi_def(const EncodingArgs& args, const TypingContext& ctx,
                     NameSupply& ns) {
  need(args.names.size() == 1 && args.decls.size() == 1 &&
           args.values.size() >= 2,
       "multi-def takes the defined name, branch values and a body");
  const Ident& x = args.names[0];
  const auto& first = args.values[0];
  if (first->star)
    throw Diag(Errc::IllTypedArgument, "branches must be abstractions");
  for (const auto& v : args.values) {
    if (v->star || v->params.size() != first->params.size())
      throw Diag(Errc::ArityMismatch, "branches must share one signature");
    for (size_t i = 0; i < v->params.size(); ++i)
      if (!type_equal(v->params[i].ann, first->params[i].ann))
        throw Diag(Errc::IllTypedArgument,
                   "branches must share one signature");
  }

  std::vector<AdmBinding> bs;
  std::vector<Ident> branch_names;
  TypingContext cur = ctx;
  for (const auto& v : args.values) {
    Ident vi = ns.fresh("d");
    AdmBinding b{Usage::Infinite, vi, v};
    TypePtr ty = binding_channel_type(cur, b, Calculus::AdmPar);
    if (ty->payload->codomain->kind != TypeKind::Behavior)
      throw Diag(Errc::IllTypedArgument,
                 "multi-def branches must return the behavior type");
    cur.set(vi, ty);
    branch_names.push_back(vi);
    bs.push_back(std::move(b));
  }

  std::vector<AdmParam> params;
  TypingContext inner = cur;
  for (const auto& p : first->params) {
    Ident z = ns.fresh("z");
    params.push_back(AdmParam{z, p.ann});
    inner.set(z, p.ann);
  }
  auto branch_call = [&](const Ident& vi) {
    std::vector<AdmTermPtr> parts{a_var(vi)};
    for (const auto& p : params) parts.push_back(a_var(p.name));
    return d_make({}, a_app(std::move(parts)));
  };
  AdmDeclPtr chooser = branch_call(branch_names.back());
  for (size_t i = branch_names.size() - 1; i-- > 0;)
    chooser = internal_choice(branch_call(branch_names[i]), chooser, inner, ns);

  std::vector<TypePtr> doms;
  for (const auto& p : params) doms.push_back(p.ann);
  AdmBinding xb{Usage::Infinite, x,
                v_abs(std::move(params), std::move(chooser))};
  cur.set(x, t_chan_arrow(std::move(doms), t_behavior()));
  bs.push_back(std::move(xb));

  check_behavior(cur, args.decls[0], "the body");
  AdmDeclPtr tail = args.decls[0];
  for (const auto& b : tail->bindings) bs.push_back(b);
  return d_make(std::move(bs), tail->body);
}

// Joined definitions are simulated by ordinary sequential ones.
AdmDeclPtr joined_def(const EncodingArgs& args, const TypingContext& ctx) {
  need(!args.names.empty() && args.names.size() == args.values.size() &&
           args.decls.size() == 1,
       "joined-def takes names, matching values and a body");
  std::vector<AdmBinding> bs;
  TypingContext cur = ctx;
  for (size_t i = 0; i < args.names.size(); ++i) {
    AdmBinding b{Usage::Infinite, args.names[i], args.values[i]};
    TypePtr ty;
    try {
      ty = binding_channel_type(cur, b, Calculus::AdmPar);
    } catch (const Diag& diag) {
      throw Diag(Errc::IllTypedArgument, diag.what());
    }
    cur.set(args.names[i], ty);
    bs.push_back(std::move(b));
  }
  check_behavior(cur, args.decls[0], "the body");
  AdmDeclPtr tail = args.decls[0];
  for (const auto& b : tail->bindings) bs.push_back(b);
  return d_make(std::move(bs), tail->body);
}

// let x = * in let_1 unlock = \w.@(ack,w) join
// let_1 lock = \k.@(k, unlock) in (@(unlock, x) | M)
AdmDeclPtr lock_unlock(const EncodingArgs& args, const TypingContext& ctx,
                       NameSupply& ns) {
  need(args.names.size() == 2 && args.decls.size() == 1,
       "lock-unlock takes the ack name, the lock name and the user body");
  const Ident& ack = args.names[0];
  const Ident& lock = args.names[1];
  const TypePtr* ack_ty = ctx.lookup(ack);
  if (!ack_ty || !type_equal(*ack_ty, ack_cont_type()))
    throw Diag(Errc::IllTypedArgument,
               "ack must be an ambient Ch[Ch[Unit] -> #b] name");

  TypePtr unlock_ty = ack_cont_type();
  TypePtr lock_ty = t_chan_arrow({t_chan_arrow({unlock_ty}, t_behavior())},
                                 t_behavior());

  Ident x = ns.fresh("x");
  Ident unlock = ns.fresh("unlock");
  Ident w = ns.fresh("w");
  Ident k = ns.fresh("k");

  TypingContext inner = ctx;
  inner.set(lock, lock_ty);
  check_behavior(inner, args.decls[0], "the user body");

  std::vector<AdmBinding> bs;
  bs.push_back(AdmBinding{Usage::Infinite, x, v_star()});
  bs.push_back(AdmBinding{
      Usage::One, unlock,
      v_abs({AdmParam{w, t_chan(t_unit())}},
            d_make({}, a_app({a_var(ack), a_var(w)})))});
  bs.push_back(AdmBinding{
      Usage::One, lock,
      v_abs({AdmParam{k, t_chan_arrow({unlock_ty}, t_behavior())}},
            d_make({}, a_app({a_var(k), a_var(unlock)})))});

  AdmDeclPtr token = d_make({}, a_app({a_var(unlock), a_var(x)}));
  AdmDeclPtr body = par_declarations(token, args.decls[0]);
  for (const auto& b : body->bindings) bs.push_back(b);
  return d_make(std::move(bs), body->body);
}

// let x = * in let in' = \k.@(k,x) join let out = \k.@(k,x) in M
AdmDeclPtr ccs_channel(const EncodingArgs& args, const TypingContext& ctx,
                       NameSupply& ns) {
  need(args.names.size() == 2 && args.decls.size() == 1,
       "ccs-channel takes the in and out names and the user body");
  const Ident& in_name = args.names[0];
  const Ident& out_name = args.names[1];

  Ident x = ns.fresh("x");
  Ident k1 = ns.fresh("k");
  Ident k2 = ns.fresh("k");

  TypePtr side_ty = t_chan_arrow({ack_cont_type()}, t_behavior());
  TypingContext inner = ctx;
  inner.set(in_name, side_ty);
  inner.set(out_name, side_ty);
  check_behavior(inner, args.decls[0], "the user body");

  std::vector<AdmBinding> bs;
  bs.push_back(AdmBinding{Usage::Infinite, x, v_star()});
  bs.push_back(AdmBinding{
      Usage::Infinite, in_name,
      v_abs({AdmParam{k1, ack_cont_type()}},
            d_make({}, a_app({a_var(k1), a_var(x)})))});
  bs.push_back(AdmBinding{
      Usage::Infinite, out_name,
      v_abs({AdmParam{k2, ack_cont_type()}},
            d_make({}, a_app({a_var(k2), a_var(x)})))});
  AdmDeclPtr tail = args.decls[0];
  for (const auto& b : tail->bindings) bs.push_back(b);
  return d_make(std::move(bs), tail->body);
}

}  // namespace

AdmDeclPtr expand_encoding(EncodingName which, const EncodingArgs& args,
                           const TypingContext& ctx) {
  NameSupply ns = supply_avoiding(args, ctx);
  switch (which) {
    case EncodingName::OutputPrefix:
      return output_prefix(args, ctx, ns);
    case EncodingName::InternalChoice:
      need(args.decls.size() == 2, "internal-choice takes two declarations");
      return internal_choice(args.decls[0], args.decls[1], ctx, ns);
    case EncodingName::ExternalChoice:
      return external_choice(args, ctx, ns);
    case EncodingName::MultiDef:
      return multi_def(args, ctx, ns);
    case EncodingName::JoinedDef:
      return joined_def(args, ctx);
    case EncodingName::LockUnlock:
      return lock_unlock(args, ctx, ns);
    case EncodingName::CcsChannel:
      return ccs_channel(args, ctx, ns);
  }
  throw Diag(Errc::BadArgument, "unknown encoding");
}

}  // namespace picomp
