#include "picomp/harness.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "picomp/kernel.hpp"
#include "picomp/reduce.hpp"
#include "picomp/rng.hpp"
#include "picomp/syntax.hpp"
#include "picomp/translate.hpp"

namespace picomp {

// -------------------------------------------------------------- generator ---

namespace {

struct GenFail {};

struct Gen {
  GenConfig cfg;
  SplitMix64 rng;
  NameSupply ns;
  Ident anchor;  // seeded behavior continuation, when present

  explicit Gen(const GenConfig& cfg) : cfg(cfg), rng(cfg.seed), ns(1000) {}

  bool adm_family() const { return calculus_is_adm(cfg.calculus); }
  bool cps_mode() const {
    return cfg.calculus == Calculus::Cps || cfg.calculus == Calculus::CpsPar ||
           cfg.calculus == Calculus::Pi;
  }
  bool parallel() const {
    return cfg.calculus == Calculus::LamPar ||
           cfg.calculus == Calculus::AdmPar ||
           cfg.calculus == Calculus::CpsPar || cfg.calculus == Calculus::Pi;
  }
  bool mixed() const { return cfg.usage_policy == UsagePolicy::Mixed; }

  TypePtr result_type() const {
    return cfg.calculus == Calculus::Cps ? t_result() : t_behavior();
  }

  // ---- types ----

  TypePtr gen_value_type(int depth) {
    bool lam = calculus_is_lam(cfg.calculus);
    if (depth <= 0 || rng.chance(2, 5))
      return lam ? t_unit() : t_chan(t_unit());
    size_t arity = cps_mode() || !lam
                       ? 1 + rng.below(static_cast<size_t>(cfg.arity_cap))
                       : 1;
    if (lam) arity = 1;
    std::vector<TypePtr> doms;
    for (size_t i = 0; i < arity; ++i)
      doms.push_back(gen_value_type(depth - 1));
    TypePtr codo;
    if (cps_mode())
      codo = result_type();
    else if (parallel() && rng.chance(1, 3))
      codo = t_behavior();
    else
      codo = gen_value_type(depth - 1);
    return lam ? t_arrow(std::move(doms), std::move(codo))
               : t_chan_arrow(std::move(doms), std::move(codo));
  }

  // ---- inhabitation guard ----

  bool can_inhabit(const TypingContext& ctx, const TypePtr& ty, int depth) {
    if (depth <= 0) return false;
    switch (ty->kind) {
      case TypeKind::Unit:
        return true;
      case TypeKind::Chan:
        if (ty->payload->kind == TypeKind::Unit) return true;
        {
          TypingContext inner = ctx;
          for (const auto& dom : ty->payload->domain) {
            Ident z = ns.fresh("z");
            inner.set(z, dom);
          }
          return can_inhabit(inner, ty->payload->codomain, depth - 1);
        }
      case TypeKind::Arrow: {
        TypingContext inner = ctx;
        Ident z = ns.fresh("z");
        inner.set(z, ty->domain[0]);
        return can_inhabit(inner, ty->codomain, depth - 1);
      }
      case TypeKind::Result:
      case TypeKind::Behavior: {
        for (const auto& [x, xty] : ctx.entries()) {
          (void)x;
          TypePtr codo;
          std::vector<TypePtr> doms;
          if (xty->kind == TypeKind::Arrow) {
            codo = xty->codomain;
            doms = xty->domain;
          } else if (xty->kind == TypeKind::Chan &&
                     xty->payload->kind == TypeKind::Arrow) {
            codo = xty->payload->codomain;
            doms = xty->payload->domain;
          } else {
            continue;
          }
          // Peel nested codomains too (call chains).
          for (int peel = 0; peel < 3 && codo; ++peel) {
            if (codo->kind == ty->kind) {
              bool good = true;
              for (const auto& dom : doms)
                if (!can_inhabit(ctx, dom, depth - 1)) good = false;
              if (good) return true;
            }
            if (codo->kind == TypeKind::Arrow) {
              for (const auto& dom : codo->domain) doms.push_back(dom);
              codo = codo->codomain;
            } else if (codo->kind == TypeKind::Chan &&
                       codo->payload->kind == TypeKind::Arrow) {
              for (const auto& dom : codo->payload->domain)
                doms.push_back(dom);
              codo = codo->payload->codomain;
            } else {
              break;
            }
          }
        }
        return false;
      }
    }
    return false;
  }

  // ---- lambda terms ----

  std::vector<Ident> vars_of_type(const TypingContext& ctx,
                                  const TypePtr& ty) {
    std::vector<Ident> out;
    for (const auto& [x, xty] : ctx.entries())
      if (type_equal(xty, ty)) out.push_back(x);
    return out;
  }

  // Call chains: variables whose type peels (through unary lambda
  // arrows or channel arrows) down to `target`.
  struct Chain {
    Ident head;
    std::vector<std::vector<TypePtr>> stages;  // argument types per stage
  };

  std::vector<Chain> chains_to(const TypingContext& ctx, const TypePtr& target,
                               bool lam) {
    std::vector<Chain> out;
    for (const auto& [x, xty] : ctx.entries()) {
      std::vector<std::vector<TypePtr>> stages;
      TypePtr cur = xty;
      for (int peel = 0; peel < 3; ++peel) {
        std::vector<TypePtr> doms;
        TypePtr codo;
        if (lam && cur->kind == TypeKind::Arrow) {
          doms = cur->domain;
          codo = cur->codomain;
        } else if (!lam && cur->kind == TypeKind::Chan &&
                   cur->payload->kind == TypeKind::Arrow) {
          doms = cur->payload->domain;
          codo = cur->payload->codomain;
        } else {
          break;
        }
        stages.push_back(doms);
        if (type_equal(codo, target)) {
          out.push_back(Chain{x, stages});
          break;
        }
        cur = codo;
      }
    }
    return out;
  }

  LamPtr gen_lam(const TypingContext& ctx, const TypePtr& target, int& budget,
                 int depth) {
    budget -= 1;
    if (depth > 40) throw GenFail{};
    bool small = budget <= 1;

    if (target->kind == TypeKind::Behavior) {
      auto cs = chains_to(ctx, target, true);
      if (cs.empty()) throw GenFail{};
      if (!small && budget > 4 && rng.chance(1, 3)) {
        int half = budget / 2;
        LamPtr l = gen_lam(ctx, target, half, depth + 1);
        LamPtr r = gen_lam(ctx, target, budget, depth + 1);
        return l_par(std::move(l), std::move(r));
      }
      if (!small && budget > 4 && rng.chance(1, 2)) {
        // (\x:A. <b-body>) arg
        TypePtr a;
        for (int tries = 0; tries < 4 && !a; ++tries) {
          TypePtr cand = gen_value_type(cfg.type_depth_cap - 1);
          if (can_inhabit(ctx, cand, 5)) a = cand;
        }
        if (a) {
          Ident x = ns.fresh("x");
          TypingContext inner = ctx;
          inner.set(x, a);
          int half = budget / 2;
          LamPtr body = gen_lam(inner, target, half, depth + 1);
          LamPtr arg = gen_lam(ctx, a, budget, depth + 1);
          return l_app(l_abs(x, a, std::move(body)), std::move(arg));
        }
      }
      const Chain& c = cs[rng.below(cs.size())];
      LamPtr out = l_var(c.head);
      for (const auto& stage : c.stages)
        for (const auto& at : stage)
          out = l_app(std::move(out), gen_lam(ctx, at, budget, depth + 1));
      return out;
    }

    auto direct = vars_of_type(ctx, target);
    if (small) {
      if (!direct.empty() && rng.chance(1, 2))
        return l_var(direct[rng.below(direct.size())]);
      if (target->kind == TypeKind::Unit) return l_star();
      // eta-expand down to a base
      Ident x = ns.fresh("x");
      TypingContext inner = ctx;
      inner.set(x, target->domain[0]);
      return l_abs(x, target->domain[0],
                   gen_lam(inner, target->codomain, budget, depth + 1));
    }

    enum { Direct, Intro, Redex, ChainCall };
    std::vector<int> options;
    if (!direct.empty()) options.insert(options.end(), 2, Direct);
    if (target->kind == TypeKind::Unit)
      options.insert(options.end(), 2, Intro);
    if (target->kind == TypeKind::Arrow)
      options.insert(options.end(), 3, Intro);
    if (budget > 4) options.insert(options.end(), 3, Redex);
    auto cs = chains_to(ctx, target, true);
    if (!cs.empty() && budget > 2) options.insert(options.end(), 2, ChainCall);

    switch (options[rng.below(options.size())]) {
      case Direct:
        return l_var(direct[rng.below(direct.size())]);
      case Intro: {
        if (target->kind == TypeKind::Unit) return l_star();
        Ident x = ns.fresh("x");
        TypingContext inner = ctx;
        inner.set(x, target->domain[0]);
        return l_abs(x, target->domain[0],
                     gen_lam(inner, target->codomain, budget, depth + 1));
      }
      case Redex: {
        // (\x:A. body) arg
        TypePtr a;
        for (int tries = 0; tries < 4; ++tries) {
          a = gen_value_type(cfg.type_depth_cap - 1);
          if (can_inhabit(ctx, a, 5)) break;
          a = nullptr;
        }
        if (!a) throw GenFail{};
        Ident x = ns.fresh("x");
        TypingContext inner = ctx;
        inner.set(x, a);
        int half = budget / 2;
        LamPtr body = gen_lam(inner, target, half, depth + 1);
        LamPtr arg = gen_lam(ctx, a, budget, depth + 1);
        return l_app(l_abs(x, a, std::move(body)), std::move(arg));
      }
      default: {
        const Chain& c = cs[rng.below(cs.size())];
        LamPtr out = l_var(c.head);
        for (const auto& stage : c.stages)
          for (const auto& at : stage)
            out = l_app(std::move(out), gen_lam(ctx, at, budget, depth + 1));
        return out;
      }
    }
  }

  // ---- administrative terms ----

  // Finds or creates a variable of the given type; providers are
  // appended to `extras` and entered into `ctx`.
  Ident provide(TypingContext& ctx, std::vector<AdmBinding>& extras,
                const TypePtr& ty, int& budget, int depth) {
    auto direct = vars_of_type(ctx, ty);
    if (!direct.empty() && rng.chance(7, 10))
      return direct[rng.below(direct.size())];
    budget -= 1;
    if (ty->kind != TypeKind::Chan) throw GenFail{};
    if (ty->payload->kind == TypeKind::Unit) {
      Ident u = ns.fresh("u");
      extras.push_back(AdmBinding{Usage::Infinite, u, v_star()});
      ctx.set(u, ty);
      return u;
    }
    if (depth > 12) {
      if (!direct.empty()) return direct[rng.below(direct.size())];
      throw GenFail{};
    }
    Ident f = ns.fresh("f");
    AdmValuePtr v = gen_abs_value(ctx, ty->payload->domain,
                                  ty->payload->codomain, budget, depth + 1);
    Usage u = Usage::Infinite;
    if (mixed() && rng.chance(1, 4)) u = Usage::One;
    extras.push_back(AdmBinding{u, f, std::move(v)});
    ctx.set(f, ty);
    return f;
  }

  AdmValuePtr gen_abs_value(const TypingContext& ctx,
                            const std::vector<TypePtr>& doms,
                            const TypePtr& codo, int& budget, int depth) {
    std::vector<AdmParam> params;
    TypingContext inner = ctx;
    for (const auto& dom : doms) {
      Ident y = ns.fresh("y");
      params.push_back(AdmParam{y, dom});
      inner.set(y, dom);
    }
    if (!can_inhabit(inner, codo, 6)) throw GenFail{};
    AdmDeclPtr body = gen_decl(inner, codo, budget, depth + 1);
    // Parallel CPS terms feed the pi roundtrip, whose reconstruction
    // must be able to anchor every parameter type.
    if (cfg.calculus == Calculus::CpsPar || cfg.calculus == Calculus::Pi)
      body = force_param_use(inner, params, body, budget, depth);
    return v_abs(std::move(params), std::move(body));
  }

  // For the pi roundtrip the reconstruction must be able to anchor
  // every parameter type, so give each unused parameter one use.
  AdmDeclPtr force_param_use(const TypingContext& ctx,
                             const std::vector<AdmParam>& params,
                             const AdmDeclPtr& body, int& budget, int depth) {
    AdmDeclPtr out = body;
    for (const auto& p : params) {
      if (free_vars(out).count(p.name)) continue;
      TypingContext cur = ctx;
      std::vector<AdmBinding> extras;
      AdmTermPtr use;
      if (p.ann->payload->kind == TypeKind::Arrow) {
        std::vector<AdmTermPtr> parts{a_var(p.name)};
        for (const auto& dom : p.ann->payload->domain)
          parts.push_back(
              a_var(provide(cur, extras, dom, budget, depth + 1)));
        use = a_app(std::move(parts));
      } else {
        // A unit channel can only be an argument: send it to the
        // seeded continuation.
        if (anchor.base.empty()) throw GenFail{};
        use = a_app({a_var(anchor), a_var(p.name)});
      }
      std::vector<AdmBinding> bs = out->bindings;
      for (const auto& b : extras) bs.push_back(b);
      out = d_make(std::move(bs), a_par(out->body, std::move(use)));
    }
    return out;
  }

  // Introduce a fresh definition whose codomain is `target` and call
  // it: guarantees a live redex.
  AdmTermPtr intro_call(TypingContext& ctx, std::vector<AdmBinding>& extras,
                        const TypePtr& target, int& budget, int depth) {
    size_t arity = 1 + rng.below(static_cast<size_t>(cfg.arity_cap));
    std::vector<TypePtr> doms;
    for (size_t i = 0; i < arity; ++i) {
      TypePtr cand;
      for (int tries = 0; tries < 4 && !cand; ++tries) {
        TypePtr c = gen_value_type(cfg.type_depth_cap - 1);
        if (can_inhabit(ctx, c, 5)) cand = c;
      }
      if (!cand) throw GenFail{};
      doms.push_back(cand);
    }
    AdmValuePtr v = gen_abs_value(ctx, doms, target, budget, depth + 1);
    Ident f = ns.fresh("f");
    Usage u = Usage::Infinite;
    if (mixed() && rng.chance(1, 3)) u = Usage::One;
    extras.push_back(AdmBinding{u, f, std::move(v)});
    ctx.set(f, t_chan_arrow(doms, target));
    std::vector<AdmTermPtr> parts{a_var(f)};
    for (const auto& at : doms)
      parts.push_back(a_var(provide(ctx, extras, at, budget, depth + 1)));
    return a_app(std::move(parts));
  }

  AdmTermPtr gen_term(TypingContext& ctx, std::vector<AdmBinding>& extras,
                      const TypePtr& target, int& budget, int depth) {
    budget -= 1;
    if (depth > 40) throw GenFail{};
    bool behavior = target->kind == TypeKind::Behavior ||
                    target->kind == TypeKind::Result;

    if (behavior && parallel() && budget > 4 && rng.chance(1, 3)) {
      AdmTermPtr l = gen_term(ctx, extras, target, budget, depth + 1);
      AdmTermPtr r = gen_term(ctx, extras, target, budget, depth + 1);
      return a_par(std::move(l), std::move(r));
    }

    if (budget > 3 && rng.chance(1, 2)) {
      try {
        return intro_call(ctx, extras, target, budget, depth);
      } catch (const GenFail&) {
        // fall through to the other productions
      }
    }

    if (!behavior) {
      auto direct = vars_of_type(ctx, target);
      if (!direct.empty() && (budget <= 1 || rng.chance(1, 2)))
        return a_var(direct[rng.below(direct.size())]);
      if (budget <= 1 || rng.chance(1, 2))
        return a_var(provide(ctx, extras, target, budget, depth + 1));
    }

    auto cs = chains_to(ctx, target, false);
    if (cs.empty()) {
      if (behavior) throw GenFail{};
      return a_var(provide(ctx, extras, target, budget, depth + 1));
    }
    const Chain& c = cs[rng.below(cs.size())];
    // CPS terms are flat: one stage, variable arguments.
    size_t stages = cps_mode() ? 1 : c.stages.size();
    if (cps_mode() && c.stages.size() != 1) {
      if (behavior) throw GenFail{};
      return a_var(provide(ctx, extras, target, budget, depth + 1));
    }
    AdmTermPtr out = a_var(c.head);
    for (size_t s = 0; s < stages; ++s) {
      std::vector<AdmTermPtr> parts{std::move(out)};
      for (const auto& at : c.stages[s]) {
        if (cps_mode() || rng.chance(1, 2))
          parts.push_back(a_var(provide(ctx, extras, at, budget, depth + 1)));
        else
          parts.push_back(gen_term(ctx, extras, at, budget, depth + 1));
      }
      out = a_app(std::move(parts));
    }
    return out;
  }

  AdmDeclPtr gen_decl(const TypingContext& ctx0, const TypePtr& target,
                      int& budget, int depth) {
    if (depth > 40) throw GenFail{};
    TypingContext ctx = ctx0;
    std::vector<AdmBinding> bindings;
    while (budget > 3 && rng.chance(2, 5) && bindings.size() < 5) {
      budget -= 1;
      uint32_t kind = static_cast<uint32_t>(rng.below(10));
      if (kind < 3) {
        Ident u = ns.fresh("u");
        bindings.push_back(AdmBinding{Usage::Infinite, u, v_star()});
        ctx.set(u, t_chan(t_unit()));
      } else if (mixed() && kind < 5) {
        // Dead binding: the placeholder value is never typed.
        size_t arity = 1 + rng.below(static_cast<size_t>(cfg.arity_cap));
        std::vector<TypePtr> doms;
        for (size_t i = 0; i < arity; ++i)
          doms.push_back(gen_value_type(cfg.type_depth_cap - 1));
        TypePtr ty = t_chan_arrow(doms, result_type());
        Ident g = ns.fresh("g");
        bindings.push_back(
            AdmBinding{Usage::Zero, g, usage_zero_placeholder(ty)});
        ctx.set(g, ty);
      } else {
        TypePtr ty;
        for (int tries = 0; tries < 4 && !ty; ++tries) {
          TypePtr cand = gen_value_type(cfg.type_depth_cap);
          if (cand->payload->kind != TypeKind::Arrow) continue;
          TypingContext probe = ctx;
          for (const auto& dom : cand->payload->domain) {
            Ident z = ns.fresh("z");
            probe.set(z, dom);
          }
          if (can_inhabit(probe, cand->payload->codomain, 6)) ty = cand;
        }
        if (!ty) continue;
        Ident f = ns.fresh("f");
        Usage u = Usage::Infinite;
        if (mixed() && rng.chance(1, 3)) u = Usage::One;
        try {
          AdmValuePtr v = gen_abs_value(ctx, ty->payload->domain,
                                        ty->payload->codomain, budget, depth);
          bindings.push_back(AdmBinding{u, f, std::move(v)});
          ctx.set(f, ty);
        } catch (const GenFail&) {
          continue;
        }
      }
    }
    std::vector<AdmBinding> extras;
    AdmTermPtr body = gen_term(ctx, extras, target, budget, depth + 1);
    for (const auto& b : extras) bindings.push_back(b);
    return d_make(std::move(bindings), std::move(body));
  }

  // ---- entry points ----

  GenTerm attempt() {
    TypingContext ctx;
    int budget = cfg.max_size;
    if (calculus_is_lam(cfg.calculus)) {
      if (cfg.max_size > 2) {
        if (cfg.calculus == Calculus::LamPar && rng.chance(4, 5)) {
          anchor = ns.fresh("o");
          ctx.extend(anchor, t_arrow({t_unit()}, t_behavior()));
        }
        size_t extra = rng.below(3);
        for (size_t i = 0; i < extra; ++i)
          ctx.extend(ns.fresh("g"), gen_value_type(cfg.type_depth_cap - 1));
      }
      TypePtr target;
      if (cfg.calculus == Calculus::LamPar && cfg.max_size > 3 &&
          can_inhabit(ctx, t_behavior(), 6) && rng.chance(1, 2))
        target = t_behavior();
      else
        target = cfg.max_size <= 2 ? t_unit()
                                   : gen_value_type(cfg.type_depth_cap - 1);
      if (!can_inhabit(ctx, target, 6)) throw GenFail{};
      LamPtr t = gen_lam(ctx, target, budget, 0);
      GenTerm out{any_of(cfg.calculus, t), ctx, target};
      return out;
    }

    if (cfg.calculus == Calculus::Pi) {
      GenConfig inner = cfg;
      inner.calculus = Calculus::CpsPar;
      Gen g(inner);
      g.rng = rng;  // continue the stream deterministically
      GenTerm base = g.attempt_adm();
      PiPtr p = to_pi(base.term.adm);
      // Mutations: wrap in unused restrictions at the root.
      size_t wraps = rng.below(3);
      for (size_t i = 0; i < wraps; ++i)
        p = p_nu(ns.fresh("nw"), std::nullopt, p);
      TypingContext pctx = pi_context(base.ctx);
      return GenTerm{any_of(std::move(p)), std::move(pctx), nullptr};
    }
    return attempt_adm();
  }

  GenTerm attempt_adm() {
    TypingContext ctx;
    int budget = cfg.max_size;
    TypePtr k_payload = t_chan(t_unit());
    if (cps_mode() || cfg.calculus == Calculus::Cps) {
      anchor = ns.fresh("o");
      ctx.extend(anchor, t_chan_arrow({k_payload}, result_type()));
      if (rng.chance(1, 2))
        ctx.extend(ns.fresh("g"),
                   t_chan_arrow({t_chan(t_unit())}, result_type()));
    } else {
      if (parallel() && rng.chance(4, 5)) {
        anchor = ns.fresh("o");
        ctx.extend(anchor, t_chan_arrow({t_chan(t_unit())}, t_behavior()));
      }
      size_t extra = rng.below(3);
      for (size_t i = 0; i < extra; ++i) {
        TypePtr ty = gen_value_type(cfg.type_depth_cap - 1);
        ctx.extend(ns.fresh("g"), ty);
      }
    }
    TypePtr target;
    if (cps_mode()) {
      target = result_type();
    } else if (parallel() && can_inhabit(ctx, t_behavior(), 6) &&
               rng.chance(1, 2)) {
      target = t_behavior();
    } else {
      for (int tries = 0; tries < 4 && !target; ++tries) {
        TypePtr cand = gen_value_type(cfg.type_depth_cap - 1);
        if (can_inhabit(ctx, cand, 6)) target = cand;
      }
      if (!target) target = t_chan(t_unit());
    }
    AdmDeclPtr d = gen_decl(ctx, target, budget, 0);
    return GenTerm{any_of(cfg.calculus, d), ctx, target};
  }
};

}  // namespace

GenTerm gen_typed_term(const GenConfig& cfg) {
  if (cfg.max_size < 1)
    throw Diag(Errc::BadArgument, "max_size must be at least 1");
  Gen gen(cfg);
  for (int attempt = 0; attempt < 64; ++attempt) {
    try {
      GenTerm out = gen.attempt();
      // Generator soundness is checked inline.
      if (out.term.calc == Calculus::Pi) {
        check_pi(out.ctx, out.term.pi);
      } else {
        TypePtr got = infer_any(out.ctx, out.term);
        if (!type_equal(got, out.type)) continue;
      }
      if (term_size(out.term) > std::max(cfg.max_size, 8)) continue;
      return out;
    } catch (const GenFail&) {
    } catch (const Diag&) {
    }
  }
  // Deterministic minimal fallbacks per calculus.
  switch (cfg.calculus) {
    case Calculus::Lam:
    case Calculus::LamPar:
      return GenTerm{any_of(cfg.calculus, l_star()), {}, t_unit()};
    case Calculus::Adm:
    case Calculus::AdmPar: {
      Ident u{"u", 1};
      AdmDeclPtr d =
          d_make({AdmBinding{Usage::Infinite, u, v_star()}}, a_var(u));
      return GenTerm{any_of(cfg.calculus, d), {}, t_chan(t_unit())};
    }
    case Calculus::Cps:
    case Calculus::CpsPar:
    case Calculus::Pi: {
      TypePtr rt =
          cfg.calculus == Calculus::Cps ? t_result() : t_behavior();
      Ident o{"o", 1};
      Ident u{"u", 1};
      TypingContext ctx;
      ctx.extend(o, t_chan_arrow({t_chan(t_unit())}, rt));
      AdmDeclPtr d = d_make({AdmBinding{Usage::Infinite, u, v_star()}},
                            a_app({a_var(o), a_var(u)}));
      if (cfg.calculus == Calculus::Pi)
        return GenTerm{any_of(to_pi(d)), pi_context(ctx), nullptr};
      return GenTerm{any_of(cfg.calculus, d), ctx, rt};
    }
  }
  throw Diag(Errc::BadArgument, "unreachable");
}

// ------------------------------------------------------------- diagrams ---

const char* diagram_name(DiagramKind k) {
  switch (k) {
    case DiagramKind::Retraction: return "retraction";
    case DiagramKind::AdmSimulation: return "adm-simulation";
    case DiagramKind::MonadicLifting: return "monadic-lifting";
    case DiagramKind::CpsSimulation: return "cps-simulation";
    case DiagramKind::PiRoundtrip: return "pi-roundtrip";
    case DiagramKind::TypingPreservation: return "typing-preservation";
    case DiagramKind::Termination: return "termination";
  }
  return "?";
}

std::optional<DiagramKind> diagram_of_string(const std::string& s) {
  for (DiagramKind k :
       {DiagramKind::Retraction, DiagramKind::AdmSimulation,
        DiagramKind::MonadicLifting, DiagramKind::CpsSimulation,
        DiagramKind::PiRoundtrip, DiagramKind::TypingPreservation,
        DiagramKind::Termination})
    if (s == diagram_name(k)) return k;
  return std::nullopt;
}

namespace diagram {

bool retraction(const LamPtr& m, const FaultInjection* faults) {
  LamPtr back = readback(to_admin(m), faults);
  return alpha_equal(alpha_normalize(back), alpha_normalize(m));
}

namespace {

// Breadth-first lambda reduction search for a term alpha-equal to
// `target`, between 1 and `bound` steps away from `start`.
bool lam_reachable(const LamPtr& start, const LamPtr& target, int bound,
                   int* depth_used) {
  LamPtr goal = alpha_normalize(target);
  std::set<std::string> seen;
  std::vector<LamPtr> frontier{start};
  for (int depth = 1; depth <= bound; ++depth) {
    std::vector<LamPtr> next;
    for (const auto& t : frontier) {
      for (const auto& r : find_redexes(t)) {
        LamPtr stepped = step_at(t, r);
        LamPtr canon = alpha_normalize(stepped);
        if (alpha_equal(canon, goal)) {
          if (depth_used) *depth_used = std::max(*depth_used, depth);
          return true;
        }
        std::string key = show(canon);
        if (seen.insert(std::move(key)).second) next.push_back(stepped);
      }
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return false;
}

}  // namespace

bool adm_simulation(const AdmDeclPtr& d, int* max_depth,
                    const FaultInjection* faults) {
  AdmDeclPtr start = rename_apart(d);
  LamPtr m1 = readback(start, faults);
  for (const auto& r : find_redexes(start)) {
    AdmDeclPtr d2 = step_at(start, r, faults);
    LamPtr m2 = readback(d2, faults);
    int arity = redex_arity(any_of(Calculus::AdmPar, start), r);
    if (!lam_reachable(m1, m2, arity + 1, max_depth)) return false;
  }
  return true;
}

bool monadic_lifting(const AdmDeclPtr& d, const FaultInjection* faults) {
  AdmDeclPtr start = rename_apart(d);
  LamPtr m1 = readback(start, faults);
  auto adm_redexes = find_redexes(start);
  for (const auto& rm : find_redexes(m1)) {
    LamPtr m2 = alpha_normalize(step_at(m1, rm));
    bool matched = false;
    for (const auto& rd : adm_redexes) {
      AdmDeclPtr d2 = step_at(start, rd, faults);
      if (alpha_equal(alpha_normalize(readback(d2, faults)), m2)) {
        matched = true;
        break;
      }
    }
    if (!matched) return false;
  }
  return true;
}

bool cps_simulation(const TypingContext& ctx, const AdmDeclPtr& d,
                    Calculus src, int* max_depth,
                    const FaultInjection* faults) {
  AdmDeclPtr start = rename_apart(d, [&] {
    IdentSet used;
    for (const auto& [x, ty] : ctx.entries()) {
      (void)ty;
      used.insert(x);
    }
    return used;
  }());
  NameSupply ns;
  ns.reserve(all_idents(start));
  Ident k = ns.fresh("k");
  AdmDeclPtr image = cps_transform(ctx, start, k, src, faults);
  for (const auto& r : find_redexes(start)) {
    AdmDeclPtr d2 = step_at(start, r, faults);
    AdmDeclPtr target = normalize_congruence(cps_transform(ctx, d2, k, src,
                                                           faults));
    // Appendix-C accounting: one step, or two when a bare-variable body
    // forces an administrative continuation step.
    std::set<std::string> seen;
    std::vector<AdmDeclPtr> frontier{image};
    bool found = false;
    for (int depth = 1; depth <= 2 && !found; ++depth) {
      std::vector<AdmDeclPtr> next;
      for (const auto& t : frontier) {
        for (const auto& tr : find_redexes(t)) {
          AdmDeclPtr stepped = step_at(t, tr, faults);
          AdmDeclPtr canon = normalize_congruence(stepped);
          if (alpha_equal(canon, target)) {
            if (max_depth) *max_depth = std::max(*max_depth, depth);
            found = true;
            break;
          }
          std::string key = show(canon);
          if (seen.insert(std::move(key)).second) next.push_back(stepped);
        }
        if (found) break;
      }
      frontier = std::move(next);
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace diagram

// ---------------------------------------------------------- check_diagram ---

namespace {

Verdict fail_with(const GenTerm& t, const std::string& reason) {
  Verdict v;
  v.pass = false;
  v.counterexample = reason + " on " + show(t.term);
  return v;
}

Verdict not_applicable() {
  Verdict v;
  v.applicable = false;
  return v;
}

Verdict check_retraction(const GenTerm& t, const FaultInjection* faults) {
  if (!t.term.lam) return not_applicable();
  try {
    if (!diagram::retraction(t.term.lam, faults))
      return fail_with(t, "readback(to_admin(M)) differs from M");
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return {};
}

Verdict check_typing_preservation(const GenTerm& t,
                                  const FaultInjection* faults) {
  try {
    switch (t.term.calc) {
      case Calculus::Lam:
      case Calculus::LamPar: {
        Calculus adm_calc =
            t.term.calc == Calculus::Lam ? Calculus::Adm : Calculus::AdmPar;
        TypePtr a = infer_type(t.ctx, t.term.lam, t.term.calc);
        AdmDeclPtr d = to_admin(t.term.lam);
        TypingContext actx = to_admin_context(t.ctx);
        TypePtr at = infer_type(actx, d, adm_calc);
        if (!type_equal(at, to_admin_type(a)))
          return fail_with(t, "to_admin image types at the wrong type");
        if (!is_monadic_decl(d) || !is_monadic(at))
          return fail_with(t, "to_admin image is not monadic");
        for (const auto& [x, ty] : actx.entries()) {
          (void)x;
          if (!is_monadic(ty))
            return fail_with(t, "to_admin context is not monadic");
        }
        LamPtr back = readback(d, faults);
        TypePtr bt = infer_type(t.ctx, back, t.term.calc);
        if (!type_equal(bt, a))
          return fail_with(t, "readback image types at the wrong type");
        return {};
      }
      case Calculus::Adm:
      case Calculus::AdmPar: {
        TypePtr a = infer_type(t.ctx, t.term.adm, t.term.calc);
        NameSupply ns;
        ns.reserve(all_idents(t.term.adm));
        Ident k = ns.fresh("k");
        AdmDeclPtr image = cps_transform(t.ctx, t.term.adm, k, t.term.calc,
                                         faults);
        TypingContext cctx = cps_context(t.ctx, t.term.calc);
        cctx.extend(k, cont_type(a, t.term.calc));
        Calculus tgt =
            t.term.calc == Calculus::Adm ? Calculus::Cps : Calculus::CpsPar;
        TypePtr rt = infer_type(cctx, image, tgt);
        TypePtr expect = tgt == Calculus::Cps ? t_result() : t_behavior();
        if (!type_equal(rt, expect))
          return fail_with(t, "CPS image types at the wrong type");
        if (!cps_shape(image, tgt == Calculus::CpsPar))
          return fail_with(t, "CPS image is outside the CPS fragment");
        bool all_inf = true;
        std::function<void(const AdmDeclPtr&)> scan =
            [&](const AdmDeclPtr& d) {
              for (const auto& b : d->bindings) {
                if (b.usage != Usage::Infinite) all_inf = false;
                if (!b.value->star) scan(b.value->body);
              }
            };
        scan(t.term.adm);
        if (all_inf) {
          LamPtr back = readback(t.term.adm, faults);
          Calculus lcalc =
              t.term.calc == Calculus::Adm ? Calculus::Lam : Calculus::LamPar;
          TypePtr bt = infer_type(readback_context(t.ctx), back, lcalc);
          if (!type_equal(bt, readback_type(a)))
            return fail_with(t, "readback image types at the wrong type");
        }
        return {};
      }
      case Calculus::Cps:
        return {};
      case Calculus::CpsPar: {
        infer_type(t.ctx, t.term.adm, Calculus::CpsPar);
        PiPtr p = to_pi(t.term.adm);
        check_pi(pi_context(t.ctx), p);
        AdmDeclPtr back = from_pi(pi_context(t.ctx), p);
        TypePtr bt = infer_type(t.ctx, back, Calculus::CpsPar);
        if (bt->kind != TypeKind::Behavior)
          return fail_with(t, "pi roundtrip image types at the wrong type");
        return {};
      }
      case Calculus::Pi: {
        check_pi(t.ctx, t.term.pi);
        AdmDeclPtr back = from_pi(t.ctx, t.term.pi);
        TypePtr bt = infer_type(t.ctx, back, Calculus::CpsPar);
        if (bt->kind != TypeKind::Behavior)
          return fail_with(t, "from_pi image types at the wrong type");
        return {};
      }
    }
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return {};
}

Verdict check_adm_simulation(const GenTerm& t, const FaultInjection* faults) {
  if (!t.term.adm) return not_applicable();
  try {
    infer_type(t.ctx, t.term.adm, t.term.calc);
  } catch (const Diag&) {
    return not_applicable();
  }
  Verdict v;
  try {
    if (!diagram::adm_simulation(t.term.adm, &v.max_depth_used, faults))
      return fail_with(t, "readback simulation diagram does not close");
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return v;
}

Verdict check_monadic_lifting(const GenTerm& t, const FaultInjection* faults) {
  if (!t.term.adm || !is_monadic_decl(t.term.adm)) return not_applicable();
  try {
    infer_type(t.ctx, t.term.adm, t.term.calc);
  } catch (const Diag&) {
    return not_applicable();
  }
  try {
    if (!diagram::monadic_lifting(t.term.adm, faults))
      return fail_with(t, "a lambda step has no matching monadic step");
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return {};
}

Verdict check_cps_simulation(const GenTerm& t, const FaultInjection* faults) {
  if (!t.term.adm) return not_applicable();
  Calculus src = t.term.calc == Calculus::Adm ? Calculus::Adm
                                              : Calculus::AdmPar;
  try {
    infer_type(t.ctx, t.term.adm, src);
  } catch (const Diag&) {
    return not_applicable();
  }
  Verdict v;
  try {
    if (!diagram::cps_simulation(t.ctx, t.term.adm, src, &v.max_depth_used,
                                 faults))
      return fail_with(t, "CPS simulation diagram does not close in 2 steps");
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return v;
}

Verdict check_pi_roundtrip(const GenTerm& t, const FaultInjection*) {
  try {
    if (t.term.calc == Calculus::CpsPar) {
      PiPtr p = to_pi(t.term.adm);
      AdmDeclPtr back = from_pi(pi_context(t.ctx), p);
      if (!congruent(t.term.adm, back))
        return fail_with(t, "from_pi(to_pi(D)) is not congruent to D");
      return {};
    }
    if (t.term.calc == Calculus::Pi) {
      AdmDeclPtr d = from_pi(t.ctx, t.term.pi);
      PiPtr back = to_pi(d);
      if (!congruent(t.term.pi, back))
        return fail_with(t, "to_pi(from_pi(P)) is not congruent to P");
      return {};
    }
  } catch (const Diag& d) {
    return fail_with(t, d.what());
  }
  return not_applicable();
}

Verdict check_termination(const GenTerm& t, const FaultInjection* faults) {
  try {
    infer_any(t.ctx, t.term);
  } catch (const Diag&) {
    return not_applicable();
  }
  StepBudget budget;
  for (int s = 0; s < 9; ++s) {
    SplitMix64 rng(mix_seed(0x7e7e7e, static_cast<uint64_t>(s)));
    AnyTerm cur = t.term;
    if (cur.adm) cur.adm = rename_apart(cur.adm);
    if (cur.pi) cur.pi = rename_apart(cur.pi);
    if (cur.lam) cur.lam = rename_apart(cur.lam);
    long steps = 0;
    for (;; ++steps) {
      auto redexes = find_redexes(cur);
      if (redexes.empty()) break;
      if (steps >= budget.max_steps)
        return fail_with(t, "did not normalize within the step budget");
      size_t pick = s == 0 ? 0 : rng.below(redexes.size());
      const auto& r = redexes[pick];
      // Trace invariant: usages only move inf->inf or 1->0.
      if (cur.adm) {
        Usage pre = cur.adm->bindings[static_cast<size_t>(r.binding_index)]
                        .usage;
        if (pre == Usage::Zero)
          return fail_with(t, "a 0-usage binding fired");
        AnyTerm next = step_at(cur, r, faults);
        Usage post = next.adm->bindings[static_cast<size_t>(r.binding_index)]
                         .usage;
        if (post != decrement(pre))
          return fail_with(t, "usage did not decrement along the trace");
        cur = next;
      } else {
        cur = step_at(cur, r, faults);
      }
    }
  }
  return {};
}

}  // namespace

Verdict check_diagram(DiagramKind kind, const GenTerm& t,
                      const FaultInjection* faults) {
  switch (kind) {
    case DiagramKind::Retraction:
      return check_retraction(t, faults);
    case DiagramKind::AdmSimulation:
      return check_adm_simulation(t, faults);
    case DiagramKind::MonadicLifting:
      return check_monadic_lifting(t, faults);
    case DiagramKind::CpsSimulation:
      return check_cps_simulation(t, faults);
    case DiagramKind::PiRoundtrip:
      return check_pi_roundtrip(t, faults);
    case DiagramKind::TypingPreservation:
      return check_typing_preservation(t, faults);
    case DiagramKind::Termination:
      return check_termination(t, faults);
  }
  return {};
}

// ------------------------------------------------------------- campaign ---

namespace {

GenTerm corpus_item(DiagramKind kind, int index, const GenConfig& base) {
  GenConfig cfg = base;
  cfg.seed = mix_seed(base.seed,
                      static_cast<uint64_t>(index) * 31 +
                          static_cast<uint64_t>(kind) * 1000003);
  switch (kind) {
    case DiagramKind::Retraction:
      cfg.calculus = Calculus::LamPar;
      break;
    case DiagramKind::AdmSimulation:
      cfg.calculus = Calculus::AdmPar;
      cfg.usage_policy = UsagePolicy::AllInfinite;
      break;
    case DiagramKind::MonadicLifting: {
      cfg.calculus = Calculus::LamPar;
      GenTerm g = gen_typed_term(cfg);
      AdmDeclPtr d = to_admin(g.term.lam);
      return GenTerm{any_of(Calculus::AdmPar, d), to_admin_context(g.ctx),
                     to_admin_type(g.type)};
    }
    case DiagramKind::CpsSimulation:
      cfg.calculus = Calculus::AdmPar;
      cfg.usage_policy = UsagePolicy::Mixed;
      break;
    case DiagramKind::PiRoundtrip:
      cfg.calculus = index % 3 == 2 ? Calculus::Pi : Calculus::CpsPar;
      cfg.usage_policy = UsagePolicy::Mixed;
      break;
    case DiagramKind::TypingPreservation: {
      static const Calculus rotation[] = {Calculus::LamPar, Calculus::AdmPar,
                                          Calculus::AdmPar, Calculus::CpsPar,
                                          Calculus::Lam, Calculus::Adm};
      cfg.calculus = rotation[index % 6];
      cfg.usage_policy =
          index % 6 == 2 ? UsagePolicy::Mixed : UsagePolicy::AllInfinite;
      break;
    }
    case DiagramKind::Termination: {
      static const Calculus rotation[] = {
          Calculus::Lam,    Calculus::LamPar, Calculus::Adm, Calculus::AdmPar,
          Calculus::CpsPar, Calculus::Pi,     Calculus::AdmPar};
      cfg.calculus = rotation[index % 7];
      cfg.usage_policy =
          index % 7 >= 3 ? UsagePolicy::Mixed : UsagePolicy::AllInfinite;
      break;
    }
  }
  return gen_typed_term(cfg);
}

}  // namespace

bool CampaignReport::ok() const {
  for (const auto& k : kinds)
    if (k.fail > 0) return false;
  return true;
}

std::string CampaignReport::text() const {
  std::string out;
  for (const auto& k : kinds) {
    out += std::string(diagram_name(k.kind)) + " " + std::to_string(k.pass) +
           "/" + std::to_string(k.pass + k.fail) +
           " maxDepthUsed=" + std::to_string(k.max_depth_used) + "\n";
    for (const auto& ce : k.counterexamples)
      out += "  counterexample: " + ce + "\n";
  }
  return out;
}

std::string CampaignReport::json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["ok"] = ok();
  auto& arr = j["kinds"];
  arr = nlohmann::json::array();
  for (const auto& k : kinds) {
    nlohmann::json kj;
    kj["kind"] = diagram_name(k.kind);
    kj["pass"] = k.pass;
    kj["fail"] = k.fail;
    kj["notApplicable"] = k.not_applicable;
    kj["maxDepthUsed"] = k.max_depth_used;
    kj["counterexamples"] = k.counterexamples;
    arr.push_back(std::move(kj));
  }
  return j.dump(2);
}

CampaignReport run_campaign(const std::vector<DiagramKind>& kinds,
                            int corpus_size, const GenConfig& cfg,
                            const FaultInjection* faults) {
  CampaignReport report;
  report.seed = cfg.seed;
  for (DiagramKind kind : kinds) {
    KindReport kr;
    kr.kind = kind;
    for (int i = 0; i < corpus_size; ++i) {
      GenTerm item = corpus_item(kind, i, cfg);
      Verdict v = check_diagram(kind, item, faults);
      if (!v.applicable) {
        kr.not_applicable += 1;
        continue;
      }
      kr.max_depth_used = std::max(kr.max_depth_used, v.max_depth_used);
      if (v.pass) {
        kr.pass += 1;
      } else {
        kr.fail += 1;
        if (kr.counterexamples.size() < 5)
          kr.counterexamples.push_back(v.counterexample);
      }
    }
    report.kinds.push_back(std::move(kr));
  }
  return report;
}

}  // namespace picomp
