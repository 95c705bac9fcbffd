#include "picomp/reduce.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <unordered_map>

#include "picomp/diag.hpp"
#include "picomp/kernel.hpp"
#include "picomp/rng.hpp"
#include "picomp/syntax.hpp"

namespace picomp {

// ------------------------------------------------------------- lambda ---

namespace {

void find_lam(const LamPtr& t, Path& path, std::vector<RedexDescriptor>& out) {
  switch (t->kind) {
    case LamKind::Star:
    case LamKind::Var:
    case LamKind::Abs:
      return;
    case LamKind::Par:
      path.push_back({Sel::ParLeft, 0});
      find_lam(t->a, path, out);
      path.back() = {Sel::ParRight, 0};
      find_lam(t->b, path, out);
      path.pop_back();
      return;
    case LamKind::App: {
      if (!lam_is_value(t->a)) {
        path.push_back({Sel::AppFn, 0});
        find_lam(t->a, path, out);
        path.pop_back();
        return;
      }
      if (!lam_is_value(t->b)) {
        path.push_back({Sel::AppArg, 0});
        find_lam(t->b, path, out);
        path.pop_back();
        return;
      }
      if (t->a->kind == LamKind::Abs)
        out.push_back(RedexDescriptor{path, RedexRule::BetaV, -1, {}});
      return;
    }
  }
}

void find_lam_p(const LamPtr& t, Path& path,
                std::vector<RedexDescriptor>& out) {
  switch (t->kind) {
    case LamKind::Star:
    case LamKind::Var:
    case LamKind::Abs:
      return;
    case LamKind::Par:
      throw Diag(Errc::NotInFragment, "the embedding target has no Par");
    case LamKind::App: {
      if (t->a->kind == LamKind::Abs && lam_is_value(t->b))
        out.push_back(RedexDescriptor{path, RedexRule::BetaV, -1, {}});
      path.push_back({Sel::AppFn, 0});
      find_lam_p(t->a, path, out);
      path.back() = {Sel::AppArg, 0};
      find_lam_p(t->b, path, out);
      path.pop_back();
      return;
    }
  }
}

const LamTerm* lam_at(const LamPtr& t, const Path& path) {
  const LamTerm* cur = t.get();
  for (const auto& s : path) {
    switch (s.sel) {
      case Sel::AppFn:
      case Sel::ParLeft:
        cur = cur->a.get();
        break;
      case Sel::AppArg:
      case Sel::ParRight:
        cur = cur->b.get();
        break;
      case Sel::AbsBody:
        cur = cur->a.get();
        break;
      default:
        throw Diag(Errc::StaleRedex, "path does not address a lambda term");
    }
  }
  return cur;
}

LamPtr lam_replace(const LamPtr& t, const Path& path, size_t from,
                   const LamPtr& with) {
  if (from == path.size()) return with;
  const auto& s = path[from];
  switch (s.sel) {
    case Sel::AppFn:
      return l_app(lam_replace(t->a, path, from + 1, with), t->b);
    case Sel::AppArg:
      return l_app(t->a, lam_replace(t->b, path, from + 1, with));
    case Sel::ParLeft:
      return l_par(lam_replace(t->a, path, from + 1, with), t->b);
    case Sel::ParRight:
      return l_par(t->a, lam_replace(t->b, path, from + 1, with));
    case Sel::AbsBody:
      return l_abs(t->var, t->ann, lam_replace(t->a, path, from + 1, with));
    default:
      throw Diag(Errc::StaleRedex, "path does not address a lambda term");
  }
}

}  // namespace

std::vector<RedexDescriptor> find_redexes(const LamPtr& t) {
  std::vector<RedexDescriptor> out;
  Path path;
  find_lam(t, path, out);
  return out;
}

std::vector<RedexDescriptor> find_redexes_lam_p(const LamPtr& t) {
  std::vector<RedexDescriptor> out;
  Path path;
  find_lam_p(t, path, out);
  return out;
}

LamPtr step_at(const LamPtr& t, const RedexDescriptor& r) {
  const LamTerm* node = lam_at(t, r.path);
  if (node->kind != LamKind::App || node->a->kind != LamKind::Abs ||
      !lam_is_value(node->b))
    throw Diag(Errc::StaleRedex, "no beta redex at the given path");
  const auto& abs = node->a;
  LamPtr contractum = substitute(abs->a, {{abs->var, node->b}});
  return lam_replace(t, r.path, 0, contractum);
}

// ----------------------------------------------------- administrative ---

namespace {

void find_adm_term(const AdmTermPtr& t, const AdmDeclPtr& root, Path& path,
                   const std::map<Ident, size_t>& def_of,
                   std::vector<RedexDescriptor>& out) {
  switch (t->kind) {
    case AdmTermKind::Var:
    case AdmTermKind::Hole:
      return;
    case AdmTermKind::Par:
      path.push_back({Sel::ParLeft, 0});
      find_adm_term(t->left, root, path, def_of, out);
      path.back() = {Sel::ParRight, 0};
      find_adm_term(t->right, root, path, def_of, out);
      path.pop_back();
      return;
    case AdmTermKind::App: {
      // Only the leftmost non-variable component is an evaluation
      // position; with all components variables the call itself may
      // fire.
      for (size_t i = 0; i < t->parts.size(); ++i) {
        if (t->parts[i]->kind != AdmTermKind::Var) {
          path.push_back({Sel::AppPart, static_cast<int>(i)});
          find_adm_term(t->parts[i], root, path, def_of, out);
          path.pop_back();
          return;
        }
      }
      auto it = def_of.find(t->parts[0]->var);
      if (it == def_of.end()) return;  // free or star-bound: stuck
      const AdmBinding& b = root->bindings[it->second];
      if (b.usage == Usage::Zero) return;
      if (b.value->star) return;
      if (b.value->params.size() != t->parts.size() - 1) return;
      out.push_back(RedexDescriptor{
          path, RedexRule::BetaVAdm, static_cast<int>(it->second),
          Path{{Sel::BindingValue, static_cast<int>(it->second)}}});
      return;
    }
  }
}

const AdmTerm* adm_term_at(const AdmDeclPtr& d, const Path& path) {
  if (path.empty() || path[0].sel != Sel::DeclBody)
    throw Diag(Errc::StaleRedex, "administrative redex paths start at the body");
  const AdmTerm* cur = d->body.get();
  for (size_t i = 1; i < path.size(); ++i) {
    const auto& s = path[i];
    switch (s.sel) {
      case Sel::AppPart:
        cur = cur->parts.at(static_cast<size_t>(s.index)).get();
        break;
      case Sel::ParLeft:
        cur = cur->left.get();
        break;
      case Sel::ParRight:
        cur = cur->right.get();
        break;
      default:
        throw Diag(Errc::StaleRedex, "bad administrative path");
    }
  }
  return cur;
}

AdmTermPtr adm_term_replace(const AdmTermPtr& t, const Path& path, size_t from,
                            const AdmTermPtr& with) {
  if (from == path.size()) return with;
  const auto& s = path[from];
  switch (s.sel) {
    case Sel::AppPart: {
      auto parts = t->parts;
      size_t i = static_cast<size_t>(s.index);
      parts.at(i) = adm_term_replace(parts.at(i), path, from + 1, with);
      return a_app(std::move(parts));
    }
    case Sel::ParLeft:
      return a_par(adm_term_replace(t->left, path, from + 1, with), t->right);
    case Sel::ParRight:
      return a_par(t->left, adm_term_replace(t->right, path, from + 1, with));
    default:
      throw Diag(Errc::StaleRedex, "bad administrative path");
  }
}

}  // namespace

std::vector<RedexDescriptor> find_redexes(const AdmDeclPtr& d) {
  std::map<Ident, size_t> def_of;
  for (size_t i = 0; i < d->bindings.size(); ++i)
    def_of[d->bindings[i].name] = i;  // innermost definition wins
  std::vector<RedexDescriptor> out;
  Path path{{Sel::DeclBody, 0}};
  find_adm_term(d->body, d, path, def_of, out);
  return out;
}

AdmDeclPtr step_at(const AdmDeclPtr& d, const RedexDescriptor& r,
                   const FaultInjection* faults) {
  auto candidates = find_redexes(d);
  if (std::find(candidates.begin(), candidates.end(), r) == candidates.end())
    throw Diag(Errc::StaleRedex, "redex does not match the term");

  size_t idx = static_cast<size_t>(r.binding_index);
  const AdmBinding& binding = d->bindings[idx];
  const AdmTerm* call = adm_term_at(d, r.path);

  std::map<Ident, Ident> sigma;
  for (size_t i = 0; i < binding.value->params.size(); ++i)
    sigma[binding.value->params[i].name] = call->parts[i + 1]->var;
  AdmDeclPtr contractum = substitute(binding.value->body, sigma);
  // Fresh names for the copied prefix: the copy lands beside the
  // original definition and may fire again later.
  contractum = rename_apart(contractum, all_idents(d));

  std::vector<AdmBinding> bindings = d->bindings;
  if (!(faults && faults->skip_usage_decrement))
    bindings[idx].usage = decrement(bindings[idx].usage);
  // Hoist the contractum prefix to the bottom of the root prefix, below
  // every binder its argument names may refer to.
  for (const auto& b : contractum->bindings) bindings.push_back(b);
  AdmTermPtr body = adm_term_replace(d->body, r.path, 1, contractum->body);
  return d_make(std::move(bindings), std::move(body));
}

// ------------------------------------------------------------------ pi ---

namespace {

struct PiDef {
  Path nu_path;
  bool replicated;
  size_t arity;
  bool live;  // false for a bare restriction shadowing an outer guard
};

void find_pi(const PiPtr& p, Path& path, std::map<Ident, PiDef> defs,
             std::vector<RedexDescriptor>& out) {
  switch (p->kind) {
    case PiKind::Out: {
      auto it = defs.find(p->channel);
      if (it == defs.end() || !it->second.live) return;
      if (it->second.arity != p->args.size()) return;
      out.push_back(RedexDescriptor{
          path, it->second.replicated ? RedexRule::PiBang : RedexRule::PiOnce,
          -1, it->second.nu_path});
      return;
    }
    case PiKind::Par:
      path.push_back({Sel::ParLeft, 0});
      find_pi(p->left, path, defs, out);
      path.back() = {Sel::ParRight, 0};
      find_pi(p->right, path, defs, out);
      path.pop_back();
      return;
    case PiKind::Nu: {
      if (p->guard)
        defs[p->name] =
            PiDef{path, p->guard->replicated, p->guard->params.size(), true};
      else
        defs[p->name] = PiDef{{}, false, 0, false};
      path.push_back({Sel::NuRest, 0});
      find_pi(p->rest, path, defs, out);
      path.pop_back();
      return;
    }
  }
}

const PiProc* pi_at(const PiPtr& p, const Path& path) {
  const PiProc* cur = p.get();
  for (const auto& s : path) {
    switch (s.sel) {
      case Sel::NuRest:
        cur = cur->rest.get();
        break;
      case Sel::ParLeft:
        cur = cur->left.get();
        break;
      case Sel::ParRight:
        cur = cur->right.get();
        break;
      case Sel::GuardBody:
        cur = cur->guard->body.get();
        break;
      default:
        throw Diag(Errc::StaleRedex, "bad pi path");
    }
  }
  return cur;
}

// Plug a declaration into the evaluation position addressed by `path`.
// Restrictions of the declaration are lifted to the deepest spine
// position above the parallel tree so the result stays in the rigid
// grammar.
PiPtr pi_plug(const PiPtr& p, const Path& path, size_t from,
              const PiPtr& decl) {
  if (from == path.size()) return decl;
  const auto& s = path[from];
  if (s.sel == Sel::NuRest)
    return p_nu(p->name, p->guard, pi_plug(p->rest, path, from + 1, decl));
  // Entering the parallel tree: split off the declaration's spine here.
  std::vector<std::pair<Ident, std::optional<PiGuard>>> spine;
  PiPtr tree = decl;
  while (tree->kind == PiKind::Nu) {
    spine.emplace_back(tree->name, tree->guard);
    tree = tree->rest;
  }
  std::function<PiPtr(const PiPtr&, size_t)> fill = [&](const PiPtr& q,
                                                        size_t i) -> PiPtr {
    if (i == path.size()) return tree;
    if (path[i].sel == Sel::ParLeft)
      return p_par(fill(q->left, i + 1), q->right);
    if (path[i].sel == Sel::ParRight)
      return p_par(q->left, fill(q->right, i + 1));
    throw Diag(Errc::StaleRedex, "bad pi path");
  };
  PiPtr result = fill(p, from);
  for (auto it = spine.rbegin(); it != spine.rend(); ++it)
    result = p_nu(it->first, it->second, result);
  return result;
}

PiPtr pi_step_rec(const PiPtr& p, const Path& def_path, size_t dfrom,
                  const Path& call_path, const PiPtr& contractum,
                  bool remove_guard) {
  if (dfrom == def_path.size()) {
    // p is the defining restriction; the call lies inside its rest.
    assert(p->kind == PiKind::Nu && p->guard);
    assert(call_path.size() > dfrom && call_path[dfrom].sel == Sel::NuRest);
    PiPtr rest = pi_plug(p->rest, call_path, dfrom + 1, contractum);
    return p_nu(p->name, remove_guard ? std::nullopt : p->guard,
                std::move(rest));
  }
  const auto& s = def_path[dfrom];
  switch (s.sel) {
    case Sel::NuRest:
      return p_nu(p->name, p->guard,
                  pi_step_rec(p->rest, def_path, dfrom + 1, call_path,
                              contractum, remove_guard));
    case Sel::ParLeft:
      return p_par(pi_step_rec(p->left, def_path, dfrom + 1, call_path,
                               contractum, remove_guard),
                   p->right);
    case Sel::ParRight:
      return p_par(p->left, pi_step_rec(p->right, def_path, dfrom + 1,
                                        call_path, contractum, remove_guard));
    default:
      throw Diag(Errc::StaleRedex, "bad pi path");
  }
}

}  // namespace

std::vector<RedexDescriptor> find_redexes(const PiPtr& p) {
  std::vector<RedexDescriptor> out;
  Path path;
  find_pi(p, path, {}, out);
  return out;
}

PiPtr step_at(const PiPtr& p, const RedexDescriptor& r) {
  auto candidates = find_redexes(p);
  if (std::find(candidates.begin(), candidates.end(), r) == candidates.end())
    throw Diag(Errc::StaleRedex, "redex does not match the process");

  const PiProc* nu = pi_at(p, r.definition_site);
  const PiProc* call = pi_at(p, r.path);
  const PiGuard& guard = *nu->guard;

  std::map<Ident, Ident> sigma;
  for (size_t i = 0; i < guard.params.size(); ++i)
    sigma[guard.params[i]] = call->args[i];
  PiPtr contractum = substitute(guard.body, sigma);
  contractum = rename_apart(contractum, all_idents(p));

  return pi_step_rec(p, r.definition_site, 0, r.path, contractum,
                     r.rule == RedexRule::PiOnce);
}

// ------------------------------------------------------------ dispatch ---

std::vector<RedexDescriptor> find_redexes(const AnyTerm& t) {
  if (t.lam) return find_redexes(t.lam);
  if (t.adm) return find_redexes(t.adm);
  return find_redexes(t.pi);
}

int redex_arity(const AnyTerm& t, const RedexDescriptor& r) {
  if (t.lam) return 1;
  if (t.adm)
    return static_cast<int>(adm_term_at(t.adm, r.path)->parts.size()) - 1;
  return static_cast<int>(pi_at(t.pi, r.path)->args.size());
}

AnyTerm step_at(const AnyTerm& t, const RedexDescriptor& r,
                const FaultInjection* faults) {
  AnyTerm out = t;
  if (t.lam)
    out.lam = step_at(t.lam, r);
  else if (t.adm)
    out.adm = step_at(t.adm, r, faults);
  else
    out.pi = step_at(t.pi, r);
  return out;
}

// ------------------------------------------------------------ evaluate ---

namespace {

AnyTerm rename_apart_any(const AnyTerm& t) {
  AnyTerm out = t;
  if (t.lam) out.lam = rename_apart(t.lam);
  if (t.adm) out.adm = rename_apart(t.adm);
  if (t.pi) out.pi = rename_apart(t.pi);
  return out;
}

EvalOutcome run_sequential(const AnyTerm& start, Strategy strategy,
                           StepBudget budget, bool record_trace,
                           const FaultInjection* faults) {
  SplitMix64 rng(strategy.seed);
  EvalOutcome out;
  AnyTerm cur = start;
  for (long steps = 0;; ++steps) {
    auto redexes = find_redexes(cur);
    if (redexes.empty()) {
      out.kind = EvalOutcome::NormalForm;
      out.term = cur;
      out.steps = steps;
      return out;
    }
    if (steps >= budget.max_steps) {
      out.kind = EvalOutcome::BudgetExhausted;
      out.term = cur;
      out.steps = steps;
      return out;
    }
    size_t pick = strategy.kind == StrategyKind::Leftmost
                      ? 0
                      : rng.below(redexes.size());
    cur = step_at(cur, redexes[pick], faults);
    if (record_trace)
      out.trace.push_back(TraceEntry{static_cast<int>(steps),
                                     redexes[pick].rule, redexes[pick].path,
                                     show(cur)});
  }
}

EvalOutcome run_graph(const AnyTerm& start, StepBudget budget,
                      const FaultInjection* faults) {
  EvalOutcome out;
  out.kind = EvalOutcome::Graph;
  auto& g = out.graph;

  std::unordered_map<std::string, int> index_of;
  auto intern = [&](const AnyTerm& t) -> int {
    AnyTerm canon = normalize_congruence(t);
    std::string key = show(canon);
    auto it = index_of.find(key);
    if (it != index_of.end()) return it->second;
    int id = static_cast<int>(g.nodes.size());
    index_of.emplace(std::move(key), id);
    g.nodes.push_back(ReductionGraph::Node{std::move(canon), t});
    return id;
  };

  intern(start);
  for (size_t frontier = 0; frontier < g.nodes.size(); ++frontier) {
    if (static_cast<int>(g.nodes.size()) > budget.max_graph_nodes) {
      g.truncated = true;
      break;
    }
    AnyTerm rep = g.nodes[frontier].representative;
    auto redexes = find_redexes(rep);
    for (const auto& r : redexes) {
      AnyTerm next = step_at(rep, r, faults);
      int to = intern(next);
      g.edges.emplace_back(static_cast<int>(frontier), to, r.rule);
    }
  }
  out.term = start;
  return out;
}

}  // namespace

EvalOutcome evaluate(const AnyTerm& t, Strategy strategy, StepBudget budget,
                     bool record_trace, const FaultInjection* faults) {
  if (budget.max_steps < 1)
    throw Diag(Errc::BadArgument, "step budget must be at least 1");
  AnyTerm start = rename_apart_any(t);
  if (strategy.kind == StrategyKind::EnumerateAll)
    return run_graph(start, budget, faults);
  return run_sequential(start, strategy, budget, record_trace, faults);
}

}  // namespace picomp
