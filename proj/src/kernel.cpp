#include "picomp/kernel.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <memory>

#include "picomp/diag.hpp"

namespace picomp {

// ------------------------------------------------------------ free names ---

namespace {

void fv_lam(const LamPtr& t, IdentSet& shadow, IdentSet& out) {
  switch (t->kind) {
    case LamKind::Star:
      return;
    case LamKind::Var:
      if (!shadow.count(t->var)) out.insert(t->var);
      return;
    case LamKind::Abs: {
      bool added = shadow.insert(t->var).second;
      fv_lam(t->a, shadow, out);
      if (added) shadow.erase(t->var);
      return;
    }
    case LamKind::App:
    case LamKind::Par:
      fv_lam(t->a, shadow, out);
      fv_lam(t->b, shadow, out);
      return;
  }
}

void fv_term(const AdmTermPtr& t, const IdentSet& shadow, IdentSet& out);
void fv_decl(const AdmDeclPtr& d, IdentSet shadow, IdentSet& out);

void fv_value(const AdmValuePtr& v, IdentSet shadow, IdentSet& out) {
  if (v->star) return;
  for (const auto& p : v->params) shadow.insert(p.name);
  fv_decl(v->body, std::move(shadow), out);
}

void fv_term(const AdmTermPtr& t, const IdentSet& shadow, IdentSet& out) {
  switch (t->kind) {
    case AdmTermKind::Var:
      if (!shadow.count(t->var)) out.insert(t->var);
      return;
    case AdmTermKind::App:
      for (const auto& p : t->parts) fv_term(p, shadow, out);
      return;
    case AdmTermKind::Par:
      fv_term(t->left, shadow, out);
      fv_term(t->right, shadow, out);
      return;
    case AdmTermKind::Hole:
      return;
  }
}

void fv_decl(const AdmDeclPtr& d, IdentSet shadow, IdentSet& out) {
  for (const auto& b : d->bindings) {
    fv_value(b.value, shadow, out);  // the binding's name is not in scope here
    shadow.insert(b.name);
  }
  fv_term(d->body, shadow, out);
}

void fv_pi(const PiPtr& p, IdentSet shadow, IdentSet& out) {
  switch (p->kind) {
    case PiKind::Out:
      if (!shadow.count(p->channel)) out.insert(p->channel);
      for (const auto& a : p->args)
        if (!shadow.count(a)) out.insert(a);
      return;
    case PiKind::Par:
      fv_pi(p->left, shadow, out);
      fv_pi(p->right, shadow, out);
      return;
    case PiKind::Nu: {
      IdentSet inner = shadow;
      inner.insert(p->name);
      if (p->guard) {
        IdentSet gsh = inner;
        for (const auto& y : p->guard->params) gsh.insert(y);
        fv_pi(p->guard->body, std::move(gsh), out);
      }
      fv_pi(p->rest, std::move(inner), out);
      return;
    }
  }
}

}  // namespace

IdentSet free_vars(const LamPtr& t) {
  IdentSet shadow, out;
  fv_lam(t, shadow, out);
  return out;
}

IdentSet free_vars(const AdmValuePtr& v) {
  IdentSet out;
  fv_value(v, {}, out);
  return out;
}

IdentSet free_vars(const AdmTermPtr& t) {
  IdentSet out;
  fv_term(t, {}, out);
  return out;
}

IdentSet free_vars(const AdmDeclPtr& d) {
  IdentSet out;
  fv_decl(d, {}, out);
  return out;
}

IdentSet free_vars(const PiPtr& p) {
  IdentSet out;
  fv_pi(p, {}, out);
  return out;
}

IdentSet free_vars(const AnyTerm& t) {
  if (t.lam) return free_vars(t.lam);
  if (t.adm) return free_vars(t.adm);
  return free_vars(t.pi);
}

namespace {

void ai_lam(const LamPtr& t, IdentSet& out) {
  switch (t->kind) {
    case LamKind::Star:
      return;
    case LamKind::Var:
      out.insert(t->var);
      return;
    case LamKind::Abs:
      out.insert(t->var);
      ai_lam(t->a, out);
      return;
    case LamKind::App:
    case LamKind::Par:
      ai_lam(t->a, out);
      ai_lam(t->b, out);
      return;
  }
}

void ai_decl(const AdmDeclPtr& d, IdentSet& out);

void ai_term(const AdmTermPtr& t, IdentSet& out) {
  switch (t->kind) {
    case AdmTermKind::Var:
      out.insert(t->var);
      return;
    case AdmTermKind::App:
      for (const auto& p : t->parts) ai_term(p, out);
      return;
    case AdmTermKind::Par:
      ai_term(t->left, out);
      ai_term(t->right, out);
      return;
    case AdmTermKind::Hole:
      return;
  }
}

void ai_decl(const AdmDeclPtr& d, IdentSet& out) {
  for (const auto& b : d->bindings) {
    out.insert(b.name);
    if (!b.value->star) {
      for (const auto& p : b.value->params) out.insert(p.name);
      ai_decl(b.value->body, out);
    }
  }
  ai_term(d->body, out);
}

void ai_pi(const PiPtr& p, IdentSet& out) {
  switch (p->kind) {
    case PiKind::Out:
      out.insert(p->channel);
      for (const auto& a : p->args) out.insert(a);
      return;
    case PiKind::Par:
      ai_pi(p->left, out);
      ai_pi(p->right, out);
      return;
    case PiKind::Nu:
      out.insert(p->name);
      if (p->guard) {
        out.insert(p->guard->channel);
        for (const auto& y : p->guard->params) out.insert(y);
        ai_pi(p->guard->body, out);
      }
      ai_pi(p->rest, out);
      return;
  }
}

}  // namespace

IdentSet all_idents(const LamPtr& t) {
  IdentSet out;
  ai_lam(t, out);
  return out;
}

IdentSet all_idents(const AdmDeclPtr& d) {
  IdentSet out;
  ai_decl(d, out);
  return out;
}

IdentSet all_idents(const PiPtr& p) {
  IdentSet out;
  ai_pi(p, out);
  return out;
}

// --------------------------------------------------------- substitution ---

namespace {

IdentSet lam_payload_fv(const std::map<Ident, LamPtr>& sigma) {
  IdentSet out;
  for (const auto& [k, v] : sigma) {
    (void)k;
    IdentSet shadow;
    fv_lam(v, shadow, out);
  }
  return out;
}

LamPtr subst_lam(const LamPtr& t, const std::map<Ident, LamPtr>& sigma,
                 const IdentSet& payload) {
  switch (t->kind) {
    case LamKind::Star:
      return t;
    case LamKind::Var: {
      auto it = sigma.find(t->var);
      if (it == sigma.end()) return t;
      if (!lam_is_value(it->second))
        throw Diag(Errc::SortMismatch,
                   "replacement for " + show(t->var) + " is not a value",
                   t.get());
      return it->second;
    }
    case LamKind::App:
      return l_app(subst_lam(t->a, sigma, payload),
                   subst_lam(t->b, sigma, payload));
    case LamKind::Par:
      return l_par(subst_lam(t->a, sigma, payload),
                   subst_lam(t->b, sigma, payload));
    case LamKind::Abs: {
      auto inner = sigma;
      inner.erase(t->var);
      if (inner.empty()) return t;
      if (payload.count(t->var)) {
        // Capture threatens: rename the binder before descending.
        IdentSet taken = payload;
        IdentSet sh;
        fv_lam(t->a, sh, taken);
        for (const auto& [k, v] : inner) {
          (void)v;
          taken.insert(k);
        }
        Ident fresh = avoid_collision(t->var, taken);
        inner[t->var] = l_var(fresh);
        IdentSet pay = payload;
        pay.insert(fresh);
        return l_abs(fresh, t->ann, subst_lam(t->a, inner, pay));
      }
      return l_abs(t->var, t->ann, subst_lam(t->a, inner, payload));
    }
  }
  return t;
}

IdentSet name_payload(const std::map<Ident, Ident>& sigma) {
  IdentSet out;
  for (const auto& [k, v] : sigma) {
    (void)k;
    out.insert(v);
  }
  return out;
}

// Renames one binder if it would capture an incoming name; returns the
// binder to use and updates sigma for the scope of the binder.
Ident bind_through(const Ident& binder, std::map<Ident, Ident>& sigma,
                   const IdentSet& scope_idents) {
  sigma.erase(binder);
  IdentSet payload = name_payload(sigma);
  if (!payload.count(binder)) return binder;
  IdentSet taken = payload;
  taken.insert(scope_idents.begin(), scope_idents.end());
  for (const auto& [k, v] : sigma) {
    (void)v;
    taken.insert(k);
  }
  Ident fresh = avoid_collision(binder, taken);
  sigma[binder] = fresh;
  return fresh;
}

AdmDeclPtr subst_decl(const AdmDeclPtr& d, std::map<Ident, Ident> sigma);

AdmValuePtr subst_value(const AdmValuePtr& v, std::map<Ident, Ident> sigma) {
  if (v->star || sigma.empty()) return v;
  IdentSet scope = all_idents(v->body);
  std::vector<AdmParam> params = v->params;
  for (auto& p : params) p.name = bind_through(p.name, sigma, scope);
  return v_abs(std::move(params), subst_decl(v->body, std::move(sigma)));
}

AdmTermPtr subst_term(const AdmTermPtr& t,
                      const std::map<Ident, Ident>& sigma) {
  switch (t->kind) {
    case AdmTermKind::Var: {
      auto it = sigma.find(t->var);
      return it == sigma.end() ? t : a_var(it->second);
    }
    case AdmTermKind::App: {
      std::vector<AdmTermPtr> parts;
      parts.reserve(t->parts.size());
      for (const auto& p : t->parts) parts.push_back(subst_term(p, sigma));
      return a_app(std::move(parts));
    }
    case AdmTermKind::Par:
      return a_par(subst_term(t->left, sigma), subst_term(t->right, sigma));
    case AdmTermKind::Hole:
      return t;
  }
  return t;
}

AdmDeclPtr subst_decl(const AdmDeclPtr& d, std::map<Ident, Ident> sigma) {
  if (sigma.empty()) return d;
  std::vector<AdmBinding> bindings;
  bindings.reserve(d->bindings.size());
  IdentSet scope;
  ai_decl(d, scope);
  for (const auto& b : d->bindings) {
    AdmValuePtr value = subst_value(b.value, sigma);
    Ident name = bind_through(b.name, sigma, scope);
    bindings.push_back(AdmBinding{b.usage, name, value});
  }
  return d_make(std::move(bindings), subst_term(d->body, sigma));
}

PiPtr subst_pi(const PiPtr& p, std::map<Ident, Ident> sigma) {
  if (sigma.empty()) return p;
  switch (p->kind) {
    case PiKind::Out: {
      Ident ch = p->channel;
      auto it = sigma.find(ch);
      if (it != sigma.end()) ch = it->second;
      std::vector<Ident> args = p->args;
      for (auto& a : args) {
        auto ia = sigma.find(a);
        if (ia != sigma.end()) a = ia->second;
      }
      return p_out(std::move(ch), std::move(args));
    }
    case PiKind::Par:
      return p_par(subst_pi(p->left, sigma), subst_pi(p->right, sigma));
    case PiKind::Nu: {
      IdentSet scope = all_idents(p);
      auto inner = sigma;
      Ident name = bind_through(p->name, inner, scope);
      std::optional<PiGuard> guard;
      if (p->guard) {
        auto gs = inner;
        std::vector<Ident> params = p->guard->params;
        for (auto& y : params) y = bind_through(y, gs, scope);
        guard = PiGuard{p->guard->replicated, name, std::move(params),
                        subst_pi(p->guard->body, std::move(gs))};
      }
      return p_nu(name, std::move(guard), subst_pi(p->rest, std::move(inner)));
    }
  }
  return p;
}

}  // namespace

LamPtr substitute(const LamPtr& t, const std::map<Ident, LamPtr>& sigma) {
  if (sigma.empty()) return t;
  for (const auto& [k, v] : sigma) {
    (void)k;
    if (!lam_is_value(v))
      throw Diag(Errc::SortMismatch, "lambda substitution requires values");
  }
  return subst_lam(t, sigma, lam_payload_fv(sigma));
}

AdmTermPtr substitute(const AdmTermPtr& t,
                      const std::map<Ident, Ident>& sigma) {
  return subst_term(t, sigma);
}

AdmValuePtr substitute(const AdmValuePtr& v,
                       const std::map<Ident, Ident>& sigma) {
  return subst_value(v, sigma);
}

AdmDeclPtr substitute(const AdmDeclPtr& d,
                      const std::map<Ident, Ident>& sigma) {
  return subst_decl(d, sigma);
}

PiPtr substitute(const PiPtr& p, const std::map<Ident, Ident>& sigma) {
  return subst_pi(p, sigma);
}

// ---------------------------------------------------------- alpha layer ---

namespace {

// Lockstep comparison under binder environments mapping each side's
// binders to shared levels.
struct AlphaEnv {
  std::map<Ident, int> left, right;
  int next = 0;

  int push(const Ident& l, const Ident& r, int& saved_l, int& saved_r,
           bool& had_l, bool& had_r) {
    auto il = left.find(l);
    had_l = il != left.end();
    if (had_l) saved_l = il->second;
    auto ir = right.find(r);
    had_r = ir != right.end();
    if (had_r) saved_r = ir->second;
    int lvl = next++;
    left[l] = lvl;
    right[r] = lvl;
    return lvl;
  }

  void pop(const Ident& l, const Ident& r, int saved_l, int saved_r,
           bool had_l, bool had_r) {
    if (had_l)
      left[l] = saved_l;
    else
      left.erase(l);
    if (had_r)
      right[r] = saved_r;
    else
      right.erase(r);
    next--;
  }

  bool var_eq(const Ident& l, const Ident& r) const {
    auto il = left.find(l);
    auto ir = right.find(r);
    if (il != left.end() || ir != right.end()) {
      return il != left.end() && ir != right.end() &&
             il->second == ir->second;
    }
    return l == r;  // both free
  }
};

// RAII binder scope for AlphaEnv.
struct AlphaScope {
  AlphaEnv& env;
  Ident l, r;
  int saved_l = 0, saved_r = 0;
  bool had_l = false, had_r = false;
  AlphaScope(AlphaEnv& env, const Ident& l, const Ident& r)
      : env(env), l(l), r(r) {
    env.push(l, r, saved_l, saved_r, had_l, had_r);
  }
  ~AlphaScope() { env.pop(l, r, saved_l, saved_r, had_l, had_r); }
};

bool aeq_lam(const LamPtr& a, const LamPtr& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case LamKind::Star:
      return true;
    case LamKind::Var:
      return env.var_eq(a->var, b->var);
    case LamKind::App:
    case LamKind::Par:
      return aeq_lam(a->a, b->a, env) && aeq_lam(a->b, b->b, env);
    case LamKind::Abs: {
      if (!type_equal(a->ann, b->ann)) return false;
      AlphaScope s(env, a->var, b->var);
      return aeq_lam(a->a, b->a, env);
    }
  }
  return false;
}

bool aeq_decl(const AdmDeclPtr& a, const AdmDeclPtr& b, AlphaEnv& env);

bool aeq_value(const AdmValuePtr& a, const AdmValuePtr& b, AlphaEnv& env) {
  if (a->star != b->star) return false;
  if (a->star) return true;
  if (a->params.size() != b->params.size()) return false;
  for (size_t i = 0; i < a->params.size(); ++i)
    if (!type_equal(a->params[i].ann, b->params[i].ann)) return false;
  std::vector<std::unique_ptr<AlphaScope>> scopes;
  for (size_t i = 0; i < a->params.size(); ++i)
    scopes.push_back(std::make_unique<AlphaScope>(env, a->params[i].name,
                                                  b->params[i].name));
  return aeq_decl(a->body, b->body, env);
}

bool aeq_term(const AdmTermPtr& a, const AdmTermPtr& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case AdmTermKind::Var:
      return env.var_eq(a->var, b->var);
    case AdmTermKind::Hole:
      return true;
    case AdmTermKind::App: {
      if (a->parts.size() != b->parts.size()) return false;
      for (size_t i = 0; i < a->parts.size(); ++i)
        if (!aeq_term(a->parts[i], b->parts[i], env)) return false;
      return true;
    }
    case AdmTermKind::Par:
      return aeq_term(a->left, b->left, env) &&
             aeq_term(a->right, b->right, env);
  }
  return false;
}

bool aeq_decl(const AdmDeclPtr& a, const AdmDeclPtr& b, AlphaEnv& env) {
  if (a->bindings.size() != b->bindings.size()) return false;
  std::vector<std::unique_ptr<AlphaScope>> scopes;
  for (size_t i = 0; i < a->bindings.size(); ++i) {
    const auto& ba = a->bindings[i];
    const auto& bb = b->bindings[i];
    if (ba.usage != bb.usage) return false;
    if (!aeq_value(ba.value, bb.value, env)) return false;
    scopes.push_back(std::make_unique<AlphaScope>(env, ba.name, bb.name));
  }
  return aeq_term(a->body, b->body, env);
}

bool aeq_pi(const PiPtr& a, const PiPtr& b, AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case PiKind::Out: {
      if (a->args.size() != b->args.size()) return false;
      if (!env.var_eq(a->channel, b->channel)) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!env.var_eq(a->args[i], b->args[i])) return false;
      return true;
    }
    case PiKind::Par:
      return aeq_pi(a->left, b->left, env) && aeq_pi(a->right, b->right, env);
    case PiKind::Nu: {
      if (a->guard.has_value() != b->guard.has_value()) return false;
      AlphaScope s(env, a->name, b->name);
      if (a->guard) {
        if (a->guard->replicated != b->guard->replicated) return false;
        if (a->guard->params.size() != b->guard->params.size()) return false;
        std::vector<std::unique_ptr<AlphaScope>> scopes;
        for (size_t i = 0; i < a->guard->params.size(); ++i)
          scopes.push_back(std::make_unique<AlphaScope>(
              env, a->guard->params[i], b->guard->params[i]));
        if (!aeq_pi(a->guard->body, b->guard->body, env)) return false;
      }
      return aeq_pi(a->rest, b->rest, env);
    }
  }
  return false;
}

}  // namespace

bool alpha_equal(const LamPtr& a, const LamPtr& b) {
  AlphaEnv env;
  return aeq_lam(a, b, env);
}

bool alpha_equal(const AdmDeclPtr& a, const AdmDeclPtr& b) {
  AlphaEnv env;
  return aeq_decl(a, b, env);
}

bool alpha_equal(const AdmValuePtr& a, const AdmValuePtr& b) {
  AlphaEnv env;
  return aeq_value(a, b, env);
}

bool alpha_equal(const PiPtr& a, const PiPtr& b) {
  AlphaEnv env;
  return aeq_pi(a, b, env);
}

bool alpha_equal(const AnyTerm& a, const AnyTerm& b) {
  if (a.calc != b.calc) return false;
  if (a.lam && b.lam) return alpha_equal(a.lam, b.lam);
  if (a.adm && b.adm) return alpha_equal(a.adm, b.adm);
  if (a.pi && b.pi) return alpha_equal(a.pi, b.pi);
  return false;
}

// ------------------------------------------------- canonical renaming ---

namespace {

// Canonical binder names are v_1, v_2, ... in walk order, skipping any
// index that would collide with a free name of the whole term.
struct CanonSupply {
  IdentSet frees;
  uint32_t counter = 1;

  Ident next() {
    while (frees.count(Ident{"v", counter})) counter++;
    return Ident{"v", counter++};
  }
};

using Renaming = std::map<Ident, Ident>;

Ident ren_lookup(const Renaming& env, const Ident& x) {
  auto it = env.find(x);
  return it == env.end() ? x : it->second;
}

LamPtr canon_lam_rec(const LamPtr& t, Renaming& env, CanonSupply& supply) {
  switch (t->kind) {
    case LamKind::Star:
      return t;
    case LamKind::Var:
      return l_var(ren_lookup(env, t->var));
    case LamKind::App: {
      auto f = canon_lam_rec(t->a, env, supply);
      auto x = canon_lam_rec(t->b, env, supply);
      return l_app(std::move(f), std::move(x));
    }
    case LamKind::Par: {
      auto l = canon_lam_rec(t->a, env, supply);
      auto r = canon_lam_rec(t->b, env, supply);
      return l_par(std::move(l), std::move(r));
    }
    case LamKind::Abs: {
      Ident fresh = supply.next();
      auto saved = env.find(t->var);
      bool had = saved != env.end();
      Ident old{};
      if (had) old = saved->second;
      env[t->var] = fresh;
      auto body = canon_lam_rec(t->a, env, supply);
      if (had)
        env[t->var] = old;
      else
        env.erase(t->var);
      return l_abs(fresh, t->ann, std::move(body));
    }
  }
  return t;
}

AdmDeclPtr canon_decl_rec(const AdmDeclPtr& d, Renaming& env,
                          CanonSupply& supply);

AdmValuePtr canon_value_rec(const AdmValuePtr& v, Renaming& env,
                            CanonSupply& supply) {
  if (v->star) return v;
  std::vector<AdmParam> params;
  params.reserve(v->params.size());
  std::vector<std::pair<Ident, std::optional<Ident>>> saved;
  for (const auto& p : v->params) {
    Ident fresh = supply.next();
    auto it = env.find(p.name);
    saved.emplace_back(p.name, it == env.end()
                                   ? std::nullopt
                                   : std::optional<Ident>(it->second));
    env[p.name] = fresh;
    params.push_back(AdmParam{fresh, p.ann});
  }
  auto body = canon_decl_rec(v->body, env, supply);
  for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
    if (it->second)
      env[it->first] = *it->second;
    else
      env.erase(it->first);
  }
  return v_abs(std::move(params), std::move(body));
}

AdmTermPtr canon_term_rec(const AdmTermPtr& t, Renaming& env,
                          CanonSupply& supply) {
  switch (t->kind) {
    case AdmTermKind::Var:
      return a_var(ren_lookup(env, t->var));
    case AdmTermKind::Hole:
      return t;
    case AdmTermKind::App: {
      std::vector<AdmTermPtr> parts;
      parts.reserve(t->parts.size());
      for (const auto& p : t->parts)
        parts.push_back(canon_term_rec(p, env, supply));
      return a_app(std::move(parts));
    }
    case AdmTermKind::Par: {
      auto l = canon_term_rec(t->left, env, supply);
      auto r = canon_term_rec(t->right, env, supply);
      return a_par(std::move(l), std::move(r));
    }
  }
  return t;
}

AdmDeclPtr canon_decl_rec(const AdmDeclPtr& d, Renaming& env,
                          CanonSupply& supply) {
  std::vector<AdmBinding> bindings;
  bindings.reserve(d->bindings.size());
  std::vector<std::pair<Ident, std::optional<Ident>>> saved;
  for (const auto& b : d->bindings) {
    auto value = canon_value_rec(b.value, env, supply);
    Ident fresh = supply.next();
    auto it = env.find(b.name);
    saved.emplace_back(b.name, it == env.end()
                                   ? std::nullopt
                                   : std::optional<Ident>(it->second));
    env[b.name] = fresh;
    bindings.push_back(AdmBinding{b.usage, fresh, std::move(value)});
  }
  auto body = canon_term_rec(d->body, env, supply);
  for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
    if (it->second)
      env[it->first] = *it->second;
    else
      env.erase(it->first);
  }
  return d_make(std::move(bindings), std::move(body));
}

PiPtr canon_pi_rec(const PiPtr& p, Renaming& env, CanonSupply& supply) {
  switch (p->kind) {
    case PiKind::Out: {
      std::vector<Ident> args;
      args.reserve(p->args.size());
      for (const auto& a : p->args) args.push_back(ren_lookup(env, a));
      return p_out(ren_lookup(env, p->channel), std::move(args));
    }
    case PiKind::Par: {
      auto l = canon_pi_rec(p->left, env, supply);
      auto r = canon_pi_rec(p->right, env, supply);
      return p_par(std::move(l), std::move(r));
    }
    case PiKind::Nu: {
      Ident fresh = supply.next();
      auto it = env.find(p->name);
      std::optional<Ident> savedv =
          it == env.end() ? std::nullopt : std::optional<Ident>(it->second);
      env[p->name] = fresh;
      std::optional<PiGuard> guard;
      if (p->guard) {
        std::vector<Ident> params;
        std::vector<std::pair<Ident, std::optional<Ident>>> saved;
        for (const auto& y : p->guard->params) {
          Ident fy = supply.next();
          auto iy = env.find(y);
          saved.emplace_back(
              y, iy == env.end() ? std::nullopt
                                 : std::optional<Ident>(iy->second));
          env[y] = fy;
          params.push_back(fy);
        }
        auto body = canon_pi_rec(p->guard->body, env, supply);
        for (auto is = saved.rbegin(); is != saved.rend(); ++is) {
          if (is->second)
            env[is->first] = *is->second;
          else
            env.erase(is->first);
        }
        guard = PiGuard{p->guard->replicated, fresh, std::move(params),
                        std::move(body)};
      }
      auto rest = canon_pi_rec(p->rest, env, supply);
      if (savedv)
        env[p->name] = *savedv;
      else
        env.erase(p->name);
      return p_nu(fresh, std::move(guard), std::move(rest));
    }
  }
  return p;
}

AdmDeclPtr alpha_canon(const AdmDeclPtr& d) {
  CanonSupply supply{free_vars(d)};
  Renaming env;
  return canon_decl_rec(d, env, supply);
}

PiPtr alpha_canon(const PiPtr& p) {
  CanonSupply supply{free_vars(p)};
  Renaming env;
  return canon_pi_rec(p, env, supply);
}

}  // namespace

LamPtr alpha_normalize(const LamPtr& t) {
  CanonSupply supply{free_vars(t)};
  Renaming env;
  return canon_lam_rec(t, env, supply);
}

// --------------------------------------------------------- rename apart ---

namespace {

struct ApartState {
  IdentSet used;

  Ident admit(const Ident& x, Renaming& env) {
    if (!used.count(x)) {
      used.insert(x);
      env.erase(x);
      return x;
    }
    Ident fresh = avoid_collision(x, used);
    used.insert(fresh);
    env[x] = fresh;
    return fresh;
  }
};

LamPtr apart_lam(const LamPtr& t, Renaming env, ApartState& st) {
  switch (t->kind) {
    case LamKind::Star:
      return t;
    case LamKind::Var:
      return l_var(ren_lookup(env, t->var));
    case LamKind::App:
      return l_app(apart_lam(t->a, env, st), apart_lam(t->b, env, st));
    case LamKind::Par:
      return l_par(apart_lam(t->a, env, st), apart_lam(t->b, env, st));
    case LamKind::Abs: {
      Ident x = st.admit(t->var, env);
      return l_abs(x, t->ann, apart_lam(t->a, std::move(env), st));
    }
  }
  return t;
}

AdmDeclPtr apart_decl(const AdmDeclPtr& d, Renaming env, ApartState& st);

AdmValuePtr apart_value(const AdmValuePtr& v, Renaming env, ApartState& st) {
  if (v->star) return v;
  std::vector<AdmParam> params;
  params.reserve(v->params.size());
  for (const auto& p : v->params)
    params.push_back(AdmParam{st.admit(p.name, env), p.ann});
  return v_abs(std::move(params), apart_decl(v->body, std::move(env), st));
}

AdmTermPtr apart_term(const AdmTermPtr& t, const Renaming& env) {
  return subst_term(t, env);
}

AdmDeclPtr apart_decl(const AdmDeclPtr& d, Renaming env, ApartState& st) {
  std::vector<AdmBinding> bindings;
  bindings.reserve(d->bindings.size());
  for (const auto& b : d->bindings) {
    auto value = apart_value(b.value, env, st);
    Ident name = st.admit(b.name, env);
    bindings.push_back(AdmBinding{b.usage, name, std::move(value)});
  }
  return d_make(std::move(bindings), apart_term(d->body, env));
}

PiPtr apart_pi(const PiPtr& p, Renaming env, ApartState& st) {
  switch (p->kind) {
    case PiKind::Out: {
      std::vector<Ident> args;
      args.reserve(p->args.size());
      for (const auto& a : p->args) args.push_back(ren_lookup(env, a));
      return p_out(ren_lookup(env, p->channel), std::move(args));
    }
    case PiKind::Par:
      return p_par(apart_pi(p->left, env, st), apart_pi(p->right, env, st));
    case PiKind::Nu: {
      Ident name = st.admit(p->name, env);
      std::optional<PiGuard> guard;
      if (p->guard) {
        Renaming genv = env;
        std::vector<Ident> params;
        for (const auto& y : p->guard->params)
          params.push_back(st.admit(y, genv));
        guard = PiGuard{p->guard->replicated, name, std::move(params),
                        apart_pi(p->guard->body, std::move(genv), st)};
      }
      return p_nu(name, std::move(guard), apart_pi(p->rest, std::move(env), st));
    }
  }
  return p;
}

}  // namespace

namespace {
IdentSet with_extra(IdentSet base, const IdentSet& extra) {
  base.insert(extra.begin(), extra.end());
  return base;
}
}  // namespace

LamPtr rename_apart(const LamPtr& t, const IdentSet& extra_taken) {
  ApartState st{with_extra(free_vars(t), extra_taken)};
  return apart_lam(t, {}, st);
}

AdmDeclPtr rename_apart(const AdmDeclPtr& d, const IdentSet& extra_taken) {
  ApartState st{with_extra(free_vars(d), extra_taken)};
  return apart_decl(d, {}, st);
}

PiPtr rename_apart(const PiPtr& p, const IdentSet& extra_taken) {
  ApartState st{with_extra(free_vars(p), extra_taken)};
  return apart_pi(p, {}, st);
}

// ------------------------------------------------- structural congruence ---

namespace {

bool has_duplicate_binders(const AdmDeclPtr& d, IdentSet& seen) {
  for (const auto& b : d->bindings) {
    if (!b.value->star) {
      for (const auto& p : b.value->params)
        if (!seen.insert(p.name).second) return true;
      if (has_duplicate_binders(b.value->body, seen)) return true;
    }
    if (!seen.insert(b.name).second) return true;
  }
  return false;
}

// A binder colliding with a free name or another binder defeats the
// positional bookkeeping below, so freshen first.
bool needs_apart(const AdmDeclPtr& d) {
  IdentSet probe = free_vars(d);
  return has_duplicate_binders(d, probe);
}

// Free occurrences in pre-order (duplicates kept); used to define the
// canonical binding order.
void occ_term(const AdmTermPtr& t, const IdentSet& shadow,
              std::vector<Ident>& out) {
  switch (t->kind) {
    case AdmTermKind::Var:
      if (!shadow.count(t->var)) out.push_back(t->var);
      return;
    case AdmTermKind::Hole:
      return;
    case AdmTermKind::App:
      for (const auto& p : t->parts) occ_term(p, shadow, out);
      return;
    case AdmTermKind::Par:
      occ_term(t->left, shadow, out);
      occ_term(t->right, shadow, out);
      return;
  }
}

void occ_decl(const AdmDeclPtr& d, IdentSet shadow, std::vector<Ident>& out);

void occ_value(const AdmValuePtr& v, IdentSet shadow,
               std::vector<Ident>& out) {
  if (v->star) return;
  for (const auto& p : v->params) shadow.insert(p.name);
  occ_decl(v->body, std::move(shadow), out);
}

void occ_decl(const AdmDeclPtr& d, IdentSet shadow, std::vector<Ident>& out) {
  for (const auto& b : d->bindings) {
    occ_value(b.value, shadow, out);
    shadow.insert(b.name);
  }
  occ_term(d->body, shadow, out);
}

// Canonical order of a well-scoped prefix: walk the body first, then
// each needed value, emitting a binding only after the bindings its
// value depends on.
std::vector<size_t> canonical_order(const std::vector<AdmBinding>& bs,
                                    const std::vector<std::vector<Ident>>& vocc,
                                    const std::vector<Ident>& bodyocc) {
  std::map<Ident, size_t> pos;
  for (size_t i = 0; i < bs.size(); ++i) pos[bs[i].name] = i;
  std::vector<bool> emitted(bs.size(), false);
  std::vector<size_t> order;
  order.reserve(bs.size());

  std::function<void(size_t)> visit = [&](size_t i) {
    if (emitted[i]) return;
    emitted[i] = true;  // dependencies point strictly earlier, no cycles
    for (const auto& y : vocc[i]) {
      auto it = pos.find(y);
      if (it != pos.end() && it->second < i && !emitted[it->second])
        visit(it->second);
    }
    order.push_back(i);
  };

  for (const auto& y : bodyocc) {
    auto it = pos.find(y);
    if (it != pos.end() && !emitted[it->second]) visit(it->second);
  }
  for (size_t i = 0; i < bs.size(); ++i)
    if (!emitted[i]) visit(i);
  return order;
}

struct AdmNormalizer {
  std::vector<CongruenceStep>* trace;

  AdmDeclPtr decl(const AdmDeclPtr& d, Path at) {
    // Normalize inside values first so erasure sees the final free
    // names.
    std::vector<AdmBinding> bs;
    bs.reserve(d->bindings.size());
    for (size_t i = 0; i < d->bindings.size(); ++i) {
      const auto& b = d->bindings[i];
      if (b.value->star) {
        bs.push_back(b);
      } else {
        Path vp = at;
        vp.push_back({Sel::BindingValue, static_cast<int>(i)});
        vp.push_back({Sel::ValueBody, 0});
        bs.push_back(AdmBinding{b.usage, b.name,
                                v_abs(b.value->params, decl(b.value->body, vp))});
      }
    }
    AdmTermPtr body = d->body;

    // (eq2): erase a binding whose name is unused in the remainder.
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < bs.size(); ++i) {
        IdentSet rest_fv;
        {
          std::vector<AdmBinding> rest(bs.begin() + i + 1, bs.end());
          fv_decl(d_make(std::move(rest), body), {}, rest_fv);
        }
        if (!rest_fv.count(bs[i].name)) {
          if (trace)
            trace->push_back(
                {CongruenceStep::EraseBinding, at, static_cast<int>(i)});
          bs.erase(bs.begin() + i);
          changed = true;
          break;
        }
      }
    }

    // (eq1): bubble the surviving bindings into canonical order.
    std::vector<std::vector<Ident>> vocc(bs.size());
    for (size_t i = 0; i < bs.size(); ++i) occ_value(bs[i].value, {}, vocc[i]);
    std::vector<Ident> bodyocc;
    occ_term(body, {}, bodyocc);
    std::vector<size_t> target = canonical_order(bs, vocc, bodyocc);
    std::vector<size_t> rank(bs.size());
    for (size_t k = 0; k < target.size(); ++k) rank[target[k]] = k;

    std::vector<size_t> cur(bs.size());
    for (size_t i = 0; i < bs.size(); ++i) cur[i] = i;
    bool swapped = true;
    while (swapped) {
      swapped = false;
      for (size_t i = 0; i + 1 < cur.size(); ++i) {
        if (rank[cur[i]] > rank[cur[i + 1]]) {
          // Mutual independence is forced: a dependency fixes the pair's
          // relative order in both the source and the target.
          IdentSet fv_next;
          fv_value(bs[cur[i + 1]].value, {}, fv_next);
          assert(!fv_next.count(bs[cur[i]].name));
          std::swap(cur[i], cur[i + 1]);
          if (trace)
            trace->push_back(
                {CongruenceStep::SwapBindings, at, static_cast<int>(i)});
          swapped = true;
        }
      }
    }

    std::vector<AdmBinding> ordered;
    ordered.reserve(bs.size());
    for (size_t i : cur) ordered.push_back(bs[i]);
    return d_make(std::move(ordered), body);
  }
};

// ---- pi congruence, on the restriction spine ----

struct PiItem {
  Ident name;
  std::optional<PiGuard> guard;
};

void pi_decompose(const PiPtr& p, std::vector<PiItem>& spine, PiPtr& tree) {
  if (p->kind == PiKind::Nu) {
    spine.push_back(PiItem{p->name, p->guard});
    pi_decompose(p->rest, spine, tree);
  } else {
    tree = p;
  }
}

PiPtr pi_rebuild(const std::vector<PiItem>& spine, const PiPtr& tree) {
  PiPtr out = tree;
  for (auto it = spine.rbegin(); it != spine.rend(); ++it)
    out = p_nu(it->name, it->guard, out);
  return out;
}

void occ_pi(const PiPtr& p, IdentSet shadow, std::vector<Ident>& out) {
  switch (p->kind) {
    case PiKind::Out:
      if (!shadow.count(p->channel)) out.push_back(p->channel);
      for (const auto& a : p->args)
        if (!shadow.count(a)) out.push_back(a);
      return;
    case PiKind::Par:
      occ_pi(p->left, shadow, out);
      occ_pi(p->right, shadow, out);
      return;
    case PiKind::Nu: {
      IdentSet inner = shadow;
      inner.insert(p->name);
      if (p->guard) {
        IdentSet gsh = inner;
        for (const auto& y : p->guard->params) gsh.insert(y);
        occ_pi(p->guard->body, gsh, out);
      }
      occ_pi(p->rest, inner, out);
      return;
    }
  }
}

struct PiNormalizer {
  std::vector<CongruenceStep>* trace;

  PiPtr proc(const PiPtr& p, Path at) {
    std::vector<PiItem> spine;
    PiPtr tree;
    pi_decompose(p, spine, tree);

    // Normalize guard bodies first.
    for (size_t i = 0; i < spine.size(); ++i) {
      if (spine[i].guard) {
        Path gp = at;
        gp.push_back({Sel::BindingValue, static_cast<int>(i)});
        gp.push_back({Sel::GuardBody, 0});
        spine[i].guard->body = proc(spine[i].guard->body, gp);
      }
    }

    // (eq2): drop restrictions unused by their continuation.
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t i = 0; i < spine.size(); ++i) {
        std::vector<PiItem> rest(spine.begin() + i + 1, spine.end());
        IdentSet rest_fv = free_vars(pi_rebuild(rest, tree));
        if (!rest_fv.count(spine[i].name)) {
          if (trace)
            trace->push_back(
                {CongruenceStep::EraseBinding, at, static_cast<int>(i)});
          spine.erase(spine.begin() + i);
          changed = true;
          break;
        }
      }
    }

    // (eq1): canonical order, mirroring the administrative prefix.
    std::map<Ident, size_t> pos;
    for (size_t i = 0; i < spine.size(); ++i) pos[spine[i].name] = i;
    std::vector<std::vector<Ident>> vocc(spine.size());
    for (size_t i = 0; i < spine.size(); ++i) {
      if (spine[i].guard) {
        IdentSet sh{spine[i].name};
        for (const auto& y : spine[i].guard->params) sh.insert(y);
        occ_pi(spine[i].guard->body, sh, vocc[i]);
      }
    }
    std::vector<Ident> bodyocc;
    occ_pi(tree, {}, bodyocc);

    std::vector<bool> emitted(spine.size(), false);
    std::vector<size_t> order;
    std::function<void(size_t)> visit = [&](size_t i) {
      if (emitted[i]) return;
      emitted[i] = true;
      for (const auto& y : vocc[i]) {
        auto it = pos.find(y);
        if (it != pos.end() && it->second < i && !emitted[it->second])
          visit(it->second);
      }
      order.push_back(i);
    };
    for (const auto& y : bodyocc) {
      auto it = pos.find(y);
      if (it != pos.end() && !emitted[it->second]) visit(it->second);
    }
    for (size_t i = 0; i < spine.size(); ++i)
      if (!emitted[i]) visit(i);

    std::vector<size_t> rank(spine.size());
    for (size_t k = 0; k < order.size(); ++k) rank[order[k]] = k;
    std::vector<size_t> cur(spine.size());
    for (size_t i = 0; i < spine.size(); ++i) cur[i] = i;
    bool swapped = true;
    while (swapped) {
      swapped = false;
      for (size_t i = 0; i + 1 < cur.size(); ++i) {
        if (rank[cur[i]] > rank[cur[i + 1]]) {
          std::swap(cur[i], cur[i + 1]);
          if (trace)
            trace->push_back(
                {CongruenceStep::SwapBindings, at, static_cast<int>(i)});
          swapped = true;
        }
      }
    }

    std::vector<PiItem> ordered;
    ordered.reserve(spine.size());
    for (size_t i : cur) ordered.push_back(spine[i]);
    return pi_rebuild(ordered, tree);
  }
};

}  // namespace

AdmDeclPtr normalize_congruence(const AdmDeclPtr& d,
                                std::vector<CongruenceStep>* trace) {
  AdmDeclPtr start = d;
  if (needs_apart(d)) {
    start = rename_apart(d);
    if (trace) trace->push_back({CongruenceStep::AlphaNormalize, {}, 1});
  }
  AdmNormalizer n{trace};
  AdmDeclPtr mid = n.decl(start, {});
  if (trace) trace->push_back({CongruenceStep::AlphaNormalize, {}, 0});
  return alpha_canon(mid);
}

PiPtr normalize_congruence(const PiPtr& p, std::vector<CongruenceStep>* trace) {
  PiNormalizer n{trace};
  PiPtr mid = n.proc(rename_apart(p), {});
  if (trace) trace->push_back({CongruenceStep::AlphaNormalize, {}, 0});
  return alpha_canon(mid);
}

AnyTerm normalize_congruence(const AnyTerm& t) {
  AnyTerm out = t;
  if (t.lam) out.lam = alpha_normalize(t.lam);
  if (t.adm) out.adm = normalize_congruence(t.adm);
  if (t.pi) out.pi = normalize_congruence(t.pi);
  return out;
}

bool congruent(const AdmDeclPtr& a, const AdmDeclPtr& b) {
  return alpha_equal(normalize_congruence(a), normalize_congruence(b));
}

bool congruent(const PiPtr& a, const PiPtr& b) {
  return alpha_equal(normalize_congruence(a), normalize_congruence(b));
}

namespace {

AdmDeclPtr step_at_path(const AdmDeclPtr& d, const Path& at, size_t from,
                        const std::function<AdmDeclPtr(const AdmDeclPtr&)>& f) {
  if (from == at.size()) return f(d);
  // Paths into nested declarations go through a binding value.
  assert(at[from].sel == Sel::BindingValue && from + 1 < at.size() &&
         at[from + 1].sel == Sel::ValueBody);
  size_t idx = static_cast<size_t>(at[from].index);
  assert(idx < d->bindings.size() && !d->bindings[idx].value->star);
  auto bs = d->bindings;
  const auto& v = bs[idx].value;
  bs[idx].value =
      v_abs(v->params, step_at_path(v->body, at, from + 2, f));
  return d_make(std::move(bs), d->body);
}

}  // namespace

AdmDeclPtr apply_congruence_step(const AdmDeclPtr& d,
                                 const CongruenceStep& s) {
  switch (s.kind) {
    case CongruenceStep::AlphaNormalize:
      return s.index == 1 ? rename_apart(d) : alpha_canon(d);
    case CongruenceStep::EraseBinding:
      return step_at_path(d, s.at, 0, [&](const AdmDeclPtr& x) {
        size_t i = static_cast<size_t>(s.index);
        if (i >= x->bindings.size())
          throw Diag(Errc::BadArgument, "erase index out of range");
        std::vector<AdmBinding> rest(x->bindings.begin() + i + 1,
                                     x->bindings.end());
        IdentSet fv = free_vars(d_make(std::move(rest), x->body));
        if (fv.count(x->bindings[i].name))
          throw Diag(Errc::BadArgument, "eq2 side condition violated");
        auto bs = x->bindings;
        bs.erase(bs.begin() + i);
        return d_make(std::move(bs), x->body);
      });
    case CongruenceStep::SwapBindings:
      return step_at_path(d, s.at, 0, [&](const AdmDeclPtr& x) {
        size_t i = static_cast<size_t>(s.index);
        if (i + 1 >= x->bindings.size())
          throw Diag(Errc::BadArgument, "swap index out of range");
        IdentSet fv_r = free_vars(x->bindings[i + 1].value);
        IdentSet fv_l = free_vars(x->bindings[i].value);
        if (fv_r.count(x->bindings[i].name) ||
            fv_l.count(x->bindings[i + 1].name))
          throw Diag(Errc::BadArgument, "eq1 side condition violated");
        auto bs = x->bindings;
        std::swap(bs[i], bs[i + 1]);
        return d_make(std::move(bs), x->body);
      });
  }
  return d;
}

// -------------------------------------------------------------- desugar ---

namespace {

// Renames the prefix binders of `d` away from `avoid`, updating `avoid`
// with the names finally used.
AdmDeclPtr hoistable_copy(const AdmDeclPtr& d, IdentSet& avoid) {
  std::map<Ident, Ident> ren;
  std::vector<AdmBinding> bs;
  bs.reserve(d->bindings.size());
  for (const auto& b : d->bindings) {
    AdmValuePtr value = subst_value(b.value, ren);
    Ident name = b.name;
    if (avoid.count(name)) {
      name = avoid_collision(name, avoid);
      ren[b.name] = name;
    } else {
      ren.erase(b.name);
    }
    avoid.insert(name);
    bs.push_back(AdmBinding{b.usage, name, std::move(value)});
  }
  return d_make(std::move(bs), subst_term(d->body, ren));
}

int count_holes(const AdmTermPtr& t) {
  switch (t->kind) {
    case AdmTermKind::Hole:
      return 1;
    case AdmTermKind::Var:
      return 0;
    case AdmTermKind::App: {
      int n = 0;
      for (const auto& p : t->parts) n += count_holes(p);
      return n;
    }
    case AdmTermKind::Par:
      return count_holes(t->left) + count_holes(t->right);
  }
  return 0;
}

AdmTermPtr fill_hole(const AdmTermPtr& t, const AdmTermPtr& with) {
  switch (t->kind) {
    case AdmTermKind::Hole:
      return with;
    case AdmTermKind::Var:
      return t;
    case AdmTermKind::App: {
      std::vector<AdmTermPtr> parts;
      parts.reserve(t->parts.size());
      for (const auto& p : t->parts) parts.push_back(fill_hole(p, with));
      return a_app(std::move(parts));
    }
    case AdmTermKind::Par:
      return a_par(fill_hole(t->left, with), fill_hole(t->right, with));
  }
  return t;
}

}  // namespace

AdmDeclPtr apply_declarations(const AdmDeclPtr& fn,
                              const std::vector<AdmDeclPtr>& args) {
  if (args.empty()) return fn;
  IdentSet avoid;
  ai_decl(fn, avoid);
  for (const auto& a : args) ai_decl(a, avoid);

  std::vector<AdmBinding> bindings;
  std::vector<AdmTermPtr> parts;
  auto push = [&](const AdmDeclPtr& d) {
    AdmDeclPtr lifted = hoistable_copy(d, avoid);
    for (const auto& b : lifted->bindings) bindings.push_back(b);
    parts.push_back(lifted->body);
  };
  push(fn);
  for (const auto& a : args) push(a);
  return d_make(std::move(bindings), a_app(std::move(parts)));
}

AdmDeclPtr par_declarations(const AdmDeclPtr& left, const AdmDeclPtr& right) {
  IdentSet avoid;
  ai_decl(left, avoid);
  ai_decl(right, avoid);
  AdmDeclPtr l = hoistable_copy(left, avoid);
  AdmDeclPtr r = hoistable_copy(right, avoid);
  std::vector<AdmBinding> bindings = l->bindings;
  for (const auto& b : r->bindings) bindings.push_back(b);
  return d_make(std::move(bindings), a_par(l->body, r->body));
}

AdmDeclPtr plug_declaration(const AdmDeclPtr& context, const AdmDeclPtr& d) {
  if (count_holes(context->body) != 1)
    throw Diag(Errc::BadArgument, "context must contain exactly one hole");
  IdentSet dfv = free_vars(d);
  for (const auto& b : context->bindings)
    if (dfv.count(b.name))
      throw Diag(Errc::BadArgument,
                 "context prefix name " + show(b.name) +
                     " occurs free in the plugged declaration");

  IdentSet avoid;
  ai_decl(context, avoid);
  ai_decl(d, avoid);
  // Hoist d's prefix above the context's prefix.
  AdmDeclPtr lifted = hoistable_copy(d, avoid);
  std::vector<AdmBinding> bindings = lifted->bindings;
  for (const auto& b : context->bindings) bindings.push_back(b);
  return d_make(std::move(bindings), fill_hole(context->body, lifted->body));
}

}  // namespace picomp
