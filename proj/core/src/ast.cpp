#include "sill/ast.hpp"

#include <set>

namespace sill {

// --- FunType factories ------------------------------------------------------

FunTypePtr FunType::mk_base(BaseType b) {
  auto t = std::make_shared<FunType>();
  t->kind = Kind::Base;
  t->base = b;
  return t;
}
FunTypePtr FunType::mk_prod(FunTypePtr l, FunTypePtr r) {
  auto t = std::make_shared<FunType>();
  t->kind = Kind::Prod;
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}
FunTypePtr FunType::mk_sum(FunTypePtr l, FunTypePtr r) {
  auto t = std::make_shared<FunType>();
  t->kind = Kind::Sum;
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}
FunTypePtr FunType::mk_proc(ProcInterface iface) {
  auto t = std::make_shared<FunType>();
  t->kind = Kind::Proc;
  t->proc = std::make_shared<ProcInterface>(std::move(iface));
  return t;
}

std::string base_type_name(BaseType b) {
  switch (b) {
  case BaseType::Unit: return "unit";
  case BaseType::Bool: return "bool";
  case BaseType::Int: return "int";
  }
  return "?";
}

// --- SessionType factories ---------------------------------------------------

static std::shared_ptr<SessionType> st(SessionType::Kind k) {
  auto t = std::make_shared<SessionType>();
  t->kind = k;
  return t;
}

TypePtr SessionType::mk_var(std::string name, SourceSpan sp) {
  auto t = st(Kind::Var);
  t->var = std::move(name);
  t->span = sp;
  return t;
}
TypePtr SessionType::mk_valin(FunTypePtr b, TypePtr a) {
  auto t = st(Kind::ValIn);
  t->value = std::move(b);
  t->cont = std::move(a);
  return t;
}
TypePtr SessionType::mk_valout(FunTypePtr b, TypePtr a) {
  auto t = st(Kind::ValOut);
  t->value = std::move(b);
  t->cont = std::move(a);
  return t;
}
TypePtr SessionType::mk_chanin(TypePtr arg, TypePtr cont) {
  auto t = st(Kind::ChanIn);
  t->arg = std::move(arg);
  t->cont = std::move(cont);
  return t;
}
TypePtr SessionType::mk_chanout(TypePtr arg, TypePtr cont) {
  auto t = st(Kind::ChanOut);
  t->arg = std::move(arg);
  t->cont = std::move(cont);
  return t;
}
TypePtr SessionType::mk_ext(std::map<std::string, TypePtr> bs) {
  auto t = st(Kind::Ext);
  t->branches = std::move(bs);
  return t;
}
TypePtr SessionType::mk_int(std::map<std::string, TypePtr> bs) {
  auto t = st(Kind::Int);
  t->branches = std::move(bs);
  return t;
}
TypePtr SessionType::mk_one() { return st(Kind::One); }
TypePtr SessionType::mk_get(Rat q, TypePtr cont, int site) {
  auto t = st(Kind::Get);
  t->q = std::move(q);
  t->cont = std::move(cont);
  t->ann_site = site;
  return t;
}
TypePtr SessionType::mk_pay(Rat q, TypePtr cont, int site) {
  auto t = st(Kind::Pay);
  t->q = std::move(q);
  t->cont = std::move(cont);
  t->ann_site = site;
  return t;
}

// --- HValue / Skeleton factories ---------------------------------------------

static std::shared_ptr<HValue> hv(HValue::Kind k) {
  auto h = std::make_shared<HValue>();
  h->kind = k;
  return h;
}
HPtr HValue::mk_var(std::string name) {
  auto h = hv(Kind::Var);
  h->var = std::move(name);
  return h;
}
HPtr HValue::mk_unit() { return hv(Kind::Unit); }
HPtr HValue::mk_bool(bool b) {
  auto h = hv(Kind::Bool);
  h->bval = b;
  return h;
}
HPtr HValue::mk_int(BigInt v) {
  auto h = hv(Kind::Int);
  h->ival = std::move(v);
  return h;
}
HPtr HValue::mk_pair(HPtr l, HPtr r) {
  auto h = hv(Kind::Pair);
  h->left = std::move(l);
  h->right = std::move(r);
  return h;
}
HPtr HValue::mk_inl(HPtr v) {
  auto h = hv(Kind::Inl);
  h->left = std::move(v);
  return h;
}
HPtr HValue::mk_inr(HPtr v) {
  auto h = hv(Kind::Inr);
  h->left = std::move(v);
  return h;
}

static std::shared_ptr<Skeleton> sk(Skeleton::Kind k) {
  auto s = std::make_shared<Skeleton>();
  s->kind = k;
  return s;
}
SkelPtr Skeleton::mk_var(std::string name, SourceSpan sp) {
  auto s = sk(Kind::Var);
  s->var = std::move(name);
  s->span = sp;
  return s;
}
SkelPtr Skeleton::mk_valin_world(HPtr h, SkelPtr k) {
  auto s = sk(Kind::ValInWorld);
  s->hval = std::move(h);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_valin_proc(FunTypePtr b, SkelPtr k) {
  auto s = sk(Kind::ValInProc);
  s->value = std::move(b);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_valout_proc(FunTypePtr b, SkelPtr k) {
  auto s = sk(Kind::ValOutProc);
  s->value = std::move(b);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_valout_world(HPtr h, SkelPtr k) {
  auto s = sk(Kind::ValOutWorld);
  s->hval = std::move(h);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_chanin(SkelPtr a, SkelPtr k) {
  auto s = sk(Kind::ChanIn);
  s->arg = std::move(a);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_chanout(SkelPtr a, SkelPtr k) {
  auto s = sk(Kind::ChanOut);
  s->arg = std::move(a);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_ext(std::map<std::string, SkelPtr> bs) {
  auto s = sk(Kind::Ext);
  s->branches = std::move(bs);
  return s;
}
SkelPtr Skeleton::mk_ext_world(std::string x, std::map<std::string, SkelPtr> bs) {
  auto s = sk(Kind::ExtWorld);
  s->choice_var = std::move(x);
  s->branches = std::move(bs);
  return s;
}
SkelPtr Skeleton::mk_int(std::map<std::string, SkelPtr> bs) {
  auto s = sk(Kind::Int);
  s->branches = std::move(bs);
  return s;
}
SkelPtr Skeleton::mk_int_world(std::string x, std::map<std::string, SkelPtr> bs) {
  auto s = sk(Kind::IntWorld);
  s->choice_var = std::move(x);
  s->branches = std::move(bs);
  return s;
}
SkelPtr Skeleton::mk_one() { return sk(Kind::One); }
SkelPtr Skeleton::mk_get(Rat q, SkelPtr k) {
  auto s = sk(Kind::Get);
  s->q = std::move(q);
  s->cont = std::move(k);
  return s;
}
SkelPtr Skeleton::mk_pay(Rat q, SkelPtr k) {
  auto s = sk(Kind::Pay);
  s->q = std::move(q);
  s->cont = std::move(k);
  return s;
}

Side flip(Side s) {
  return s == Side::ProcProvides ? Side::WorldProvides : Side::ProcProvides;
}

// --- FunTerm factories --------------------------------------------------------

static std::shared_ptr<FunTerm> ft(FunTerm::Kind k) {
  auto t = std::make_shared<FunTerm>();
  t->kind = k;
  return t;
}
FunPtr FunTerm::mk_var(std::string n, SourceSpan sp) {
  auto t = ft(Kind::Var);
  t->name = std::move(n);
  t->span = sp;
  return t;
}
FunPtr FunTerm::mk_unit() { return ft(Kind::Unit); }
FunPtr FunTerm::mk_bool(bool b) {
  auto t = ft(Kind::BoolLit);
  t->bval = b;
  return t;
}
FunPtr FunTerm::mk_int(BigInt v) {
  auto t = ft(Kind::IntLit);
  t->ival = std::move(v);
  return t;
}
FunPtr FunTerm::mk_pair(FunPtr a, FunPtr b) {
  auto t = ft(Kind::Pair);
  t->args = {std::move(a), std::move(b)};
  return t;
}
FunPtr FunTerm::mk_inl(FunPtr a) {
  auto t = ft(Kind::Inl);
  t->args = {std::move(a)};
  return t;
}
FunPtr FunTerm::mk_inr(FunPtr a) {
  auto t = ft(Kind::Inr);
  t->args = {std::move(a)};
  return t;
}
FunPtr FunTerm::mk_funref(std::string n, SourceSpan sp) {
  auto t = ft(Kind::FunRef);
  t->name = std::move(n);
  t->span = sp;
  return t;
}
FunPtr FunTerm::mk_app(std::string f, std::vector<FunPtr> args, SourceSpan sp) {
  auto t = ft(Kind::App);
  t->name = std::move(f);
  t->args = std::move(args);
  t->span = sp;
  return t;
}
FunPtr FunTerm::mk_arith(ArithOp op, FunPtr a, FunPtr b) {
  auto t = ft(Kind::Arith);
  t->aop = op;
  t->args = {std::move(a), std::move(b)};
  return t;
}
FunPtr FunTerm::mk_cmp(CmpOp op, FunPtr a, FunPtr b) {
  auto t = ft(Kind::Cmp);
  t->cop = op;
  t->args = {std::move(a), std::move(b)};
  return t;
}
FunPtr FunTerm::mk_if(FunPtr c, FunPtr th, FunPtr el) {
  auto t = ft(Kind::If);
  t->args = {std::move(c), std::move(th), std::move(el)};
  return t;
}
FunPtr FunTerm::mk_procval(std::string prov, std::vector<std::string> uses,
                           std::shared_ptr<ProcInterface> iface, ProcPtr body) {
  auto t = ft(Kind::ProcVal);
  t->prov_name = std::move(prov);
  t->use_names = std::move(uses);
  t->iface = std::move(iface);
  t->body = std::move(body);
  return t;
}
FunPtr FunTerm::mk_match_pair(FunPtr e, std::string x, std::string y, FunPtr body) {
  auto t = ft(Kind::MatchPair);
  t->args = {std::move(e), std::move(body)};
  t->bind1 = std::move(x);
  t->bind2 = std::move(y);
  return t;
}
FunPtr FunTerm::mk_match_sum(FunPtr e, std::string x, FunPtr l, std::string y,
                             FunPtr r) {
  auto t = ft(Kind::MatchSum);
  t->args = {std::move(e), std::move(l), std::move(r)};
  t->bind1 = std::move(x);
  t->bind2 = std::move(y);
  return t;
}

// --- ProcTerm factories --------------------------------------------------------

static std::shared_ptr<ProcTerm> pt(ProcTerm::Kind k, SourceSpan sp) {
  auto t = std::make_shared<ProcTerm>();
  t->kind = k;
  t->span = sp;
  return t;
}
ProcPtr ProcTerm::mk_spawn(std::string c, FunPtr e, std::vector<std::string> uses,
                           ProcPtr cont, SourceSpan sp) {
  auto t = pt(Kind::Spawn, sp);
  t->chan = std::move(c);
  t->expr = std::move(e);
  t->spawn_uses = std::move(uses);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_fwd(std::string to, std::string from, SourceSpan sp) {
  auto t = pt(Kind::Fwd, sp);
  t->chan = std::move(to);
  t->chan2 = std::move(from);
  return t;
}
ProcPtr ProcTerm::mk_tick(Rat q, ProcPtr cont, SourceSpan sp) {
  auto t = pt(Kind::Tick, sp);
  t->q = std::move(q);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_recv(std::string binder, std::string c, ProcPtr cont,
                          SourceSpan sp) {
  auto t = pt(Kind::Recv, sp);
  t->binder = std::move(binder);
  t->chan = std::move(c);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_sendval(std::string c, FunPtr e, ProcPtr cont, SourceSpan sp) {
  auto t = pt(Kind::SendVal, sp);
  t->chan = std::move(c);
  t->expr = std::move(e);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_sendchan(std::string c, std::string d, ProcPtr cont,
                              SourceSpan sp) {
  auto t = pt(Kind::SendChan, sp);
  t->chan = std::move(c);
  t->chan2 = std::move(d);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_case(std::string c, std::map<std::string, ProcPtr> bs,
                          SourceSpan sp) {
  auto t = pt(Kind::Case, sp);
  t->chan = std::move(c);
  t->branches = std::move(bs);
  return t;
}
ProcPtr ProcTerm::mk_select(std::string c, std::string l, ProcPtr cont,
                            SourceSpan sp) {
  auto t = pt(Kind::Select, sp);
  t->chan = std::move(c);
  t->label = std::move(l);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_close(std::string c, SourceSpan sp) {
  auto t = pt(Kind::Close, sp);
  t->chan = std::move(c);
  return t;
}
ProcPtr ProcTerm::mk_wait(std::string c, ProcPtr cont, SourceSpan sp) {
  auto t = pt(Kind::Wait, sp);
  t->chan = std::move(c);
  t->cont = std::move(cont);
  return t;
}
ProcPtr ProcTerm::mk_get(std::string c, Rat q, ProcPtr cont, int site,
                         SourceSpan sp) {
  auto t = pt(Kind::Get, sp);
  t->chan = std::move(c);
  t->q = std::move(q);
  t->cont = std::move(cont);
  t->ann_site = site;
  return t;
}
ProcPtr ProcTerm::mk_pay(std::string c, Rat q, ProcPtr cont, int site,
                         SourceSpan sp) {
  auto t = pt(Kind::Pay, sp);
  t->chan = std::move(c);
  t->q = std::move(q);
  t->cont = std::move(cont);
  t->ann_site = site;
  return t;
}

const char* proc_kind_name(ProcTerm::Kind k) {
  switch (k) {
  case ProcTerm::Kind::Spawn: return "spawn";
  case ProcTerm::Kind::Fwd: return "fwd";
  case ProcTerm::Kind::Tick: return "tick";
  case ProcTerm::Kind::Recv: return "recv";
  case ProcTerm::Kind::SendVal: return "send";
  case ProcTerm::Kind::SendChan: return "sendchan";
  case ProcTerm::Kind::Case: return "case";
  case ProcTerm::Kind::Select: return "select";
  case ProcTerm::Kind::Close: return "close";
  case ProcTerm::Kind::Wait: return "wait";
  case ProcTerm::Kind::Get: return "get";
  case ProcTerm::Kind::Pay: return "pay";
  }
  return "?";
}

// --- Signature lookup ----------------------------------------------------------

TypePtr Signature::lookup_type(const std::string& name, SourceSpan sp) const {
  auto it = type_defs.find(name);
  if (it == type_defs.end())
    fail(Errc::DanglingReference, "undefined session type '" + name + "'", sp);
  return it->second;
}
const FunDef& Signature::lookup_fun(const std::string& name, SourceSpan sp) const {
  auto it = fun_defs.find(name);
  if (it == fun_defs.end())
    fail(Errc::DanglingReference, "undefined definition '" + name + "'", sp);
  return it->second;
}
SkelPtr Signature::lookup_skeleton(const std::string& name, SourceSpan sp) const {
  auto it = skeleton_defs.find(name);
  if (it == skeleton_defs.end())
    fail(Errc::DanglingReference, "undefined skeleton '" + name + "'", sp);
  return it->second;
}

TypePtr unfold(const Signature& sig, const TypePtr& t) {
  TypePtr cur = t;
  // Contractiveness bounds definition chains, but guard anyway so a broken
  // signature cannot loop here.
  for (size_t hops = 0; cur->kind == SessionType::Kind::Var; ++hops) {
    if (hops > sig.type_defs.size())
      fail(Errc::NonContractive, "definition chain does not reach a constructor",
           cur->span);
    cur = sig.lookup_type(cur->var, cur->span);
  }
  return cur;
}

SkelPtr unfold_skel(const Signature& sig, const SkelPtr& k) {
  SkelPtr cur = k;
  for (size_t hops = 0; cur->kind == Skeleton::Kind::Var; ++hops) {
    if (hops > sig.skeleton_defs.size())
      fail(Errc::NonContractive, "skeleton chain does not reach a constructor",
           cur->span);
    cur = sig.lookup_skeleton(cur->var, cur->span);
  }
  return cur;
}

// --- Coinductive type equality ---------------------------------------------------

bool fun_type_equal(const FunTypePtr& a, const FunTypePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
  case FunType::Kind::Base:
    return a->base == b->base;
  case FunType::Kind::Prod:
  case FunType::Kind::Sum:
    return fun_type_equal(a->left, b->left) && fun_type_equal(a->right, b->right);
  case FunType::Kind::Proc:
    // Interface equality needs session-type equality, which needs a signature;
    // process types never appear inside exchanged values, so identity is enough.
    return a->proc == b->proc;
  }
  return false;
}

namespace {

bool teq(const Signature& sig, TypePtr a, TypePtr b,
         std::set<std::pair<const SessionType*, const SessionType*>>& assumed) {
  a = unfold(sig, a);
  b = unfold(sig, b);
  if (a.get() == b.get()) return true;
  auto key = std::make_pair(a.get(), b.get());
  if (assumed.count(key)) return true; // coinductive hypothesis
  assumed.insert(key);
  if (a->kind != b->kind) return false;
  using K = SessionType::Kind;
  switch (a->kind) {
  case K::Var:
    return false; // unreachable after unfold
  case K::One:
    return true;
  case K::ValIn:
  case K::ValOut:
    return fun_type_equal(a->value, b->value) &&
           teq(sig, a->cont, b->cont, assumed);
  case K::ChanIn:
  case K::ChanOut:
    return teq(sig, a->arg, b->arg, assumed) && teq(sig, a->cont, b->cont, assumed);
  case K::Ext:
  case K::Int: {
    if (a->branches.size() != b->branches.size()) return false;
    auto ia = a->branches.begin();
    auto ib = b->branches.begin();
    for (; ia != a->branches.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return false;
      if (!teq(sig, ia->second, ib->second, assumed)) return false;
    }
    return true;
  }
  case K::Get:
  case K::Pay:
    return a->q == b->q && teq(sig, a->cont, b->cont, assumed);
  }
  return false;
}

} // namespace

bool type_equal(const Signature& sig, const TypePtr& a, const TypePtr& b) {
  std::set<std::pair<const SessionType*, const SessionType*>> assumed;
  return teq(sig, a, b, assumed);
}

// --- Contractiveness and signature hygiene ----------------------------------------

void check_contractive(const Signature& sig) {
  for (const auto& [name, def] : sig.type_defs) {
    std::set<std::string> seen{name};
    TypePtr cur = def;
    while (cur->kind == SessionType::Kind::Var) {
      if (seen.count(cur->var))
        fail(Errc::NonContractive,
             "type definition '" + name + "' unfolds to itself without a constructor",
             cur->span);
      seen.insert(cur->var);
      cur = sig.lookup_type(cur->var, cur->span);
    }
  }
  for (const auto& [name, def] : sig.skeleton_defs) {
    std::set<std::string> seen{name};
    SkelPtr cur = def;
    while (cur->kind == Skeleton::Kind::Var) {
      if (seen.count(cur->var))
        fail(Errc::NonContractive,
             "skeleton definition '" + name + "' unfolds to itself without a constructor",
             cur->span);
      seen.insert(cur->var);
      cur = sig.lookup_skeleton(cur->var, cur->span);
    }
  }
}

namespace {

void walk_type_refs(const Signature& sig, const TypePtr& t) {
  if (!t) return;
  if (t->kind == SessionType::Kind::Var) {
    sig.lookup_type(t->var, t->span);
    return;
  }
  walk_type_refs(sig, t->arg);
  walk_type_refs(sig, t->cont);
  for (const auto& [_, b] : t->branches) walk_type_refs(sig, b);
}

void walk_skel_refs(const Signature& sig, const SkelPtr& k) {
  if (!k) return;
  if (k->kind == Skeleton::Kind::Var) {
    sig.lookup_skeleton(k->var, k->span);
    return;
  }
  walk_skel_refs(sig, k->arg);
  walk_skel_refs(sig, k->cont);
  for (const auto& [_, b] : k->branches) walk_skel_refs(sig, b);
}

void walk_proc_refs(const Signature& sig, const ProcPtr& p);

void walk_fun_refs(const Signature& sig, const FunPtr& e) {
  if (!e) return;
  switch (e->kind) {
  case FunTerm::Kind::FunRef:
  case FunTerm::Kind::App:
    sig.lookup_fun(e->name, e->span);
    break;
  case FunTerm::Kind::ProcVal:
    if (e->iface) {
      walk_type_refs(sig, e->iface->provides);
      for (const auto& u : e->iface->uses) walk_type_refs(sig, u);
    }
    walk_proc_refs(sig, e->body);
    break;
  default:
    break;
  }
  for (const auto& a : e->args) walk_fun_refs(sig, a);
}

void walk_proc_refs(const Signature& sig, const ProcPtr& p) {
  if (!p) return;
  walk_fun_refs(sig, p->expr);
  for (const auto& [_, b] : p->branches) walk_proc_refs(sig, b);
  walk_proc_refs(sig, p->cont);
}

// Eager functional evaluation (everything outside ProcVal bodies' process
// structure) must terminate; recursion is only allowed through spawning.
// Detects cycles in the call graph restricted to eagerly-evaluated positions.
void collect_eager_calls(const FunPtr& e, std::set<std::string>& out) {
  if (!e) return;
  switch (e->kind) {
  case FunTerm::Kind::FunRef:
  case FunTerm::Kind::App:
    out.insert(e->name);
    break;
  case FunTerm::Kind::ProcVal:
    return; // spawning defers evaluation of the body
  default:
    break;
  }
  for (const auto& a : e->args) collect_eager_calls(a, out);
}

void check_eager_acyclic(const Signature& sig) {
  std::map<std::string, std::set<std::string>> calls;
  for (const auto& [name, def] : sig.fun_defs)
    collect_eager_calls(def.value, calls[name]);
  enum class Mark { White, Grey, Black };
  std::map<std::string, Mark> mark;
  std::vector<std::pair<std::string, bool>> stack; // (node, expanded)
  for (const auto& [root, _] : calls) {
    if (mark[root] == Mark::Black) continue;
    stack.push_back({root, false});
    while (!stack.empty()) {
      auto [n, expanded] = stack.back();
      stack.pop_back();
      if (expanded) {
        mark[n] = Mark::Black;
        continue;
      }
      if (mark[n] == Mark::Black) continue;
      if (mark[n] == Mark::Grey)
        fail(Errc::NonContractive,
             "definition '" + n + "' recurses outside process spawning");
      mark[n] = Mark::Grey;
      stack.push_back({n, true});
      for (const auto& m : calls[n]) {
        if (mark[m] == Mark::Grey)
          fail(Errc::NonContractive,
               "definition '" + m + "' recurses outside process spawning");
        if (mark[m] == Mark::White) stack.push_back({m, false});
      }
    }
  }
}

} // namespace

void check_signature(const Program& p) {
  const Signature& sig = p.sig;
  for (const auto& [_, def] : sig.type_defs) walk_type_refs(sig, def);
  for (const auto& [_, def] : sig.skeleton_defs) walk_skel_refs(sig, def);
  for (const auto& [_, def] : sig.fun_defs) {
    for (const auto& [pn, pty] : def.params) {
      (void)pn;
      if (pty && pty->kind == FunType::Kind::Proc) {
        walk_type_refs(sig, pty->proc->provides);
        for (const auto& u : pty->proc->uses) walk_type_refs(sig, u);
      }
    }
    walk_fun_refs(sig, def.value);
  }
  for (const auto& entry : p.config) walk_fun_refs(sig, entry.callee);
  check_contractive(sig);
  check_eager_acyclic(sig);
}

} // namespace sill
