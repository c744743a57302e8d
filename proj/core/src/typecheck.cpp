#include "sill/typecheck.hpp"

#include "sill/printer.hpp"

#include <set>

namespace sill {

namespace {

struct VEnv {
  std::map<std::string, FunTypePtr> vars;
};

// State while checking one process body. Copied at case branches.
struct PEnv {
  VEnv vals;
  std::map<std::string, TypePtr> delta; // used channels, linear
  std::string prov;
  TypePtr prov_type;
  LinExpr pot;
  std::set<std::string> names; // every name in scope, any namespace
};

struct Checker {
  const Program& prog;
  const Signature& sig;
  std::vector<LinConstraint> out;

  explicit Checker(const Program& p) : prog(p), sig(p.sig) {}

  // --- potential bookkeeping -------------------------------------------------

  LinExpr amt(const Rat& q, int site) {
    return site >= 0 ? LinExpr::site(site) : LinExpr::constant(q);
  }

  void require_geq0(const LinExpr& e, const std::string& why, SourceSpan sp,
                    Errc code) {
    if (e.is_const()) {
      if (e.c < 0)
        fail(code, why + " (this step would leave " + rat_to_string(e.c) + ")",
             sp);
    } else {
      out.push_back({LinConstraint::Kind::Geq0, e, why, sp});
    }
  }

  void require_eq(const LinExpr& a, const LinExpr& b, const std::string& why,
                  SourceSpan sp) {
    LinExpr d = a - b;
    if (d.is_const()) {
      if (d.c != 0) fail(Errc::TypeMismatch, why, sp);
    } else {
      out.push_back({LinConstraint::Kind::Eq0, d, why, sp});
    }
  }

  // --- interface and value-type equality ---------------------------------------

  void iface_equal(const ProcInterface& a, const ProcInterface& b,
                   SourceSpan sp) {
    if (!type_equal(sig, a.provides, b.provides) ||
        a.uses.size() != b.uses.size())
      fail(Errc::TypeMismatch,
           "process interfaces differ between conditional branches", sp);
    for (size_t i = 0; i < a.uses.size(); ++i)
      if (!type_equal(sig, a.uses[i], b.uses[i]))
        fail(Errc::TypeMismatch,
             "process interfaces differ between conditional branches", sp);
    require_eq(amt(a.init_potential, a.init_site),
               amt(b.init_potential, b.init_site),
               "conditional branches need equal initial potential", sp);
  }

  void value_type_equal(const FunTypePtr& got, const FunTypePtr& want,
                        SourceSpan sp) {
    if (got->kind == FunType::Kind::Proc && want->kind == FunType::Kind::Proc) {
      iface_equal(*got->proc, *want->proc, sp);
      return;
    }
    if (!fun_type_equal(got, want))
      fail(Errc::TypeMismatch,
           "expected a value of type " + print_fun_type(want) + ", found " +
               print_fun_type(got),
           sp);
  }

  // --- functional layer -----------------------------------------------------------

  FunTypePtr def_result_type(const FunDef& d) {
    if (d.value->kind == FunTerm::Kind::ProcVal)
      return FunType::mk_proc(*d.value->iface);
    return d.ret;
  }

  FunTypePtr infer_expr(const VEnv& env, const FunPtr& e) {
    switch (e->kind) {
    case FunTerm::Kind::Var: {
      auto it = env.vars.find(e->name);
      if (it != env.vars.end()) return it->second;
      auto dit = sig.fun_defs.find(e->name);
      if (dit == sig.fun_defs.end())
        fail(Errc::DanglingReference, "'" + e->name + "' is not in scope",
             e->span);
      if (!dit->second.params.empty())
        fail(Errc::TypeMismatch,
             "'" + e->name + "' expects arguments; call it", e->span);
      return def_result_type(dit->second);
    }
    case FunTerm::Kind::Unit:
      return FunType::mk_base(BaseType::Unit);
    case FunTerm::Kind::BoolLit:
      return FunType::mk_base(BaseType::Bool);
    case FunTerm::Kind::IntLit:
      return FunType::mk_base(BaseType::Int);
    case FunTerm::Kind::Pair:
      return FunType::mk_prod(infer_expr(env, e->args[0]),
                              infer_expr(env, e->args[1]));
    case FunTerm::Kind::Inl:
    case FunTerm::Kind::Inr:
      fail(Errc::TypeMismatch,
           "a sum injection needs an expected type from its context", e->span);
    case FunTerm::Kind::FunRef: {
      const FunDef& d = sig.lookup_fun(e->name, e->span);
      if (!d.params.empty())
        fail(Errc::TypeMismatch, "'" + e->name + "' expects arguments",
             e->span);
      return def_result_type(d);
    }
    case FunTerm::Kind::App: {
      const FunDef& d = sig.lookup_fun(e->name, e->span);
      if (d.params.size() != e->args.size())
        fail(Errc::TypeMismatch,
             "'" + e->name + "' takes " + std::to_string(d.params.size()) +
                 " argument(s), got " + std::to_string(e->args.size()),
             e->span);
      for (size_t i = 0; i < e->args.size(); ++i)
        check_expr(env, e->args[i], d.params[i].second);
      return def_result_type(d);
    }
    case FunTerm::Kind::Arith:
      check_expr(env, e->args[0], FunType::mk_base(BaseType::Int));
      check_expr(env, e->args[1], FunType::mk_base(BaseType::Int));
      return FunType::mk_base(BaseType::Int);
    case FunTerm::Kind::Cmp:
      check_expr(env, e->args[0], FunType::mk_base(BaseType::Int));
      check_expr(env, e->args[1], FunType::mk_base(BaseType::Int));
      return FunType::mk_base(BaseType::Bool);
    case FunTerm::Kind::If: {
      check_expr(env, e->args[0], FunType::mk_base(BaseType::Bool));
      FunTypePtr t = infer_expr(env, e->args[1]);
      FunTypePtr f = infer_expr(env, e->args[2]);
      value_type_equal(f, t, e->span);
      return t;
    }
    case FunTerm::Kind::ProcVal:
      return FunType::mk_proc(*e->iface);
    case FunTerm::Kind::MatchPair: {
      FunTypePtr s = infer_expr(env, e->args[0]);
      if (s->kind != FunType::Kind::Prod)
        fail(Errc::TypeMismatch, "match on a pair needs a pair, found " +
                                     print_fun_type(s),
             e->span);
      VEnv env2 = env;
      bind_var(env2, e->bind1, s->left, e->span);
      bind_var(env2, e->bind2, s->right, e->span);
      return infer_expr(env2, e->args[1]);
    }
    case FunTerm::Kind::MatchSum: {
      FunTypePtr s = infer_expr(env, e->args[0]);
      if (s->kind != FunType::Kind::Sum)
        fail(Errc::TypeMismatch, "match on a sum needs a sum, found " +
                                     print_fun_type(s),
             e->span);
      VEnv envl = env, envr = env;
      bind_var(envl, e->bind1, s->left, e->span);
      bind_var(envr, e->bind2, s->right, e->span);
      FunTypePtr tl = infer_expr(envl, e->args[1]);
      FunTypePtr tr = infer_expr(envr, e->args[2]);
      value_type_equal(tr, tl, e->span);
      return tl;
    }
    }
    fail(Errc::Internal, "unhandled expression kind", e->span);
  }

  void check_expr(const VEnv& env, const FunPtr& e, const FunTypePtr& want) {
    switch (e->kind) {
    case FunTerm::Kind::Inl:
      if (want->kind != FunType::Kind::Sum)
        fail(Errc::TypeMismatch,
             "sum injection where " + print_fun_type(want) + " is expected",
             e->span);
      check_expr(env, e->args[0], want->left);
      return;
    case FunTerm::Kind::Inr:
      if (want->kind != FunType::Kind::Sum)
        fail(Errc::TypeMismatch,
             "sum injection where " + print_fun_type(want) + " is expected",
             e->span);
      check_expr(env, e->args[0], want->right);
      return;
    case FunTerm::Kind::Pair:
      if (want->kind != FunType::Kind::Prod)
        fail(Errc::TypeMismatch,
             "pair where " + print_fun_type(want) + " is expected", e->span);
      check_expr(env, e->args[0], want->left);
      check_expr(env, e->args[1], want->right);
      return;
    case FunTerm::Kind::If:
      check_expr(env, e->args[0], FunType::mk_base(BaseType::Bool));
      check_expr(env, e->args[1], want);
      check_expr(env, e->args[2], want);
      return;
    case FunTerm::Kind::MatchPair: {
      FunTypePtr s = infer_expr(env, e->args[0]);
      if (s->kind != FunType::Kind::Prod)
        fail(Errc::TypeMismatch, "match on a pair needs a pair, found " +
                                     print_fun_type(s),
             e->span);
      VEnv env2 = env;
      bind_var(env2, e->bind1, s->left, e->span);
      bind_var(env2, e->bind2, s->right, e->span);
      check_expr(env2, e->args[1], want);
      return;
    }
    case FunTerm::Kind::MatchSum: {
      FunTypePtr s = infer_expr(env, e->args[0]);
      if (s->kind != FunType::Kind::Sum)
        fail(Errc::TypeMismatch, "match on a sum needs a sum, found " +
                                     print_fun_type(s),
             e->span);
      VEnv envl = env, envr = env;
      bind_var(envl, e->bind1, s->left, e->span);
      bind_var(envr, e->bind2, s->right, e->span);
      check_expr(envl, e->args[1], want);
      check_expr(envr, e->args[2], want);
      return;
    }
    default:
      value_type_equal(infer_expr(env, e), want, e->span);
    }
  }

  void bind_var(VEnv& env, const std::string& name, const FunTypePtr& t,
                SourceSpan sp) {
    if (env.vars.count(name))
      fail(Errc::DuplicateDefinition, "'" + name + "' is already bound", sp);
    env.vars[name] = t;
  }

  // --- process layer ------------------------------------------------------------------

  void bind_value(PEnv& env, const std::string& name, const FunTypePtr& t,
                  SourceSpan sp) {
    if (env.names.count(name))
      fail(Errc::DuplicateDefinition, "'" + name + "' is already in scope", sp);
    env.names.insert(name);
    env.vals.vars[name] = t;
  }

  void bind_chan(PEnv& env, const std::string& name, const TypePtr& t,
                 SourceSpan sp) {
    if (env.names.count(name))
      fail(Errc::DuplicateDefinition, "'" + name + "' is already in scope", sp);
    env.names.insert(name);
    env.delta[name] = t;
  }

  TypePtr take_chan(PEnv& env, const std::string& name, SourceSpan sp) {
    auto it = env.delta.find(name);
    if (it == env.delta.end()) {
      if (name == env.prov)
        fail(Errc::TypeMismatch,
             "cannot consume the provided channel '" + name + "' here", sp);
      fail(Errc::DanglingReference, "channel '" + name + "' is not in scope",
           sp);
    }
    TypePtr t = it->second;
    env.delta.erase(it);
    env.names.erase(name);
    return t;
  }

  // Looks at channel c from this process's point of view; true when c is the
  // provided channel (so the type reads in provider orientation).
  bool is_prov(const PEnv& env, const std::string& c) { return c == env.prov; }

  TypePtr chan_state(PEnv& env, const std::string& c, SourceSpan sp) {
    if (is_prov(env, c)) return env.prov_type;
    auto it = env.delta.find(c);
    if (it == env.delta.end())
      fail(Errc::DanglingReference, "channel '" + c + "' is not in scope", sp);
    return it->second;
  }

  void set_chan_state(PEnv& env, const std::string& c, TypePtr t) {
    if (is_prov(env, c))
      env.prov_type = std::move(t);
    else
      env.delta[c] = std::move(t);
  }

  [[noreturn]] void wrong_op(const PEnv& env, const std::string& c,
                             const TypePtr& u, const char* op, SourceSpan sp) {
    fail(Errc::TypeMismatch, std::string("cannot ") + op + " on '" + c +
                                 "' at type " + print_type(u),
         sp);
  }

  void check_proc(PEnv env, const ProcPtr& P) {
    switch (P->kind) {
    case ProcTerm::Kind::Fwd: {
      if (!is_prov(env, P->chan))
        fail(Errc::TypeMismatch,
             "forwarding must provide '" + env.prov + "', not '" + P->chan + "'",
             P->span);
      TypePtr src = take_chan(env, P->chan2, P->span);
      if (!env.delta.empty())
        fail(Errc::LinearityViolation,
             "channel '" + env.delta.begin()->first +
                 "' is still open at this forward",
             P->span);
      if (!type_equal(sig, env.prov_type, src))
        fail(Errc::TypeMismatch,
             "forwarding connects " + print_type(env.prov_type) + " to " +
                 print_type(src),
             P->span);
      return; // leftover potential is discarded here
    }
    case ProcTerm::Kind::Close: {
      if (!is_prov(env, P->chan))
        fail(Errc::TypeMismatch, "only the provided channel can be closed",
             P->span);
      TypePtr u = unfold(sig, env.prov_type);
      if (u->kind != SessionType::Kind::One)
        wrong_op(env, P->chan, u, "close", P->span);
      if (!env.delta.empty())
        fail(Errc::LinearityViolation,
             "channel '" + env.delta.begin()->first +
                 "' is still open at this close",
             P->span);
      return;
    }
    case ProcTerm::Kind::Wait: {
      if (is_prov(env, P->chan))
        fail(Errc::TypeMismatch, "cannot wait on the provided channel",
             P->span);
      TypePtr u = unfold(sig, take_chan(env, P->chan, P->span));
      if (u->kind != SessionType::Kind::One)
        wrong_op(env, P->chan, u, "wait", P->span);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::Tick: {
      env.pot -= LinExpr::constant(P->q);
      if (P->q > 0)
        require_geq0(env.pot, "tick " + rat_to_string(P->q) +
                                  " needs that much potential",
                     P->span, Errc::PotentialUnderflow);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::SendVal:
    case ProcTerm::Kind::SendChan: {
      TypePtr u = unfold(sig, chan_state(env, P->chan, P->span));
      bool prov = is_prov(env, P->chan);
      SessionType::Kind k = u->kind;
      bool value_send = prov ? k == SessionType::Kind::ValOut
                             : k == SessionType::Kind::ValIn;
      bool chan_send = prov ? k == SessionType::Kind::ChanOut
                            : k == SessionType::Kind::ChanIn;
      if (!value_send && !chan_send) wrong_op(env, P->chan, u, "send", P->span);
      if (chan_send) {
        std::string payload;
        if (P->kind == ProcTerm::Kind::SendChan)
          payload = P->chan2;
        else if (P->expr->kind == FunTerm::Kind::Var)
          payload = P->expr->name;
        else
          fail(Errc::TypeMismatch,
               "sending on '" + P->chan + "' at type " + print_type(u) +
                   " requires a channel name",
               P->span);
        TypePtr got = take_chan(env, payload, P->span);
        if (!type_equal(sig, got, u->arg))
          fail(Errc::TypeMismatch,
               "channel '" + payload + "' has type " + print_type(got) +
                   " but " + print_type(u->arg) + " is required",
               P->span);
        set_chan_state(env, P->chan, u->cont);
        check_proc(std::move(env), P->cont);
        return;
      }
      if (P->kind == ProcTerm::Kind::SendChan)
        fail(Errc::TypeMismatch,
             "sending on '" + P->chan + "' at type " + print_type(u) +
                 " requires a value",
             P->span);
      if (P->expr->kind == FunTerm::Kind::Var &&
          env.delta.count(P->expr->name))
        fail(Errc::TypeMismatch,
             "channel '" + P->expr->name + "' sent where a value of type " +
                 print_fun_type(u->value) + " is expected",
             P->span);
      check_expr(env.vals, P->expr, u->value);
      set_chan_state(env, P->chan, u->cont);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::Recv: {
      TypePtr u = unfold(sig, chan_state(env, P->chan, P->span));
      bool prov = is_prov(env, P->chan);
      SessionType::Kind k = u->kind;
      bool value_recv = prov ? k == SessionType::Kind::ValIn
                             : k == SessionType::Kind::ValOut;
      bool chan_recv = prov ? k == SessionType::Kind::ChanIn
                            : k == SessionType::Kind::ChanOut;
      if (!value_recv && !chan_recv)
        wrong_op(env, P->chan, u, "receive", P->span);
      if (value_recv)
        bind_value(env, P->binder, u->value, P->span);
      else
        bind_chan(env, P->binder, u->arg, P->span);
      set_chan_state(env, P->chan, u->cont);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::Case: {
      TypePtr u = unfold(sig, chan_state(env, P->chan, P->span));
      bool prov = is_prov(env, P->chan);
      SessionType::Kind want = prov ? SessionType::Kind::Ext
                                    : SessionType::Kind::Int;
      if (u->kind != want) wrong_op(env, P->chan, u, "branch", P->span);
      if (u->branches.size() != P->branches.size())
        fail(Errc::TypeMismatch,
             "case on '" + P->chan + "' must cover exactly the labels of " +
                 print_type(u),
             P->span);
      for (const auto& [l, body] : P->branches) {
        auto bit = u->branches.find(l);
        if (bit == u->branches.end())
          fail(Errc::TypeMismatch,
               "label '" + l + "' is not offered by " + print_type(u), P->span);
        PEnv env2 = env;
        set_chan_state(env2, P->chan, bit->second);
        check_proc(std::move(env2), body);
      }
      return;
    }
    case ProcTerm::Kind::Select: {
      TypePtr u = unfold(sig, chan_state(env, P->chan, P->span));
      bool prov = is_prov(env, P->chan);
      SessionType::Kind want = prov ? SessionType::Kind::Int
                                    : SessionType::Kind::Ext;
      if (u->kind != want) wrong_op(env, P->chan, u, "select", P->span);
      auto bit = u->branches.find(P->label);
      if (bit == u->branches.end())
        fail(Errc::TypeMismatch,
             "label '" + P->label + "' is not offered by " + print_type(u),
             P->span);
      set_chan_state(env, P->chan, bit->second);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::Get:
    case ProcTerm::Kind::Pay: {
      bool is_get = P->kind == ProcTerm::Kind::Get;
      TypePtr u = unfold(sig, chan_state(env, P->chan, P->span));
      bool prov = is_prov(env, P->chan);
      // The provider of a <| type receives potential; the provider of a |>
      // type pays. From the client side the directions swap.
      SessionType::Kind want =
          (is_get == prov) ? SessionType::Kind::Get : SessionType::Kind::Pay;
      if (u->kind != want)
        wrong_op(env, P->chan, u, is_get ? "get" : "pay", P->span);
      LinExpr ty_amt = amt(u->q, u->ann_site);
      require_eq(amt(P->q, P->ann_site), ty_amt,
                 std::string(is_get ? "get" : "pay") +
                     " amount must match the type of '" + P->chan + "'",
                 P->span);
      if (is_get) {
        env.pot += ty_amt;
      } else {
        env.pot -= ty_amt;
        require_geq0(env.pot, "paying on '" + P->chan +
                                  "' needs that much potential",
                     P->span, Errc::PotentialUnderflow);
      }
      set_chan_state(env, P->chan, u->cont);
      check_proc(std::move(env), P->cont);
      return;
    }
    case ProcTerm::Kind::Spawn: {
      FunTypePtr ft = infer_expr(env.vals, P->expr);
      if (ft->kind != FunType::Kind::Proc)
        fail(Errc::TypeMismatch, "spawning needs a process, found " +
                                     print_fun_type(ft),
             P->span);
      const ProcInterface& iface = *ft->proc;
      if (P->spawn_uses.size() != iface.uses.size())
        fail(Errc::TypeMismatch,
             "spawn passes " + std::to_string(P->spawn_uses.size()) +
                 " channel(s) but the process uses " +
                 std::to_string(iface.uses.size()),
             P->span);
      for (size_t i = 0; i < P->spawn_uses.size(); ++i) {
        TypePtr got = take_chan(env, P->spawn_uses[i], P->span);
        if (!type_equal(sig, got, iface.uses[i]))
          fail(Errc::TypeMismatch,
               "channel '" + P->spawn_uses[i] + "' has type " +
                   print_type(got) + " but " + print_type(iface.uses[i]) +
                   " is required",
               P->span);
      }
      env.pot -= amt(iface.init_potential, iface.init_site);
      require_geq0(env.pot,
                   "spawning at '" + P->chan +
                       "' hands the child its initial potential",
                   P->span, Errc::PotentialUnderflow);
      bind_chan(env, P->chan, iface.provides, P->span);
      check_proc(std::move(env), P->cont);
      return;
    }
    }
    fail(Errc::Internal, "unhandled process kind", P->span);
  }

  // --- definitions and config ------------------------------------------------------------

  void check_def(const FunDef& d) {
    VEnv env;
    for (const auto& [x, t] : d.params) bind_var(env, x, t, d.span);
    if (d.value->kind == FunTerm::Kind::ProcVal) {
      const FunTerm& pv = *d.value;
      PEnv penv;
      penv.vals = env;
      for (const auto& [x, _] : d.params) penv.names.insert(x);
      penv.prov = pv.prov_name;
      if (penv.names.count(penv.prov))
        fail(Errc::DuplicateDefinition,
             "'" + penv.prov + "' is already in scope", d.span);
      penv.names.insert(penv.prov);
      penv.prov_type = pv.iface->provides;
      for (size_t i = 0; i < pv.use_names.size(); ++i)
        bind_chan(penv, pv.use_names[i], pv.iface->uses[i], d.span);
      penv.pot = amt(pv.iface->init_potential, pv.iface->init_site);
      if (!penv.pot.is_const())
        require_geq0(penv.pot, "initial potential of '" + d.name + "'", d.span,
                     Errc::PotentialUnderflow);
      check_proc(std::move(penv), pv.body);
    } else {
      if (!d.ret)
        fail(Errc::Internal, "value definition without a return type", d.span);
      check_expr(env, d.value, d.ret);
    }
  }

  // Resolves a config callee down to its process interface. Returns the
  // owning pointer; the enclosing FunType is a temporary.
  std::shared_ptr<ProcInterface> config_iface(const FunPtr& callee) {
    VEnv empty;
    FunTypePtr ft = infer_expr(empty, callee);
    if (ft->kind != FunType::Kind::Proc)
      fail(Errc::TypeMismatch, "config entries must spawn processes",
           callee->span);
    return ft->proc;
  }

  void check_config() {
    std::map<std::string, TypePtr> provided; // chan -> provides type
    for (const auto& e : prog.config) {
      auto iface = config_iface(e.callee);
      if (!provided.emplace(e.chan, iface->provides).second)
        fail(Errc::LinearityViolation,
             "channel '" + e.chan + "' is provided by two config entries",
             e.span);
    }
    std::map<std::string, int> consumed; // chan -> times used
    for (const auto& e : prog.config) {
      auto iface = config_iface(e.callee);
      if (e.uses.size() != iface->uses.size())
        fail(Errc::TypeMismatch,
             "config entry for '" + e.chan + "' passes " +
                 std::to_string(e.uses.size()) + " channel(s) but the process uses " +
                 std::to_string(iface->uses.size()),
             e.span);
      for (size_t i = 0; i < e.uses.size(); ++i) {
        const std::string& u = e.uses[i];
        if (u == e.chan)
          fail(Errc::LinearityViolation,
               "config entry for '" + e.chan + "' uses its own channel",
               e.span);
        if (++consumed[u] > 1)
          fail(Errc::LinearityViolation,
               "channel '" + u + "' is consumed twice in the config", e.span);
        auto pit = provided.find(u);
        if (pit != provided.end() &&
            !type_equal(sig, pit->second, iface->uses[i]))
          fail(Errc::TypeMismatch,
               "channel '" + u + "' is provided at " + print_type(pit->second) +
                   " but consumed at " + print_type(iface->uses[i]),
               e.span);
      }
    }
  }

  void run() {
    check_signature(prog);
    for (const auto& [_, d] : sig.fun_defs) check_def(d);
    check_config();
  }
};

} // namespace

CheckResult typecheck(const Program& p) {
  Checker ck(p);
  ck.run();
  return CheckResult{std::move(ck.out)};
}

std::shared_ptr<ProcInterface> config_callee_interface(const Program& p,
                                                       const ConfigEntry& e) {
  Checker ck(p);
  return ck.config_iface(e.callee);
}

ExternalInterface external_interface(const Program& p) {
  Checker ck(p);
  ExternalInterface xi;
  std::map<std::string, TypePtr> provided;
  for (const auto& e : p.config)
    provided[e.chan] = ck.config_iface(e.callee)->provides;
  std::set<std::string> consumed;
  for (const auto& e : p.config) {
    auto iface = ck.config_iface(e.callee);
    for (size_t i = 0; i < e.uses.size(); ++i) {
      consumed.insert(e.uses[i]);
      if (!provided.count(e.uses[i])) xi.used[e.uses[i]] = iface->uses[i];
    }
  }
  for (const auto& [c, t] : provided)
    if (!consumed.count(c)) xi.provided[c] = t;
  return xi;
}

} // namespace sill
