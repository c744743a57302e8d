#include "sill/semantics.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace sill {

// --- runtime values -----------------------------------------------------------

RVPtr RValue::mk_unit() {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Unit;
  return v;
}
RVPtr RValue::mk_bool(bool b) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Bool;
  v->bval = b;
  return v;
}
RVPtr RValue::mk_int(BigInt n) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Int;
  v->ival = std::move(n);
  return v;
}
RVPtr RValue::mk_pair(RVPtr l, RVPtr r) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Pair;
  v->left = std::move(l);
  v->right = std::move(r);
  return v;
}
RVPtr RValue::mk_inl(RVPtr x) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Inl;
  v->left = std::move(x);
  return v;
}
RVPtr RValue::mk_inr(RVPtr x) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Inr;
  v->left = std::move(x);
  return v;
}
RVPtr RValue::mk_proc(FunPtr pv, std::map<std::string, RVPtr> env) {
  auto v = std::make_shared<RValue>();
  v->kind = Kind::Proc;
  v->pv = std::move(pv);
  v->env = std::move(env);
  return v;
}

std::string print_rvalue(const RVPtr& v) {
  if (!v) return "<null>";
  switch (v->kind) {
    case RValue::Kind::Unit: return "()";
    case RValue::Kind::Bool: return v->bval ? "true" : "false";
    case RValue::Kind::Int: return v->ival.str();
    case RValue::Kind::Pair:
      return "(" + print_rvalue(v->left) + ", " + print_rvalue(v->right) + ")";
    case RValue::Kind::Inl: return "inl " + print_rvalue(v->left);
    case RValue::Kind::Inr: return "inr " + print_rvalue(v->left);
    case RValue::Kind::Proc: return "<process>";
  }
  return "<?>";
}

bool rvalue_equal(const RVPtr& a, const RVPtr& b) {
  if (a == b) return true;
  if (!a || !b || a->kind != b->kind) return false;
  switch (a->kind) {
    case RValue::Kind::Unit: return true;
    case RValue::Kind::Bool: return a->bval == b->bval;
    case RValue::Kind::Int: return a->ival == b->ival;
    case RValue::Kind::Pair:
      return rvalue_equal(a->left, b->left) && rvalue_equal(a->right, b->right);
    case RValue::Kind::Inl:
    case RValue::Kind::Inr: return rvalue_equal(a->left, b->left);
    case RValue::Kind::Proc:
      return a->pv == b->pv && a->env.size() == b->env.size() &&
             std::equal(a->env.begin(), a->env.end(), b->env.begin(),
                        [](const auto& x, const auto& y) {
                          return x.first == y.first && rvalue_equal(x.second, y.second);
                        });
  }
  return false;
}

namespace {

const RVPtr& env_lookup(const std::map<std::string, RVPtr>& env,
                        const std::string& n, SourceSpan sp) {
  auto it = env.find(n);
  if (it == env.end())
    fail(Errc::Internal, "runtime: unbound value variable '" + n + "'", sp);
  return it->second;
}

BigInt want_int(const RVPtr& v, SourceSpan sp) {
  if (!v || v->kind != RValue::Kind::Int)
    fail(Errc::Internal, "runtime: expected an integer, got " + print_rvalue(v), sp);
  return v->ival;
}

bool want_bool(const RVPtr& v, SourceSpan sp) {
  if (!v || v->kind != RValue::Kind::Bool)
    fail(Errc::Internal, "runtime: expected a boolean, got " + print_rvalue(v), sp);
  return v->bval;
}

} // namespace

RVPtr eval_expr(const Signature& sig, const std::map<std::string, RVPtr>& env,
                const FunPtr& e) {
  if (!e) fail(Errc::Internal, "runtime: null expression");
  switch (e->kind) {
    case FunTerm::Kind::Var: {
      auto it = env.find(e->name);
      if (it != env.end()) return it->second;
      // A bare reference to a nullary definition.
      const FunDef& d = sig.lookup_fun(e->name, e->span);
      if (!d.params.empty())
        fail(Errc::Internal,
             "runtime: '" + e->name + "' takes arguments but none were given",
             e->span);
      return eval_expr(sig, {}, d.value);
    }
    case FunTerm::Kind::FunRef: {
      const FunDef& d = sig.lookup_fun(e->name, e->span);
      if (!d.params.empty())
        fail(Errc::Internal,
             "runtime: '" + e->name + "' takes arguments but none were given",
             e->span);
      return eval_expr(sig, {}, d.value);
    }
    case FunTerm::Kind::Unit: return RValue::mk_unit();
    case FunTerm::Kind::BoolLit: return RValue::mk_bool(e->bval);
    case FunTerm::Kind::IntLit: return RValue::mk_int(e->ival);
    case FunTerm::Kind::Pair:
      return RValue::mk_pair(eval_expr(sig, env, e->args[0]),
                             eval_expr(sig, env, e->args[1]));
    case FunTerm::Kind::Inl: return RValue::mk_inl(eval_expr(sig, env, e->args[0]));
    case FunTerm::Kind::Inr: return RValue::mk_inr(eval_expr(sig, env, e->args[0]));
    case FunTerm::Kind::App: {
      const FunDef& d = sig.lookup_fun(e->name, e->span);
      if (d.params.size() != e->args.size())
        fail(Errc::Internal, "runtime: arity mismatch calling '" + e->name + "'",
             e->span);
      std::map<std::string, RVPtr> callee_env;
      for (size_t i = 0; i < e->args.size(); ++i)
        callee_env[d.params[i].first] = eval_expr(sig, env, e->args[i]);
      return eval_expr(sig, callee_env, d.value);
    }
    case FunTerm::Kind::Arith: {
      BigInt a = want_int(eval_expr(sig, env, e->args[0]), e->span);
      BigInt b = want_int(eval_expr(sig, env, e->args[1]), e->span);
      switch (e->aop) {
        case ArithOp::Add: return RValue::mk_int(a + b);
        case ArithOp::Sub: return RValue::mk_int(a - b);
        case ArithOp::Mul: return RValue::mk_int(a * b);
      }
      break;
    }
    case FunTerm::Kind::Cmp: {
      RVPtr a = eval_expr(sig, env, e->args[0]);
      RVPtr b = eval_expr(sig, env, e->args[1]);
      switch (e->cop) {
        case CmpOp::Eq: return RValue::mk_bool(rvalue_equal(a, b));
        case CmpOp::Lt: return RValue::mk_bool(want_int(a, e->span) < want_int(b, e->span));
        case CmpOp::Le: return RValue::mk_bool(want_int(a, e->span) <= want_int(b, e->span));
      }
      break;
    }
    case FunTerm::Kind::If:
      return want_bool(eval_expr(sig, env, e->args[0]), e->span)
                 ? eval_expr(sig, env, e->args[1])
                 : eval_expr(sig, env, e->args[2]);
    case FunTerm::Kind::ProcVal: return RValue::mk_proc(e, env);
    case FunTerm::Kind::MatchPair: {
      RVPtr s = eval_expr(sig, env, e->args[0]);
      if (!s || s->kind != RValue::Kind::Pair)
        fail(Errc::Internal, "runtime: expected a pair, got " + print_rvalue(s),
             e->span);
      auto inner = env;
      inner[e->bind1] = s->left;
      inner[e->bind2] = s->right;
      return eval_expr(sig, inner, e->args[1]);
    }
    case FunTerm::Kind::MatchSum: {
      RVPtr s = eval_expr(sig, env, e->args[0]);
      if (!s || (s->kind != RValue::Kind::Inl && s->kind != RValue::Kind::Inr))
        fail(Errc::Internal, "runtime: expected a sum value, got " + print_rvalue(s),
             e->span);
      auto inner = env;
      if (s->kind == RValue::Kind::Inl) {
        inner[e->bind1] = s->left;
        return eval_expr(sig, inner, e->args[1]);
      }
      inner[e->bind2] = s->left;
      return eval_expr(sig, inner, e->args[2]);
    }
  }
  fail(Errc::Internal, "runtime: unhandled expression form", e->span);
}

// --- configurations ------------------------------------------------------------

Rat Config::total_w() const {
  Rat s = world_w;
  for (const auto& p : procs) s += p.w;
  for (const auto& m : msgs) s += m.w;
  return s;
}

namespace {

std::string mint(Config& cfg) { return "ch$" + std::to_string(cfg.name_counter++); }

ProcState spawn_proc(Config& cfg, const RVPtr& closure,
                     const std::vector<std::string>& use_globals,
                     std::string prov_global, SourceSpan sp) {
  if (!closure || closure->kind != RValue::Kind::Proc)
    fail(Errc::Internal, "runtime: spawn of a non-process value", sp);
  const FunTerm& pv = *closure->pv;
  if (pv.use_names.size() != use_globals.size())
    fail(Errc::Internal, "runtime: spawn channel arity mismatch", sp);
  ProcState p;
  p.pid = cfg.next_pid++;
  p.w = 0;
  p.term = pv.body;
  p.prov_var = pv.prov_name;
  p.prov_name = std::move(prov_global);
  p.venv = closure->env;
  for (size_t i = 0; i < use_globals.size(); ++i)
    p.cenv[pv.use_names[i]] = use_globals[i];
  return p;
}

} // namespace

Config initial_config(const Program& prog) {
  Config cfg;
  cfg.prog = &prog;
  for (const auto& entry : prog.config) {
    RVPtr closure = eval_expr(prog.sig, {}, entry.callee);
    cfg.procs.push_back(
        spawn_proc(cfg, closure, entry.uses, entry.chan, entry.span));
  }
  return cfg;
}

// --- steps ---------------------------------------------------------------------

const char* step_kind_name(Step::Kind k) {
  switch (k) {
    case Step::Kind::Tick: return "tick";
    case Step::Kind::Get: return "get";
    case Step::Kind::Pay: return "pay";
    case Step::Kind::Spawn: return "spawn";
    case Step::Kind::SendValue: return "send_value";
    case Step::Kind::SendChan: return "send_chan";
    case Step::Kind::SendLabel: return "send_label";
    case Step::Kind::Close: return "close";
    case Step::Kind::Fwd: return "fwd";
    case Step::Kind::RecvValue: return "recv_value";
    case Step::Kind::RecvChan: return "recv_chan";
    case Step::Kind::RecvLabel: return "recv_label";
    case Step::Kind::Wait: return "wait";
    case Step::Kind::FwdJoinProvider: return "fwd_join_provider";
    case Step::Kind::FwdJoinClient: return "fwd_join_client";
    case Step::Kind::FwdJoinMsg: return "fwd_join_msg";
  }
  return "?";
}

namespace {

// The channel a process term acts on, as a global name, plus whether the
// process is that channel's provider.
struct ChanRef {
  std::string global;
  bool is_provider;
};

ChanRef resolve_chan(const ProcState& p, const std::string& var, SourceSpan sp) {
  if (var == p.prov_var) return {p.prov_name, true};
  auto it = p.cenv.find(var);
  if (it == p.cenv.end())
    fail(Errc::Internal, "runtime: unbound channel '" + var + "'", sp);
  return {it->second, false};
}

// Whether a send on this process term moves a channel rather than a value.
bool send_moves_channel(const ProcState& p, const ProcTerm& t) {
  if (t.kind == ProcTerm::Kind::SendChan) return true;
  return t.expr && t.expr->kind == FunTerm::Kind::Var &&
         (p.cenv.count(t.expr->name) != 0 || t.expr->name == p.prov_var);
}

// Index of the message a receive on `ref` would consume, or -1. The provider
// of a channel consumes client-sent messages on it; a client consumes
// provider-sent ones.
int find_msg_for(const Config& cfg, const ChanRef& ref) {
  for (size_t j = 0; j < cfg.msgs.size(); ++j) {
    const Msg& m = cfg.msgs[j];
    if (m.kind == Msg::Kind::Fwd) continue;
    if (m.on == ref.global && m.from_provider != ref.is_provider)
      return static_cast<int>(j);
  }
  return -1;
}

// The predicate name a message occupies: provider-sent messages sit on the
// interaction channel, client-sent ones on the continuation they minted.
const std::string& msg_pred_name(const Msg& m) {
  return m.from_provider ? m.on : m.next;
}

bool step_for_proc(const Config& cfg, size_t i, Step& out) {
  const ProcState& p = cfg.procs[i];
  const ProcTerm& t = *p.term;
  Step s;
  s.proc = static_cast<int>(i);
  switch (t.kind) {
    case ProcTerm::Kind::Tick: s.kind = Step::Kind::Tick; out = s; return true;
    case ProcTerm::Kind::Get: s.kind = Step::Kind::Get; out = s; return true;
    case ProcTerm::Kind::Pay: s.kind = Step::Kind::Pay; out = s; return true;
    case ProcTerm::Kind::Spawn: s.kind = Step::Kind::Spawn; out = s; return true;
    case ProcTerm::Kind::SendVal:
    case ProcTerm::Kind::SendChan:
      s.kind = send_moves_channel(p, t) ? Step::Kind::SendChan
                                        : Step::Kind::SendValue;
      out = s;
      return true;
    case ProcTerm::Kind::Select: s.kind = Step::Kind::SendLabel; out = s; return true;
    case ProcTerm::Kind::Close: s.kind = Step::Kind::Close; out = s; return true;
    case ProcTerm::Kind::Fwd: s.kind = Step::Kind::Fwd; out = s; return true;
    case ProcTerm::Kind::Recv: {
      ChanRef r = resolve_chan(p, t.chan, t.span);
      int j = find_msg_for(cfg, r);
      if (j < 0) return false;
      const Msg& m = cfg.msgs[j];
      if (m.kind == Msg::Kind::Value)
        s.kind = Step::Kind::RecvValue;
      else if (m.kind == Msg::Kind::Chan)
        s.kind = Step::Kind::RecvChan;
      else
        return false; // protocol mismatch; surfaces as a blocked process
      s.msg = j;
      out = s;
      return true;
    }
    case ProcTerm::Kind::Case: {
      ChanRef r = resolve_chan(p, t.chan, t.span);
      int j = find_msg_for(cfg, r);
      if (j < 0 || cfg.msgs[j].kind != Msg::Kind::Label) return false;
      s.kind = Step::Kind::RecvLabel;
      s.msg = j;
      out = s;
      return true;
    }
    case ProcTerm::Kind::Wait: {
      ChanRef r = resolve_chan(p, t.chan, t.span);
      int j = find_msg_for(cfg, r);
      if (j < 0 || cfg.msgs[j].kind != Msg::Kind::Close) return false;
      s.kind = Step::Kind::Wait;
      s.msg = j;
      out = s;
      return true;
    }
  }
  return false;
}

} // namespace

std::vector<Step> applicable_steps(const Config& cfg) {
  std::vector<Step> steps;
  for (size_t i = 0; i < cfg.procs.size(); ++i) {
    Step s;
    if (step_for_proc(cfg, i, s)) steps.push_back(s);
  }
  // Forward messages join with whichever end reaches them first.
  for (size_t j = 0; j < cfg.msgs.size(); ++j) {
    const Msg& f = cfg.msgs[j];
    if (f.kind != Msg::Kind::Fwd) continue;
    for (size_t i = 0; i < cfg.procs.size(); ++i) {
      if (cfg.procs[i].prov_name == f.next) {
        Step s;
        s.kind = Step::Kind::FwdJoinProvider;
        s.proc = static_cast<int>(i);
        s.msg = static_cast<int>(j);
        steps.push_back(s);
      }
      for (const auto& [var, g] : cfg.procs[i].cenv) {
        if (g == f.on) {
          Step s;
          s.kind = Step::Kind::FwdJoinClient;
          s.proc = static_cast<int>(i);
          s.msg = static_cast<int>(j);
          steps.push_back(s);
        }
      }
    }
    for (size_t j2 = 0; j2 < cfg.msgs.size(); ++j2) {
      if (j2 == j) continue;
      const Msg& m2 = cfg.msgs[j2];
      if (m2.from_provider && msg_pred_name(m2) == f.next) {
        Step s;
        s.kind = Step::Kind::FwdJoinMsg;
        s.msg = static_cast<int>(j);
        s.msg2 = static_cast<int>(j2);
        steps.push_back(s);
      }
    }
  }
  return steps;
}

namespace {

void erase_msg(Config& cfg, int idx) {
  cfg.msgs.erase(cfg.msgs.begin() + idx);
}

void erase_proc(Config& cfg, int idx) {
  cfg.procs.erase(cfg.procs.begin() + idx);
}

const ChannelScript& script_of(const Config& cfg, const std::string& id) {
  if (!cfg.input)
    fail(Errc::Internal, "runtime: world end without an injected input");
  auto it = cfg.input->scripts.find(id);
  if (it == cfg.input->scripts.end())
    fail(Errc::Internal, "runtime: input references unknown script '" + id + "'");
  return it->second;
}

// Advances every world end as far as it can: absorbing forwards that reach
// it, consuming messages its script expects, and emitting the sends at the
// head of its script. Eager advancement is sound because world messages
// carry no work and only ever enable program steps.
void normalize_worlds(Config& cfg) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t wi = 0; wi < cfg.worlds.size(); ++wi) {
      WorldEnd& e = cfg.worlds[wi];
      // Forwards: when the program forwards across a channel the world
      // holds, the world's end follows the renaming.
      for (size_t j = 0; j < cfg.msgs.size(); ++j) {
        const Msg& m = cfg.msgs[j];
        if (m.kind != Msg::Kind::Fwd) continue;
        if (e.world_provides ? (m.next == e.cur) : (m.on == e.cur)) {
          e.cur = e.world_provides ? m.on : m.next;
          cfg.world_w += m.w;
          erase_msg(cfg, static_cast<int>(j));
          changed = true;
          break;
        }
      }
      const ChannelScript& sc = script_of(cfg, e.script);
      if (e.pos >= sc.acts.size()) {
        // Script exhausted: this end never acts again.
        cfg.worlds.erase(cfg.worlds.begin() + wi);
        changed = true;
        break;
      }
      const WorldAction& a = sc.acts[e.pos];
      switch (a.kind) {
        case WorldAction::Kind::SendValue:
        case WorldAction::Kind::SendLabel:
        case WorldAction::Kind::SendChan: {
          Msg m;
          m.on = e.cur;
          m.next = mint(cfg);
          m.from_provider = e.world_provides;
          m.w = 0;
          if (a.kind == WorldAction::Kind::SendValue) {
            m.kind = Msg::Kind::Value;
            m.value = a.value;
          } else if (a.kind == WorldAction::Kind::SendLabel) {
            m.kind = Msg::Kind::Label;
            m.label = a.label;
          } else {
            m.kind = Msg::Kind::Chan;
            m.chan = mint(cfg);
            WorldEnd sub;
            sub.script = a.chan_script;
            sub.pos = 0;
            sub.cur = m.chan;
            sub.world_provides = true; // the world conjures the whole session
            cfg.worlds.push_back(sub);
          }
          e.cur = m.next;
          e.pos++;
          cfg.msgs.push_back(std::move(m));
          changed = true;
          break;
        }
        case WorldAction::Kind::SendClose: {
          if (!e.world_provides)
            fail(Errc::Internal, "runtime: input closes a channel it does not provide");
          Msg m;
          m.kind = Msg::Kind::Close;
          m.on = e.cur;
          m.from_provider = true;
          m.w = 0;
          cfg.msgs.push_back(std::move(m));
          cfg.worlds.erase(cfg.worlds.begin() + wi);
          changed = true;
          break;
        }
        case WorldAction::Kind::RecvValue:
        case WorldAction::Kind::RecvLabel:
        case WorldAction::Kind::RecvChan:
        case WorldAction::Kind::RecvClose: {
          int j = find_msg_for(cfg, {e.cur, e.world_provides});
          if (j < 0) break;
          const Msg& m = cfg.msgs[j];
          Msg::Kind want = Msg::Kind::Close;
          if (a.kind == WorldAction::Kind::RecvValue) want = Msg::Kind::Value;
          if (a.kind == WorldAction::Kind::RecvLabel) want = Msg::Kind::Label;
          if (a.kind == WorldAction::Kind::RecvChan) want = Msg::Kind::Chan;
          if (m.kind != want)
            fail(Errc::Internal,
                 "runtime: input expects a different message kind on " + e.cur);
          if (m.kind == Msg::Kind::Label && !a.branch_scripts.empty()) {
            // Branch-aware label receive: jump to the script mapped for the
            // label the program chose, or stall when no reaction exists.
            auto bt = a.branch_scripts.find(m.label);
            if (bt == a.branch_scripts.end()) break;
            cfg.world_w += m.w;
            e.script = bt->second;
            e.pos = 0;
            e.cur = m.next;
            erase_msg(cfg, j);
            changed = true;
            break;
          }
          cfg.world_w += m.w;
          if (m.kind == Msg::Kind::Close) {
            erase_msg(cfg, j);
            cfg.worlds.erase(cfg.worlds.begin() + wi);
          } else {
            if (m.kind == Msg::Kind::Chan) {
              WorldEnd sub;
              sub.script = a.chan_script;
              sub.pos = 0;
              sub.cur = m.chan;
              sub.world_provides = false; // the program still provides it
              cfg.worlds.push_back(sub);
            }
            e.cur = m.next;
            e.pos++;
            erase_msg(cfg, j);
          }
          changed = true;
          break;
        }
      }
      if (changed) break;
    }
  }
}

} // namespace

void inject_input(Config& cfg, const ConcreteInput& in) {
  cfg.input = &in;
  for (const auto& [chan, root] : in.roots) {
    if (in.scripts.find(root.script) == in.scripts.end())
      fail(Errc::Internal, "input root '" + chan + "' names unknown script");
    WorldEnd e;
    e.script = root.script;
    e.pos = 0;
    e.cur = chan;
    e.world_provides = root.world_provides;
    cfg.worlds.push_back(e);
  }
  normalize_worlds(cfg);
}

Rat apply_step(Config& cfg, const Step& s) {
  Rat delta = 0;
  switch (s.kind) {
    case Step::Kind::Tick: {
      ProcState& p = cfg.procs[s.proc];
      p.w += p.term->q;
      delta = p.term->q;
      p.term = p.term->cont;
      break;
    }
    case Step::Kind::Get:
    case Step::Kind::Pay: {
      // Potential transfer is bookkeeping for the bound; no cost, no sync.
      ProcState& p = cfg.procs[s.proc];
      p.term = p.term->cont;
      break;
    }
    case Step::Kind::Spawn: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      RVPtr closure = eval_expr(cfg.prog->sig, p.venv, t.expr);
      std::vector<std::string> use_globals;
      for (const auto& u : t.spawn_uses) {
        auto it = p.cenv.find(u);
        if (it == p.cenv.end())
          fail(Errc::Internal, "runtime: spawn passes unbound channel '" + u + "'",
               t.span);
        use_globals.push_back(it->second);
        p.cenv.erase(it);
      }
      std::string g = mint(cfg);
      ProcState child = spawn_proc(cfg, closure, use_globals, g, t.span);
      p.cenv[t.chan] = g;
      p.term = t.cont;
      cfg.procs.push_back(std::move(child));
      break;
    }
    case Step::Kind::SendValue:
    case Step::Kind::SendChan:
    case Step::Kind::SendLabel: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      ChanRef r = resolve_chan(p, t.chan, t.span);
      Msg m;
      m.on = r.global;
      m.next = mint(cfg);
      m.from_provider = r.is_provider;
      m.w = 0;
      if (s.kind == Step::Kind::SendValue) {
        m.kind = Msg::Kind::Value;
        m.value = eval_expr(cfg.prog->sig, p.venv, t.expr);
      } else if (s.kind == Step::Kind::SendLabel) {
        m.kind = Msg::Kind::Label;
        m.label = t.label;
      } else {
        m.kind = Msg::Kind::Chan;
        const std::string& payload =
            t.kind == ProcTerm::Kind::SendChan ? t.chan2 : t.expr->name;
        auto it = p.cenv.find(payload);
        if (it == p.cenv.end())
          fail(Errc::Internal, "runtime: sending unbound channel '" + payload + "'",
               t.span);
        m.chan = it->second;
        p.cenv.erase(it);
      }
      if (r.is_provider)
        p.prov_name = m.next;
      else
        p.cenv[t.chan] = m.next;
      p.term = t.cont;
      cfg.msgs.push_back(std::move(m));
      break;
    }
    case Step::Kind::Close: {
      ProcState& p = cfg.procs[s.proc];
      Msg m;
      m.kind = Msg::Kind::Close;
      m.on = p.prov_name;
      m.from_provider = true;
      m.w = p.w;
      cfg.msgs.push_back(std::move(m));
      erase_proc(cfg, s.proc);
      break;
    }
    case Step::Kind::Fwd: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      auto it = p.cenv.find(t.chan2);
      if (it == p.cenv.end())
        fail(Errc::Internal, "runtime: forwarding unbound channel '" + t.chan2 + "'",
             t.span);
      Msg m;
      m.kind = Msg::Kind::Fwd;
      m.on = p.prov_name;
      m.next = it->second;
      m.from_provider = true;
      m.w = p.w;
      cfg.msgs.push_back(std::move(m));
      erase_proc(cfg, s.proc);
      break;
    }
    case Step::Kind::RecvValue:
    case Step::Kind::RecvChan: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      Msg m = cfg.msgs[s.msg];
      erase_msg(cfg, s.msg);
      p.w += m.w;
      if (s.kind == Step::Kind::RecvValue)
        p.venv[t.binder] = m.value;
      else
        p.cenv[t.binder] = m.chan;
      if (t.chan == p.prov_var)
        p.prov_name = m.next;
      else
        p.cenv[t.chan] = m.next;
      p.term = t.cont;
      break;
    }
    case Step::Kind::RecvLabel: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      Msg m = cfg.msgs[s.msg];
      erase_msg(cfg, s.msg);
      p.w += m.w;
      auto it = t.branches.find(m.label);
      if (it == t.branches.end())
        fail(Errc::Internal, "runtime: case has no branch for label '" + m.label + "'",
             t.span);
      if (t.chan == p.prov_var)
        p.prov_name = m.next;
      else
        p.cenv[t.chan] = m.next;
      p.term = it->second;
      break;
    }
    case Step::Kind::Wait: {
      ProcState& p = cfg.procs[s.proc];
      const ProcTerm& t = *p.term;
      Msg m = cfg.msgs[s.msg];
      erase_msg(cfg, s.msg);
      p.w += m.w;
      p.cenv.erase(t.chan);
      p.term = t.cont;
      break;
    }
    case Step::Kind::FwdJoinProvider: {
      ProcState& p = cfg.procs[s.proc];
      Msg m = cfg.msgs[s.msg];
      erase_msg(cfg, s.msg);
      p.w += m.w;
      p.prov_name = m.on;
      break;
    }
    case Step::Kind::FwdJoinClient: {
      ProcState& p = cfg.procs[s.proc];
      Msg m = cfg.msgs[s.msg];
      erase_msg(cfg, s.msg);
      p.w += m.w;
      for (auto& [var, g] : p.cenv)
        if (g == m.on) {
          g = m.next;
          break;
        }
      break;
    }
    case Step::Kind::FwdJoinMsg: {
      Msg f = cfg.msgs[s.msg];
      cfg.msgs[s.msg2].on = f.on;
      cfg.msgs[s.msg2].w += f.w;
      erase_msg(cfg, s.msg);
      break;
    }
  }
  normalize_worlds(cfg);
  return delta;
}

std::vector<BlockReport> blocked_report(const Config& cfg) {
  std::vector<BlockReport> out;
  for (size_t i = 0; i < cfg.procs.size(); ++i) {
    Step s;
    if (step_for_proc(cfg, i, s)) continue;
    const ProcState& p = cfg.procs[i];
    const ProcTerm& t = *p.term;
    ChanRef r = resolve_chan(p, t.chan, t.span);
    std::string what = std::string(proc_kind_name(t.kind)) + " on " + t.chan +
                       " (channel " + r.global + "): no message available";
    out.push_back({p.pid, what});
  }
  return out;
}

// --- whole-run drivers -----------------------------------------------------------

RunStats run_first_schedule(Config cfg, size_t max_steps, bool want_trace) {
  RunStats st;
  Rat sum = cfg.total_w();
  st.high_water = sum;
  auto note_peaks = [&]() {
    for (const auto& p : cfg.procs) {
      auto [it, fresh] = st.pid_peak.try_emplace(p.pid, p.w);
      if (!fresh && p.w > it->second) it->second = p.w;
    }
  };
  note_peaks();
  for (;;) {
    std::vector<Step> steps = applicable_steps(cfg);
    if (steps.empty()) break;
    if (st.steps >= max_steps)
      fail(Errc::BudgetExceeded,
           "run exceeded the step budget of " + std::to_string(max_steps));
    const Step& s = steps.front();
    std::string line;
    if (want_trace) {
      std::ostringstream os;
      os << step_kind_name(s.kind);
      if (s.proc >= 0) {
        const ProcState& p = cfg.procs[s.proc];
        os << " pid=" << p.pid << " (" << proc_kind_name(p.term->kind);
        if (!p.term->chan.empty()) os << " " << p.term->chan;
        os << ")";
      }
      line = os.str();
    }
    Rat delta = apply_step(cfg, s);
    sum += delta;
    if (sum > st.high_water) st.high_water = sum;
    note_peaks();
    st.steps++;
    if (want_trace) {
      std::ostringstream os;
      os << line << "  total work " << rat_to_string(cfg.total_w());
      st.trace.push_back(os.str());
    }
  }
  st.net_cost = cfg.total_w();
  st.finished = cfg.procs.empty();
  st.blocked = blocked_report(cfg);
  st.naive_peak_sum = 0;
  for (const auto& [pid, peak] : st.pid_peak) st.naive_peak_sum += peak;
  return st;
}

// --- canonical work-erased state encoding ----------------------------------------

namespace {

// Nodes are predicates (processes, messages, world ends); slots are the
// channel names each mentions, in a fixed per-node order. Linearity keeps
// every channel name on at most two slots, so the configuration is a graph
// of bounded degree that a deterministic DFS from a canonical root encodes
// exactly: the string determines the labeled graph up to renaming.
struct CanonNode {
  std::string sig;
  std::vector<std::string> slots;
};

std::string canon_rvalue(const RVPtr& v) {
  if (!v) return "_";
  if (v->kind == RValue::Kind::Proc) {
    std::ostringstream os;
    os << "proc@" << v->pv.get() << "{";
    for (const auto& [k, x] : v->env) os << k << "=" << canon_rvalue(x) << ";";
    os << "}";
    return os.str();
  }
  switch (v->kind) {
    case RValue::Kind::Pair:
      return "(" + canon_rvalue(v->left) + "," + canon_rvalue(v->right) + ")";
    case RValue::Kind::Inl: return "l" + canon_rvalue(v->left);
    case RValue::Kind::Inr: return "r" + canon_rvalue(v->left);
    default: return print_rvalue(v);
  }
}

std::vector<CanonNode> canon_nodes(const Config& cfg) {
  std::vector<CanonNode> nodes;
  for (const auto& p : cfg.procs) {
    CanonNode n;
    std::ostringstream os;
    os << "P|" << p.term.get() << "|";
    for (const auto& [k, v] : p.venv) os << k << "=" << canon_rvalue(v) << ";";
    os << "|" << p.prov_var << "|";
    n.slots.push_back(p.prov_name);
    for (const auto& [var, g] : p.cenv) {
      os << var << ",";
      n.slots.push_back(g);
    }
    n.sig = os.str();
    nodes.push_back(std::move(n));
  }
  for (const auto& m : cfg.msgs) {
    CanonNode n;
    std::ostringstream os;
    os << "M|" << static_cast<int>(m.kind) << "|" << m.from_provider << "|"
       << m.label << "|" << canon_rvalue(m.value);
    n.sig = os.str();
    n.slots.push_back(m.on);
    n.slots.push_back(m.next.empty() ? std::string() : m.next);
    if (m.kind == Msg::Kind::Chan) n.slots.push_back(m.chan);
    nodes.push_back(std::move(n));
  }
  for (const auto& e : cfg.worlds) {
    CanonNode n;
    std::ostringstream os;
    os << "W|" << e.script << "|" << e.pos << "|" << e.world_provides;
    n.sig = os.str();
    n.slots.push_back(e.cur);
    nodes.push_back(std::move(n));
  }
  return nodes;
}

std::string dfs_encode(const std::vector<CanonNode>& nodes,
                       const std::map<std::string, std::vector<std::pair<int, int>>>& occ,
                       int root, const std::vector<int>& component) {
  std::map<std::string, int> chan_id;
  std::vector<bool> visited(nodes.size(), false);
  std::ostringstream os;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int cur = stack.back();
    stack.pop_back();
    if (visited[cur]) continue;
    visited[cur] = true;
    os << "[" << nodes[cur].sig << "|";
    for (const auto& g : nodes[cur].slots) {
      if (g.empty()) {
        os << "-,";
        continue;
      }
      auto [it, fresh] = chan_id.emplace(g, static_cast<int>(chan_id.size()));
      os << it->second << ",";
      if (fresh) {
        for (const auto& [node, slot] : occ.at(g))
          if (!visited[node]) stack.push_back(node);
      }
    }
    os << "]";
  }
  // Disconnected parts of the component (unreachable via shared names from
  // this root) cannot occur: components are built from the same occurrence
  // relation the DFS follows. Guard anyway so a bug shows up as a bad key
  // rather than silently merged states.
  for (int n : component)
    if (!visited[n]) os << "<unreached>";
  return os.str();
}

} // namespace

std::string canonical_core(const Config& cfg) {
  std::vector<CanonNode> nodes = canon_nodes(cfg);
  std::map<std::string, std::vector<std::pair<int, int>>> occ;
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t k = 0; k < nodes[i].slots.size(); ++k)
      if (!nodes[i].slots[k].empty())
        occ[nodes[i].slots[k]].push_back({static_cast<int>(i), static_cast<int>(k)});

  // Union-find over nodes sharing channel names.
  std::vector<int> parent(nodes.size());
  for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [g, occs] : occ)
    for (size_t k = 1; k < occs.size(); ++k)
      parent[find(occs[k].first)] = find(occs[0].first);

  std::map<int, std::vector<int>> comps;
  for (size_t i = 0; i < nodes.size(); ++i)
    comps[find(static_cast<int>(i))].push_back(static_cast<int>(i));

  std::vector<std::string> encoded;
  for (const auto& [rep, members] : comps) {
    // The encoding starts with the root's local signature, so only nodes
    // with the minimal signature in the component can yield the minimum.
    const std::string* min_sig = &nodes[members[0]].sig;
    for (int n : members)
      if (nodes[n].sig < *min_sig) min_sig = &nodes[n].sig;
    std::string best;
    for (int root : members) {
      if (nodes[root].sig != *min_sig) continue;
      std::string enc = dfs_encode(nodes, occ, root, members);
      if (best.empty() || enc < best) best = std::move(enc);
    }
    encoded.push_back(std::move(best));
  }
  std::sort(encoded.begin(), encoded.end());
  std::ostringstream os;
  for (const auto& e : encoded) os << e << "#";
  return os.str();
}

// --- exhaustive schedule exploration ----------------------------------------------

namespace {

struct ExploreMemo {
  Rat peak;       // best cumulative tick prefix reachable from this state
  bool complete;  // some schedule from here ends with no processes left
  Rat net_delta;  // cumulative tick delta to such an end (when complete)
};

struct Explorer {
  std::unordered_map<std::string, ExploreMemo> memo;
  std::set<std::string> on_stack;
  size_t budget;
  size_t work = 0; // canonicalisation effort, to stop growing configurations
  bool stuck_found = false;

  ExploreMemo go(const Config& cfg) {
    // A configuration that keeps spawning makes every state new, so the
    // state count alone terminates too slowly: encoding states of size n
    // costs order n^2. Meter that work against the same budget.
    size_t n = cfg.procs.size() + cfg.msgs.size() + cfg.worlds.size();
    work += n * n;
    if (work > 64 * budget + 4096)
      fail(Errc::BudgetExceeded,
           "schedule exploration exceeded its work limit (the configuration "
           "appears to grow without bound)");
    std::string key = canonical_core(cfg);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    if (on_stack.count(key))
      fail(Errc::BudgetExceeded,
           "schedule exploration found a configuration that can loop without "
           "consuming input");
    if (memo.size() + on_stack.size() >= budget)
      fail(Errc::BudgetExceeded,
           "schedule exploration exceeded the state budget of " +
               std::to_string(budget));
    on_stack.insert(key);
    std::vector<Step> steps = applicable_steps(cfg);
    ExploreMemo r;
    r.peak = 0;
    r.complete = false;
    r.net_delta = 0;
    if (steps.empty()) {
      if (cfg.procs.empty())
        r.complete = true;
      else
        stuck_found = true;
    } else {
      for (const Step& s : steps) {
        Config next = cfg;
        Rat d = apply_step(next, s);
        ExploreMemo sub = go(next);
        Rat cand = d + sub.peak;
        if (cand > r.peak) r.peak = cand;
        if (sub.complete && !r.complete) {
          r.complete = true;
          r.net_delta = d + sub.net_delta;
        }
      }
    }
    on_stack.erase(key);
    memo.emplace(std::move(key), r);
    return r;
  }
};

} // namespace

ExploreStats explore_all_schedules(const Config& cfg, size_t state_budget) {
  Explorer ex;
  ex.budget = state_budget;
  ExploreMemo top = ex.go(cfg);
  ExploreStats st;
  Rat base = cfg.total_w();
  st.max_high_water = base + top.peak;
  st.states = ex.memo.size();
  st.stuck_found = ex.stuck_found;
  st.any_complete = top.complete;
  st.net_cost = top.complete ? base + top.net_delta : base;
  return st;
}

} // namespace sill
