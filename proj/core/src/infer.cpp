#include "sill/infer.hpp"

#include "sill/simplex.hpp"
#include "sill/typecheck.hpp"

#include <map>
#include <sstream>

namespace sill {

namespace {

// Rebuilds AST structures with solved site values. Pointer-memoised so the
// sharing structure of the input survives (exploration and equality checks
// rely on node identity for speed, not correctness, but cheap to keep).
struct Subst {
  const std::vector<Rat>& v;
  std::map<const SessionType*, TypePtr> type_memo;
  std::map<const FunTerm*, FunPtr> expr_memo;
  std::map<const ProcTerm*, ProcPtr> proc_memo;

  Rat site_value(int site, const Rat& fixed) const {
    return site >= 0 ? v[site] : fixed;
  }

  TypePtr type(const TypePtr& t) {
    if (!t) return t;
    if (auto it = type_memo.find(t.get()); it != type_memo.end())
      return it->second;
    auto n = std::make_shared<SessionType>(*t);
    n->arg = type(t->arg);
    n->cont = type(t->cont);
    n->value = funtype(t->value);
    for (auto& [l, b] : n->branches) b = type(b);
    if (t->ann_unknown()) {
      n->q = v[t->ann_site];
      n->ann_site = -1;
    }
    TypePtr out = n;
    type_memo[t.get()] = out;
    return out;
  }

  FunTypePtr funtype(const FunTypePtr& t) {
    if (!t) return t;
    if (t->kind == FunType::Kind::Base) return t;
    auto n = std::make_shared<FunType>(*t);
    n->left = funtype(t->left);
    n->right = funtype(t->right);
    if (t->proc) n->proc = iface(*t->proc);
    return n;
  }

  std::shared_ptr<ProcInterface> iface(const ProcInterface& i) {
    auto n = std::make_shared<ProcInterface>(i);
    n->provides = type(i.provides);
    for (auto& u : n->uses) u = type(u);
    if (i.init_unknown()) {
      n->init_potential = v[i.init_site];
      n->init_site = -1;
    }
    return n;
  }

  FunPtr expr(const FunPtr& e) {
    if (!e) return e;
    if (auto it = expr_memo.find(e.get()); it != expr_memo.end())
      return it->second;
    auto n = std::make_shared<FunTerm>(*e);
    for (auto& a : n->args) a = expr(a);
    if (e->kind == FunTerm::Kind::ProcVal) {
      n->iface = iface(*e->iface);
      n->body = proc(e->body);
    }
    FunPtr out = n;
    expr_memo[e.get()] = out;
    return out;
  }

  ProcPtr proc(const ProcPtr& p) {
    if (!p) return p;
    if (auto it = proc_memo.find(p.get()); it != proc_memo.end())
      return it->second;
    auto n = std::make_shared<ProcTerm>(*p);
    n->expr = expr(p->expr);
    n->cont = proc(p->cont);
    for (auto& [l, b] : n->branches) b = proc(b);
    if (p->ann_unknown()) {
      n->q = v[p->ann_site];
      n->ann_site = -1;
    }
    ProcPtr out = n;
    proc_memo[p.get()] = out;
    return out;
  }
};

} // namespace

InferResult infer_annotations(const Program& p) {
  CheckResult cr = typecheck(p);
  if (p.num_ann_sites == 0) return {p, {}};

  std::vector<Rat> ones(p.num_ann_sites, 1);
  LpResult lp = lp_solve(p.num_ann_sites, cr.constraints, ones);
  if (!lp.feasible) {
    std::ostringstream os;
    os << "no nonnegative annotation assignment satisfies the typing "
          "constraints (" << cr.constraints.size() << " collected)";
    size_t shown = 0;
    for (const auto& c : cr.constraints) {
      if (c.why.empty()) continue;
      os << (shown == 0 ? ": " : "; ") << c.why;
      if (++shown == 3) break;
    }
    fail(Errc::Infeasible, os.str());
  }

  Subst s{lp.x, {}, {}, {}};
  InferResult out;
  out.sites = lp.x;
  out.program.source_name = p.source_name;
  out.program.num_ann_sites = 0;
  for (const auto& [name, t] : p.sig.type_defs)
    out.program.sig.type_defs[name] = s.type(t);
  for (const auto& [name, d] : p.sig.fun_defs) {
    FunDef nd;
    nd.name = d.name;
    nd.span = d.span;
    for (const auto& [pn, pt] : d.params)
      nd.params.emplace_back(pn, s.funtype(pt));
    nd.value = s.expr(d.value);
    nd.ret = s.funtype(d.ret);
    out.program.sig.fun_defs[name] = std::move(nd);
  }
  out.program.sig.skeleton_defs = p.sig.skeleton_defs;
  for (const auto& e : p.config) {
    ConfigEntry ne = e;
    ne.callee = s.expr(e.callee);
    out.program.config.push_back(std::move(ne));
  }

  // The substituted program must typecheck with nothing left to solve;
  // anything else is a solver or substitution defect, not a user error.
  try {
    CheckResult check = typecheck(out.program);
    if (!check.constraints.empty())
      fail(Errc::Internal, "inference left unsolved constraints behind");
  } catch (const SillError& err) {
    if (err.code() == Errc::Internal) throw;
    fail(Errc::Internal,
         std::string("inference produced an ill-typed program: ") + err.what());
  }
  return out;
}

} // namespace sill
