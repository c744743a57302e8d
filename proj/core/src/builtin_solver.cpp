// Built-in decision procedure for the constraint fragment the language
// produces, plus the solve() orchestrator that falls back to an external
// solver for anything outside it.
//
// The complete part of the fragment: label equalities, boolean literals,
// and integer atoms that reduce to offsets (x = y + c, x = c), constant
// bounds, and disequalities between offset classes. Equalities feed an
// offset union-find rooted at a synthetic zero node, so "pinned to a
// constant" is just "in the zero node's class". Models pick the smallest
// integers that respect bounds and disequalities. Atoms outside that shape
// still get an exact rational feasibility check (simplex), which can prove
// Unsat on its own; everything else is an honest Unknown.
#include "sill/simplex.hpp"
#include "sill/solve.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sill {

namespace {

// Name reserved for the synthetic zero node; source identifiers can never
// contain a control character.
const std::string kZero = "\x01zero";

struct OffsetUF {
  std::map<std::string, std::string> parent;
  std::map<std::string, BigInt> delta; // val(x) = val(parent[x]) + delta[x]

  void ensure(const std::string& x) {
    if (parent.emplace(x, x).second) delta[x] = 0;
  }
  // Returns {root, off} with val(x) = val(root) + off.
  std::pair<std::string, BigInt> find(const std::string& x) {
    ensure(x);
    if (parent[x] == x) return {x, 0};
    auto [r, off] = find(parent[x]);
    parent[x] = r;
    delta[x] += off;
    return {r, delta[x]};
  }
  // Imposes val(x) = val(y) + d. False when it contradicts the class.
  bool unify(const std::string& x, const std::string& y, const BigInt& d) {
    auto [rx, ox] = find(x);
    auto [ry, oy] = find(y);
    if (rx == ry) return ox == oy + d;
    parent[rx] = ry;
    delta[rx] = oy + d - ox;
    return true;
  }
};

// Floor division for exact integer bound arithmetic.
BigInt floor_div(const BigInt& a, const BigInt& b) {
  BigInt q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}
BigInt ceil_div(const BigInt& a, const BigInt& b) { return -floor_div(-a, b); }

struct IntAtom {
  enum class Rel { Eq, Neq, Le }; // LinForm f: f = 0, f != 0, f <= 0
  Rel rel;
  LinForm f;
};

struct RootInfo {
  std::optional<BigInt> lo, hi;
  std::set<BigInt> excluded;
  // Disequality partners: val(this) != val(root) + off must hold.
  std::vector<std::pair<std::string, BigInt>> diseq;
};

} // namespace

void complete_model(const VarDecls& decls, SkelModel& m) {
  for (const auto& [var, sort] : decls.values) {
    if (m.values.count(var)) continue;
    switch (sort) {
      case BaseType::Unit: m.values[var] = RValue::mk_unit(); break;
      case BaseType::Bool: m.values[var] = RValue::mk_bool(false); break;
      case BaseType::Int: m.values[var] = RValue::mk_int(0); break;
    }
  }
  for (const auto& [var, labels] : decls.choices) {
    if (m.labels.count(var)) continue;
    if (labels.empty())
      fail(Errc::Internal, "choice variable '" + var + "' has no labels");
    m.labels[var] = labels.front();
  }
}

SolveResult solve_builtin(const VarDecls& decls, const PathConstraint& phi) {
  auto unsat = [](std::string why) {
    SolveResult r;
    r.status = SolveStatus::Unsat;
    r.detail = std::move(why);
    return r;
  };
  auto unknown = [](std::string why) {
    SolveResult r;
    r.status = SolveStatus::Unknown;
    r.detail = std::move(why);
    return r;
  };

  SkelModel model;

  // Labels: conjunctions of positive equalities, so consistency is just
  // "one label per variable".
  for (const auto& [var, label] : phi.label_eqs) {
    auto uni = decls.choices.find(var);
    if (uni == decls.choices.end() ||
        std::find(uni->second.begin(), uni->second.end(), label) ==
            uni->second.end())
      fail(Errc::Internal, "constraint uses undeclared label literal '" + var +
                               " = " + label + "'");
    auto [it, fresh] = model.labels.emplace(var, label);
    if (!fresh && it->second != label)
      return unsat("choice variable '" + var + "' would need both label '" +
                   it->second + "' and '" + label + "'");
  }

  // Boolean literals and integer atoms.
  std::vector<IntAtom> atoms;
  auto linearize = [&](const SymPtr& lhs, const SymPtr& rhs,
                       IntAtom::Rel rel) -> std::optional<std::string> {
    auto l = to_linear(lhs), r = to_linear(rhs);
    if (!l || !r) return "nonlinear integer atom";
    IntAtom a;
    a.rel = rel;
    a.f = *l;
    for (const auto& [v, k] : r->coeff) {
      BigInt& mine = a.f.coeff[v];
      mine -= k;
      if (mine == 0) a.f.coeff.erase(v);
    }
    a.f.c -= r->c;
    atoms.push_back(std::move(a));
    return std::nullopt;
  };

  for (const auto& lit : phi.bools) {
    bool positive = lit->kind != SymExpr::Kind::Not;
    const SymPtr& body = positive ? lit : lit->a;
    switch (body->kind) {
      case SymExpr::Kind::BoolConst:
        if (body->bval != positive) return unsat("constant false literal");
        break;
      case SymExpr::Kind::Var: {
        if (body->sort != BaseType::Bool)
          fail(Errc::Internal, "non-boolean variable used as a literal");
        auto [it, fresh] = model.values.emplace(body->var,
                                                RValue::mk_bool(positive));
        if (!fresh && it->second->bval != positive)
          return unsat("boolean variable '" + body->var +
                       "' is forced both ways");
        break;
      }
      case SymExpr::Kind::Cmp: {
        std::optional<std::string> bad;
        switch (body->cop) {
          case CmpOp::Eq:
            bad = linearize(body->a, body->b,
                            positive ? IntAtom::Rel::Eq : IntAtom::Rel::Neq);
            break;
          case CmpOp::Lt:
            // a < b  ==>  a - b + 1 <= 0;   !(a < b)  ==>  b - a <= 0
            bad = positive ? linearize(body->a, body->b, IntAtom::Rel::Le)
                           : linearize(body->b, body->a, IntAtom::Rel::Le);
            if (!bad && positive) atoms.back().f.c += 1;
            break;
          case CmpOp::Le:
            // a <= b ==>  a - b <= 0;  !(a <= b)  ==>  b - a + 1 <= 0
            bad = positive ? linearize(body->a, body->b, IntAtom::Rel::Le)
                           : linearize(body->b, body->a, IntAtom::Rel::Le);
            if (!bad && !positive) atoms.back().f.c += 1;
            break;
        }
        if (bad) return unknown(*bad);
        break;
      }
      default: return unknown("literal outside the supported fragment");
    }
  }

  // Equalities: saturate the offset union-find. Re-substitute after every
  // round so chains like x = y, y = 3 pin both.
  OffsetUF uf;
  uf.ensure(kZero);
  auto substitute = [&](const LinForm& f) {
    LinForm out;
    out.c = f.c;
    for (const auto& [v, k] : f.coeff) {
      auto [r, off] = uf.find(v);
      out.c += k * off;
      if (r == uf.find(kZero).first) {
        // val(r) = -off(kZero); fold the pinned class into the constant.
        out.c -= k * uf.find(kZero).second;
        continue;
      }
      BigInt& mine = out.coeff[r];
      mine += k;
      if (mine == 0) out.coeff.erase(r);
    }
    return out;
  };

  std::vector<IntAtom> pending; // equalities not yet absorbed
  std::vector<IntAtom> rest;
  for (auto& a : atoms)
    (a.rel == IntAtom::Rel::Eq ? pending : rest).push_back(a);

  std::vector<IntAtom> general; // outside the offset shape
  bool progress = true;
  while (progress) {
    progress = false;
    std::vector<IntAtom> next;
    for (auto& a : pending) {
      LinForm f = substitute(a.f);
      if (f.coeff.empty()) {
        if (f.c != 0) return unsat("contradictory equality");
        progress = true;
        continue;
      }
      if (f.coeff.size() == 1) {
        auto [v, k] = *f.coeff.begin();
        if (f.c % k != 0)
          return unsat("equality forces a non-integer value for '" + v + "'");
        if (!uf.unify(v, kZero, -f.c / k))
          return unsat("conflicting constant values for '" + v + "'");
        progress = true;
        continue;
      }
      if (f.coeff.size() == 2) {
        auto it = f.coeff.begin();
        auto [v1, k1] = *it++;
        auto [v2, k2] = *it;
        if (k1 + k2 == 0) {
          // k*(v1 - v2) + c = 0
          if (f.c % k1 != 0)
            return unsat("equality forces a non-integer offset between '" +
                         v1 + "' and '" + v2 + "'");
          if (!uf.unify(v1, v2, -f.c / k1))
            return unsat("conflicting offsets between '" + v1 + "' and '" + v2 +
                         "'");
          progress = true;
          continue;
        }
      }
      next.push_back(a);
    }
    pending = std::move(next);
  }
  for (auto& a : pending) general.push_back({a.rel, substitute(a.f)});

  // Bounds and disequalities over the offset classes.
  std::map<std::string, RootInfo> roots;
  auto note_root = [&](const std::string& r) -> RootInfo& { return roots[r]; };
  for (auto& a : rest) {
    LinForm f = substitute(a.f);
    if (f.coeff.empty()) {
      bool ok = a.rel == IntAtom::Rel::Le ? f.c <= 0 : f.c != 0;
      if (!ok)
        return unsat(a.rel == IntAtom::Rel::Le ? "contradictory constant bound"
                                               : "contradictory disequality");
      continue;
    }
    if (a.rel == IntAtom::Rel::Le) {
      if (f.coeff.size() != 1) {
        general.push_back({a.rel, f});
        continue;
      }
      auto [v, k] = *f.coeff.begin();
      RootInfo& ri = note_root(v);
      if (k > 0) {
        BigInt hi = floor_div(-f.c, k);
        if (!ri.hi || hi < *ri.hi) ri.hi = hi;
      } else {
        BigInt lo = ceil_div(-f.c, k);
        if (!ri.lo || lo > *ri.lo) ri.lo = lo;
      }
      continue;
    }
    // Disequality.
    if (f.coeff.size() == 1) {
      auto [v, k] = *f.coeff.begin();
      if (f.c % k == 0) note_root(v).excluded.insert(-f.c / k);
      continue; // not divisible: the atom is always true over the integers
    }
    if (f.coeff.size() == 2) {
      auto it = f.coeff.begin();
      auto [v1, k1] = *it++;
      auto [v2, k2] = *it;
      if (k1 + k2 == 0 && f.c % k1 == 0) {
        // val(v1) != val(v2) - c/k1, recorded on both sides.
        note_root(v1).diseq.emplace_back(v2, -f.c / k1);
        note_root(v2).diseq.emplace_back(v1, f.c / k1);
        continue;
      }
    }
    general.push_back({a.rel, f});
  }

  if (!general.empty()) {
    // Exact rational feasibility over every equality and inequality (the
    // disequalities are dropped, which keeps Unsat sound). Each variable is
    // split into a difference of nonnegatives for the simplex.
    std::map<std::string, int> idx;
    auto var_of = [&](const std::string& v) {
      auto [it, fresh] = idx.emplace(v, static_cast<int>(idx.size()) * 2);
      (void)fresh;
      return it->second;
    };
    std::vector<LinConstraint> lp;
    auto add = [&](const LinForm& f, LinConstraint::Kind kind, bool negate) {
      LinConstraint c;
      c.kind = kind;
      c.e.c = Rat(negate ? -f.c : f.c);
      for (const auto& [v, k] : f.coeff) {
        int i = var_of(v);
        Rat kk = Rat(negate ? -k : k);
        c.e.coeff[i] += kk;
        c.e.coeff[i + 1] -= kk;
      }
      lp.push_back(std::move(c));
    };
    auto add_root_bounds = [&](const std::string& r, const RootInfo& ri) {
      LinForm f;
      if (ri.lo) { // val >= lo  ==>  val - lo >= 0
        f.coeff = {{r, 1}};
        f.c = -*ri.lo;
        add(f, LinConstraint::Kind::Geq0, false);
      }
      if (ri.hi) { // val <= hi  ==>  hi - val >= 0
        f.coeff = {{r, -1}};
        f.c = *ri.hi;
        add(f, LinConstraint::Kind::Geq0, false);
      }
    };
    for (const auto& a : general)
      switch (a.rel) {
        case IntAtom::Rel::Eq: add(a.f, LinConstraint::Kind::Eq0, false); break;
        case IntAtom::Rel::Le: add(a.f, LinConstraint::Kind::Geq0, true); break;
        case IntAtom::Rel::Neq: break;
      }
    for (const auto& [r, ri] : roots) add_root_bounds(r, ri);
    std::vector<Rat> obj(idx.size() * 2, 0);
    LpResult lr = lp_solve(static_cast<int>(idx.size()) * 2, lp, obj);
    if (!lr.feasible)
      return unsat("linear atoms are infeasible over the rationals");
    bool have_diseq = !std::all_of(roots.begin(), roots.end(), [](auto& e) {
      return e.second.diseq.empty() && e.second.excluded.empty();
    });
    for (const auto& a : general)
      have_diseq = have_diseq || a.rel == IntAtom::Rel::Neq;
    if (!have_diseq) {
      bool integral = true;
      std::map<std::string, BigInt> vals;
      for (const auto& [v, i] : idx) {
        Rat x = lr.x[i] - lr.x[i + 1];
        if (!is_integer(x)) {
          integral = false;
          break;
        }
        vals[v] = numerator(x);
      }
      if (integral) {
        // The rational witness happens to be integral: adopt it.
        for (const auto& [v, val] : vals)
          if (!uf.unify(v, kZero, val))
            fail(Errc::Internal, "feasible point contradicts the union-find");
        general.clear();
      }
    }
    if (!general.empty())
      return unknown("atoms beyond the offset fragment with a rationally "
                     "feasible system; an external solver may decide it");
  }

  // Assign the offset classes: pinned classes are fixed, the rest take the
  // smallest integers that respect bounds, exclusions, and disequalities.
  auto zero_root = uf.find(kZero).first;
  auto pinned_val = [&](const std::string& v) -> std::optional<BigInt> {
    auto [r, off] = uf.find(v);
    if (r != zero_root) return std::nullopt;
    return off - uf.find(kZero).second;
  };

  // Every variable mentioned anywhere joins the assignment worklist.
  std::set<std::string> int_vars;
  for (const auto& a : atoms)
    for (const auto& [v, _] : a.f.coeff) int_vars.insert(v);

  std::map<std::string, BigInt> root_val;
  {
    auto [r0, o0] = uf.find(kZero);
    root_val[r0] = -o0;
  }
  // Check pinned classes against their constraints first.
  for (const auto& [r, ri] : roots) {
    auto pv = pinned_val(r);
    if (!pv) continue;
    if ((ri.lo && *pv < *ri.lo) || (ri.hi && *pv > *ri.hi))
      return unsat("pinned value for a class violates its bounds");
    if (ri.excluded.count(*pv))
      return unsat("pinned value for a class hits an excluded value");
    for (const auto& [other, off] : ri.diseq) {
      auto ov = pinned_val(other);
      if (ov && *pv == *ov + off)
        return unsat("two pinned classes violate a disequality");
    }
  }
  // Unpinned classes in name order, bounded-above ones first so the scan
  // cannot walk past a ceiling that a later choice would have freed.
  std::vector<std::string> todo;
  {
    std::set<std::string> seen;
    for (const auto& v : int_vars) {
      auto [r, off] = uf.find(v);
      if (r != zero_root && seen.insert(r).second) todo.push_back(r);
    }
  }
  std::stable_sort(todo.begin(), todo.end(), [&](const auto& a, const auto& b) {
    bool ba = roots.count(a) && roots.at(a).hi.has_value();
    bool bb = roots.count(b) && roots.at(b).hi.has_value();
    return ba > bb;
  });
  for (const auto& r : todo) {
    RootInfo ri = roots.count(r) ? roots.at(r) : RootInfo{};
    BigInt v = ri.lo ? *ri.lo : BigInt(0);
    for (;;) {
      if (ri.hi && v > *ri.hi)
        return unsat("no integer fits the bounds and disequalities of a class");
      bool clash = ri.excluded.count(v) != 0;
      for (const auto& [other, off] : ri.diseq) {
        if (clash) break;
        auto [ro, oo] = uf.find(other);
        std::optional<BigInt> ov;
        if (auto pv = pinned_val(other))
          ov = pv;
        else if (auto it = root_val.find(ro); it != root_val.end())
          ov = it->second + oo; // val(other) = val(root) + off(other)
        if (ov && v == *ov + off) clash = true;
      }
      if (!clash) break;
      ++v;
    }
    root_val[r] = v;
  }

  for (const auto& v : int_vars) {
    auto [r, off] = uf.find(v);
    auto it = root_val.find(r);
    if (it == root_val.end())
      fail(Errc::Internal, "offset class escaped assignment");
    model.values[v] = RValue::mk_int(it->second + off);
  }

  complete_model(decls, model);
  if (!model_satisfies(phi, model))
    fail(Errc::Internal,
         "built-in solver produced a model that fails re-substitution");
  SolveResult r;
  r.status = SolveStatus::Sat;
  r.model = std::move(model);
  return r;
}

SolveResult solve(const VarDecls& decls, const PathConstraint& phi,
                  const SolveOptions& opts) {
  SolveResult r = solve_builtin(decls, phi);
  if (r.status != SolveStatus::Unknown) return r;
  if (!opts.external) return r;
  return solve_external(*opts.external, decls, phi);
}

} // namespace sill
