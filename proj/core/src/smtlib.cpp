// SMT-LIB2 emission for path constraints. The output is deterministic down
// to the byte for a given (decls, phi) pair: declarations sort by name,
// asserts keep path order, and pairwise-distinct families fold into single
// `distinct` asserts placed after the remaining literals.
#include "sill/solve.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace sill {

namespace {

bool simple_symbol_char(char c, bool first) {
  if (c >= 'a' && c <= 'z') return true;
  if (c >= 'A' && c <= 'Z') return true;
  if (c >= '0' && c <= '9') return !first;
  return std::string("~!@$%^&*_-+=<>.?/").find(c) != std::string::npos;
}

std::string smt_symbol(const std::string& name) {
  bool simple = !name.empty();
  for (size_t i = 0; i < name.size(); ++i)
    simple = simple && simple_symbol_char(name[i], i == 0);
  if (simple) return name;
  for (char c : name)
    if (c == '|' || c == '\\')
      fail(Errc::Internal, "name '" + name + "' cannot be an SMT-LIB symbol");
  return "|" + name + "|";
}

std::string label_sort(const std::string& var) { return smt_symbol("Lbl_" + var); }
std::string label_ctor(const std::string& var, const std::string& label) {
  return smt_symbol(var + "." + label);
}

std::string smt_int(const BigInt& v) {
  if (v < 0) return "(- " + BigInt(-v).str() + ")";
  return v.str();
}

std::string smt_expr(const SymPtr& e) {
  switch (e->kind) {
    case SymExpr::Kind::IntConst: return smt_int(e->ival);
    case SymExpr::Kind::BoolConst: return e->bval ? "true" : "false";
    case SymExpr::Kind::Var: return smt_symbol(e->var);
    case SymExpr::Kind::Arith: {
      const char* op = e->aop == ArithOp::Add ? "+"
                       : e->aop == ArithOp::Sub ? "-"
                                                : "*";
      return std::string("(") + op + " " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
    }
    case SymExpr::Kind::Neg: return "(- " + smt_expr(e->a) + ")";
    case SymExpr::Kind::Cmp: {
      const char* op = e->cop == CmpOp::Eq ? "="
                       : e->cop == CmpOp::Lt ? "<"
                                             : "<=";
      return std::string("(") + op + " " + smt_expr(e->a) + " " + smt_expr(e->b) + ")";
    }
    case SymExpr::Kind::Not: return "(not " + smt_expr(e->a) + ")";
    default:
      fail(Errc::Internal,
           "expression has no SMT-LIB form: " + print_sym(e));
  }
}

// A literal of shape !(a == b) with two distinct integer variables.
bool diseq_vars(const SymPtr& e, std::string& a, std::string& b) {
  if (e->kind != SymExpr::Kind::Not) return false;
  const SymPtr& c = e->a;
  if (c->kind != SymExpr::Kind::Cmp || c->cop != CmpOp::Eq) return false;
  if (c->a->kind != SymExpr::Kind::Var || c->b->kind != SymExpr::Kind::Var)
    return false;
  if (c->a->sort != BaseType::Int || c->b->sort != BaseType::Int) return false;
  if (c->a->var == c->b->var) return false;
  a = c->a->var;
  b = c->b->var;
  return true;
}

} // namespace

std::string emit_smtlib2(const VarDecls& decls, const PathConstraint& phi) {
  std::ostringstream os;
  os << "(set-logic ALL)\n";
  for (const auto& [var, labels] : decls.choices) {
    os << "(declare-datatypes ((" << label_sort(var) << " 0)) ((";
    for (size_t i = 0; i < labels.size(); ++i) {
      if (i) os << " ";
      os << "(" << label_ctor(var, labels[i]) << ")";
    }
    os << ")))\n";
    os << "(declare-const " << smt_symbol(var) << " " << label_sort(var) << ")\n";
  }
  for (const auto& [var, sort] : decls.values) {
    // Unit-sorted variables cannot appear in literals; there is nothing to
    // declare or solve for them.
    if (sort == BaseType::Unit) continue;
    os << "(declare-const " << smt_symbol(var) << " "
       << (sort == BaseType::Int ? "Int" : "Bool") << ")\n";
  }

  for (const auto& [var, label] : phi.label_eqs)
    os << "(assert (= " << smt_symbol(var) << " " << label_ctor(var, label)
       << "))\n";

  // Find families of variables that the remaining literals make pairwise
  // distinct and fold each complete family into one `distinct`.
  std::vector<bool> folded(phi.bools.size(), false);
  std::map<std::string, std::set<std::string>> adj;
  for (const auto& lit : phi.bools) {
    std::string a, b;
    if (diseq_vars(lit, a, b)) {
      adj[a].insert(b);
      adj[b].insert(a);
    }
  }
  std::vector<std::vector<std::string>> families;
  std::set<std::string> used;
  for (const auto& [start, _] : adj) {
    if (used.count(start)) continue;
    // Connected component by walk.
    std::vector<std::string> comp{start};
    std::set<std::string> seen{start};
    for (size_t i = 0; i < comp.size(); ++i)
      for (const auto& n : adj[comp[i]])
        if (seen.insert(n).second) comp.push_back(n);
    bool complete = comp.size() >= 3;
    for (const auto& v : comp)
      complete = complete && adj[v].size() == comp.size() - 1;
    if (!complete) continue;
    used.insert(comp.begin(), comp.end());
    std::sort(comp.begin(), comp.end());
    families.push_back(std::move(comp));
  }
  for (size_t i = 0; i < phi.bools.size(); ++i) {
    std::string a, b;
    if (diseq_vars(phi.bools[i], a, b) && used.count(a) && used.count(b))
      folded[i] = true;
  }

  for (size_t i = 0; i < phi.bools.size(); ++i)
    if (!folded[i]) os << "(assert " << smt_expr(phi.bools[i]) << ")\n";
  std::sort(families.begin(), families.end());
  for (const auto& fam : families) {
    os << "(assert (distinct";
    for (const auto& v : fam) os << " " << smt_symbol(v);
    os << "))\n";
  }

  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

} // namespace sill
