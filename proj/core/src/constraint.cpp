#include "sill/constraint.hpp"

#include <sstream>

namespace sill {

namespace {

std::shared_ptr<SymExpr> se(SymExpr::Kind k) {
  auto e = std::make_shared<SymExpr>();
  e->kind = k;
  return e;
}

} // namespace

SymPtr SymExpr::mk_int(BigInt v) {
  auto e = se(Kind::IntConst);
  e->ival = std::move(v);
  return e;
}
SymPtr SymExpr::mk_bool(bool b) {
  auto e = se(Kind::BoolConst);
  e->bval = b;
  return e;
}
SymPtr SymExpr::mk_unit() { return se(Kind::UnitConst); }
SymPtr SymExpr::mk_var(std::string name, BaseType sort) {
  auto e = se(Kind::Var);
  e->var = std::move(name);
  e->sort = sort;
  return e;
}
SymPtr SymExpr::mk_arith(ArithOp op, SymPtr a, SymPtr b) {
  if (a->kind == Kind::IntConst && b->kind == Kind::IntConst) {
    switch (op) {
      case ArithOp::Add: return mk_int(a->ival + b->ival);
      case ArithOp::Sub: return mk_int(a->ival - b->ival);
      case ArithOp::Mul: return mk_int(a->ival * b->ival);
    }
  }
  auto e = se(Kind::Arith);
  e->aop = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
SymPtr SymExpr::mk_neg(SymPtr a) {
  if (a->kind == Kind::IntConst) return mk_int(-a->ival);
  auto e = se(Kind::Neg);
  e->a = std::move(a);
  return e;
}
SymPtr SymExpr::mk_cmp(CmpOp op, SymPtr a, SymPtr b) {
  if (a->kind == Kind::IntConst && b->kind == Kind::IntConst) {
    switch (op) {
      case CmpOp::Eq: return mk_bool(a->ival == b->ival);
      case CmpOp::Lt: return mk_bool(a->ival < b->ival);
      case CmpOp::Le: return mk_bool(a->ival <= b->ival);
    }
  }
  auto e = se(Kind::Cmp);
  e->cop = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}
SymPtr SymExpr::mk_not(SymPtr a) {
  if (a->kind == Kind::BoolConst) return mk_bool(!a->bval);
  if (a->kind == Kind::Not) return a->a;
  auto e = se(Kind::Not);
  e->a = std::move(a);
  return e;
}
SymPtr SymExpr::mk_pair(SymPtr l, SymPtr r) {
  auto e = se(Kind::Pair);
  e->a = std::move(l);
  e->b = std::move(r);
  return e;
}
SymPtr SymExpr::mk_inl(SymPtr v) {
  auto e = se(Kind::Inl);
  e->a = std::move(v);
  return e;
}
SymPtr SymExpr::mk_inr(SymPtr v) {
  auto e = se(Kind::Inr);
  e->a = std::move(v);
  return e;
}
SymPtr SymExpr::mk_procval(FunPtr pv, std::map<std::string, SymPtr> env) {
  auto e = se(Kind::Proc);
  e->pv = std::move(pv);
  e->env = std::move(env);
  return e;
}

bool sym_is_const(const SymPtr& e) {
  if (!e) return false;
  switch (e->kind) {
    case SymExpr::Kind::IntConst:
    case SymExpr::Kind::BoolConst:
    case SymExpr::Kind::UnitConst: return true;
    case SymExpr::Kind::Var: return false;
    case SymExpr::Kind::Pair: return sym_is_const(e->a) && sym_is_const(e->b);
    case SymExpr::Kind::Inl:
    case SymExpr::Kind::Inr: return sym_is_const(e->a);
    case SymExpr::Kind::Neg:
    case SymExpr::Kind::Not: return sym_is_const(e->a);
    case SymExpr::Kind::Arith:
    case SymExpr::Kind::Cmp: return sym_is_const(e->a) && sym_is_const(e->b);
    case SymExpr::Kind::Proc: {
      for (const auto& [k, v] : e->env)
        if (!sym_is_const(v)) return false;
      return true;
    }
  }
  return false;
}

std::string print_sym(const SymPtr& e) {
  if (!e) return "<null>";
  switch (e->kind) {
    case SymExpr::Kind::IntConst: return e->ival.str();
    case SymExpr::Kind::BoolConst: return e->bval ? "true" : "false";
    case SymExpr::Kind::UnitConst: return "()";
    case SymExpr::Kind::Var: return e->var;
    case SymExpr::Kind::Arith: {
      const char* op = e->aop == ArithOp::Add ? " + "
                       : e->aop == ArithOp::Sub ? " - "
                                                : " * ";
      return "(" + print_sym(e->a) + op + print_sym(e->b) + ")";
    }
    case SymExpr::Kind::Neg: return "-" + print_sym(e->a);
    case SymExpr::Kind::Cmp: {
      const char* op = e->cop == CmpOp::Eq ? " == "
                       : e->cop == CmpOp::Lt ? " < "
                                             : " <= ";
      return "(" + print_sym(e->a) + op + print_sym(e->b) + ")";
    }
    case SymExpr::Kind::Not: return "!" + print_sym(e->a);
    case SymExpr::Kind::Pair:
      return "(" + print_sym(e->a) + ", " + print_sym(e->b) + ")";
    case SymExpr::Kind::Inl: return "inl " + print_sym(e->a);
    case SymExpr::Kind::Inr: return "inr " + print_sym(e->a);
    case SymExpr::Kind::Proc: return "<process>";
  }
  return "<?>";
}

SymPtr sym_of_rvalue(const RVPtr& v) {
  if (!v) fail(Errc::Internal, "symbolic lift of a null value");
  switch (v->kind) {
    case RValue::Kind::Unit: return SymExpr::mk_unit();
    case RValue::Kind::Bool: return SymExpr::mk_bool(v->bval);
    case RValue::Kind::Int: return SymExpr::mk_int(v->ival);
    case RValue::Kind::Pair:
      return SymExpr::mk_pair(sym_of_rvalue(v->left), sym_of_rvalue(v->right));
    case RValue::Kind::Inl: return SymExpr::mk_inl(sym_of_rvalue(v->left));
    case RValue::Kind::Inr: return SymExpr::mk_inr(sym_of_rvalue(v->left));
    case RValue::Kind::Proc: {
      std::map<std::string, SymPtr> env;
      for (const auto& [k, x] : v->env) env.emplace(k, sym_of_rvalue(x));
      return SymExpr::mk_procval(v->pv, std::move(env));
    }
  }
  fail(Errc::Internal, "symbolic lift of an unhandled value kind");
}

// --- path constraints -----------------------------------------------------

void PathConstraint::add_bool(SymPtr b) {
  if (b->kind == SymExpr::Kind::BoolConst && b->bval) return;
  bools.push_back(std::move(b));
}

void PathConstraint::add_label(std::string var, std::string label) {
  label_eqs.emplace_back(std::move(var), std::move(label));
}

bool PathConstraint::trivially_false() const {
  for (const auto& b : bools)
    if (b->kind == SymExpr::Kind::BoolConst && !b->bval) return true;
  return false;
}

std::string print_path_constraint(const PathConstraint& phi) {
  std::ostringstream os;
  bool first = true;
  auto sep = [&]() {
    if (!first) os << " /\\ ";
    first = false;
  };
  for (const auto& [var, label] : phi.label_eqs) {
    sep();
    os << var << " = " << label;
  }
  for (const auto& b : phi.bools) {
    sep();
    os << print_sym(b);
  }
  if (first) os << "true";
  return os.str();
}

void VarDecls::merge(const VarDecls& o) {
  for (const auto& [name, sort] : o.values) {
    if (choices.count(name) || !values.emplace(name, sort).second)
      fail(Errc::DuplicateSkeletonVariable,
           "variable '" + name + "' is used by more than one skeleton");
  }
  for (const auto& [name, labels] : o.choices) {
    if (values.count(name) || !choices.emplace(name, labels).second)
      fail(Errc::DuplicateSkeletonVariable,
           "variable '" + name + "' is used by more than one skeleton");
  }
}

std::string print_model(const SkelModel& m) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [var, v] : m.values) {
    if (!first) os << ", ";
    first = false;
    os << var << " = " << print_rvalue(v);
  }
  for (const auto& [var, l] : m.labels) {
    if (!first) os << ", ";
    first = false;
    os << var << " = " << l;
  }
  if (first) os << "(empty)";
  return os.str();
}

// --- evaluation under a model ----------------------------------------------

RVPtr sym_eval(const SymPtr& e, const SkelModel& m) {
  if (!e) fail(Errc::Internal, "evaluating a null symbolic expression");
  switch (e->kind) {
    case SymExpr::Kind::IntConst: return RValue::mk_int(e->ival);
    case SymExpr::Kind::BoolConst: return RValue::mk_bool(e->bval);
    case SymExpr::Kind::UnitConst: return RValue::mk_unit();
    case SymExpr::Kind::Var: {
      auto it = m.values.find(e->var);
      if (it == m.values.end())
        fail(Errc::MissingAssignment,
             "model assigns no value to variable '" + e->var + "'");
      return it->second;
    }
    case SymExpr::Kind::Arith: {
      RVPtr a = sym_eval(e->a, m), b = sym_eval(e->b, m);
      if (a->kind != RValue::Kind::Int || b->kind != RValue::Kind::Int)
        fail(Errc::Internal, "arithmetic on non-integers under a model");
      switch (e->aop) {
        case ArithOp::Add: return RValue::mk_int(a->ival + b->ival);
        case ArithOp::Sub: return RValue::mk_int(a->ival - b->ival);
        case ArithOp::Mul: return RValue::mk_int(a->ival * b->ival);
      }
      break;
    }
    case SymExpr::Kind::Neg: {
      RVPtr a = sym_eval(e->a, m);
      if (a->kind != RValue::Kind::Int)
        fail(Errc::Internal, "negation of a non-integer under a model");
      return RValue::mk_int(-a->ival);
    }
    case SymExpr::Kind::Cmp: {
      RVPtr a = sym_eval(e->a, m), b = sym_eval(e->b, m);
      switch (e->cop) {
        case CmpOp::Eq: return RValue::mk_bool(rvalue_equal(a, b));
        case CmpOp::Lt:
        case CmpOp::Le: {
          if (a->kind != RValue::Kind::Int || b->kind != RValue::Kind::Int)
            fail(Errc::Internal, "ordering of non-integers under a model");
          bool r = e->cop == CmpOp::Lt ? a->ival < b->ival : a->ival <= b->ival;
          return RValue::mk_bool(r);
        }
      }
      break;
    }
    case SymExpr::Kind::Not: {
      RVPtr a = sym_eval(e->a, m);
      if (a->kind != RValue::Kind::Bool)
        fail(Errc::Internal, "negation of a non-boolean under a model");
      return RValue::mk_bool(!a->bval);
    }
    case SymExpr::Kind::Pair:
      return RValue::mk_pair(sym_eval(e->a, m), sym_eval(e->b, m));
    case SymExpr::Kind::Inl: return RValue::mk_inl(sym_eval(e->a, m));
    case SymExpr::Kind::Inr: return RValue::mk_inr(sym_eval(e->a, m));
    case SymExpr::Kind::Proc: {
      std::map<std::string, RVPtr> env;
      for (const auto& [k, v] : e->env) env.emplace(k, sym_eval(v, m));
      return RValue::mk_proc(e->pv, std::move(env));
    }
  }
  fail(Errc::Internal, "unhandled symbolic expression kind");
}

bool model_satisfies(const PathConstraint& phi, const SkelModel& m) {
  for (const auto& [var, label] : phi.label_eqs) {
    auto it = m.labels.find(var);
    if (it == m.labels.end())
      fail(Errc::MissingAssignment,
           "model assigns no label to choice variable '" + var + "'");
    if (it->second != label) return false;
  }
  for (const auto& b : phi.bools) {
    RVPtr v = sym_eval(b, m);
    if (v->kind != RValue::Kind::Bool)
      fail(Errc::Internal, "path literal evaluated to a non-boolean");
    if (!v->bval) return false;
  }
  return true;
}

// --- linear views ------------------------------------------------------------

namespace {

bool lin_acc(const SymPtr& e, const BigInt& scale, LinForm& out) {
  switch (e->kind) {
    case SymExpr::Kind::IntConst:
      out.c += scale * e->ival;
      return true;
    case SymExpr::Kind::Var: {
      if (e->sort != BaseType::Int) return false;
      BigInt& k = out.coeff[e->var];
      k += scale;
      if (k == 0) out.coeff.erase(e->var);
      return true;
    }
    case SymExpr::Kind::Neg: return lin_acc(e->a, -scale, out);
    case SymExpr::Kind::Arith:
      switch (e->aop) {
        case ArithOp::Add:
          return lin_acc(e->a, scale, out) && lin_acc(e->b, scale, out);
        case ArithOp::Sub:
          return lin_acc(e->a, scale, out) && lin_acc(e->b, -scale, out);
        case ArithOp::Mul:
          if (e->a->kind == SymExpr::Kind::IntConst)
            return lin_acc(e->b, scale * e->a->ival, out);
          if (e->b->kind == SymExpr::Kind::IntConst)
            return lin_acc(e->a, scale * e->b->ival, out);
          return false;
      }
      return false;
    default: return false;
  }
}

} // namespace

std::optional<LinForm> to_linear(const SymPtr& e) {
  LinForm f;
  f.c = 0;
  if (!lin_acc(e, 1, f)) return std::nullopt;
  return f;
}

} // namespace sill
