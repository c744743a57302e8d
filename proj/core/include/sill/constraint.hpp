// Symbolic values and path constraints for worst-case input search.
//
// Symbolic execution runs the functional layer over terms instead of values:
// skeleton variables stand for the integers, booleans, and labels the
// external world will choose. Branching on a symbolic boolean records the
// branch condition, so a finished path carries a conjunction of literals
// whose models are exactly the inputs that drive the program down that path.
//
// The expression language mirrors the functional layer: integer arithmetic,
// comparisons (int-typed operands only, as in the typechecker), boolean
// constants and variables, and structured values (pairs, injections, process
// closures). Structure is always concrete; only base-sort leaves are
// symbolic. Constructors fold constants so fully concrete programs produce
// constant expressions throughout.
#pragma once

#include "sill/ast.hpp"
#include "sill/semantics.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sill {

struct SymExpr;
using SymPtr = std::shared_ptr<const SymExpr>;

struct SymExpr {
  enum class Kind {
    IntConst,
    BoolConst,
    UnitConst,
    Var,   // a skeleton variable of base sort (name + sort)
    Arith, // aop(a, b), integer
    Neg,   // -a, integer
    Cmp,   // cop(a, b), integers compared, boolean result
    Not,   // !a, boolean
    Pair,  // (a, b)
    Inl,   // inl a
    Inr,   // inr a
    Proc,  // process closure over a symbolic environment
  };
  Kind kind;
  BigInt ival = 0;
  bool bval = false;
  std::string var;
  BaseType sort = BaseType::Int; // Var only
  ArithOp aop = ArithOp::Add;
  CmpOp cop = CmpOp::Eq;
  SymPtr a, b;
  // Proc payload: the literal plus the captured symbolic environment.
  FunPtr pv;
  std::map<std::string, SymPtr> env;

  static SymPtr mk_int(BigInt v);
  static SymPtr mk_bool(bool b);
  static SymPtr mk_unit();
  static SymPtr mk_var(std::string name, BaseType sort);
  static SymPtr mk_arith(ArithOp op, SymPtr a, SymPtr b); // folds constants
  static SymPtr mk_neg(SymPtr a);
  static SymPtr mk_cmp(CmpOp op, SymPtr a, SymPtr b); // folds constants
  static SymPtr mk_not(SymPtr a);                     // cancels double nots
  static SymPtr mk_pair(SymPtr l, SymPtr r);
  static SymPtr mk_inl(SymPtr v);
  static SymPtr mk_inr(SymPtr v);
  static SymPtr mk_procval(FunPtr pv, std::map<std::string, SymPtr> env);
};

// True when the expression is a constant of its sort (no variables at all).
bool sym_is_const(const SymPtr& e);

std::string print_sym(const SymPtr& e);

// Lifts a concrete runtime value into a constant symbolic value.
SymPtr sym_of_rvalue(const RVPtr& v);

// A path constraint: one conjunction of literals. Boolean literals are
// boolean-sorted expressions (possibly negated comparisons); label literals
// equate a choice variable with the label the path selected. Symbolic
// execution only ever conjoins, so no tree structure is needed; disjunction
// lives in the search over paths.
struct PathConstraint {
  std::vector<SymPtr> bools;
  std::vector<std::pair<std::string, std::string>> label_eqs;

  void add_bool(SymPtr b);                           // drops literal `true`
  void add_label(std::string var, std::string label);
  bool trivially_false() const; // some literal folded to constant false
  size_t size() const { return bools.size() + label_eqs.size(); }
};

std::string print_path_constraint(const PathConstraint& phi);

// The variables a constraint may mention: value variables with their base
// sorts and choice variables with their label universes. This is the same
// shape check_compat collects per channel.
struct VarDecls {
  std::map<std::string, BaseType> values;
  std::map<std::string, std::vector<std::string>> choices;

  void merge(const VarDecls& o); // rejects clashes with DuplicateSkeletonVariable
};

// A model: concrete values for value variables and labels for choice
// variables. Solvers return total models over the declared variables.
struct SkelModel {
  std::map<std::string, RVPtr> values;
  std::map<std::string, std::string> labels;
};

std::string print_model(const SkelModel& m);

// Evaluates a closed-under-model expression to a concrete value. Fails with
// MissingAssignment when a variable has no binding in the model.
RVPtr sym_eval(const SymPtr& e, const SkelModel& m);

// Whether the model makes every literal of the constraint true. This is the
// re-substitution check applied to every satisfiable solver answer.
bool model_satisfies(const PathConstraint& phi, const SkelModel& m);

// A linear view of an integer expression: sum of coeff*var plus a constant.
// Returned only when the expression is linear (products need a constant
// side); the built-in solver works on this form.
struct LinForm {
  std::map<std::string, BigInt> coeff;
  BigInt c;
};
std::optional<LinForm> to_linear(const SymPtr& e);

} // namespace sill
