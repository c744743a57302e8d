// The constraint solvers: built-in decision procedure, SMT-LIB2 emission,
// external solver adapter, and the orchestrator that ties them together.
#include "test_util.hpp"

#include "sill/solve.hpp"

using namespace sill;

namespace {

SymPtr ivar(const std::string& n) { return SymExpr::mk_var(n, BaseType::Int); }
SymPtr bvar(const std::string& n) { return SymExpr::mk_var(n, BaseType::Bool); }
SymPtr icst(long v) { return SymExpr::mk_int(BigInt(v)); }

SymPtr eq(SymPtr a, SymPtr b) { return SymExpr::mk_cmp(CmpOp::Eq, a, b); }
SymPtr lt(SymPtr a, SymPtr b) { return SymExpr::mk_cmp(CmpOp::Lt, a, b); }
SymPtr le(SymPtr a, SymPtr b) { return SymExpr::mk_cmp(CmpOp::Le, a, b); }
SymPtr add(SymPtr a, SymPtr b) { return SymExpr::mk_arith(ArithOp::Add, a, b); }
SymPtr mul(SymPtr a, SymPtr b) { return SymExpr::mk_arith(ArithOp::Mul, a, b); }

VarDecls ints(std::initializer_list<std::string> names) {
  VarDecls d;
  for (const auto& n : names) d.values[n] = BaseType::Int;
  return d;
}

BigInt model_int(const SolveResult& r, const std::string& v) {
  REQUIRE(r.model.values.count(v));
  REQUIRE_EQ(r.model.values.at(v)->kind, RValue::Kind::Int);
  return r.model.values.at(v)->ival;
}

} // namespace

TEST_CASE("builtin: pinned equalities chain through offsets") {
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), add(ivar("y"), icst(1))));
  phi.add_bool(eq(ivar("y"), icst(3)));
  auto r = solve_builtin(ints({"x", "y"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 4);
  CHECK_EQ(model_int(r, "y"), 3);
  CHECK(model_satisfies(phi, r.model));
}

TEST_CASE("builtin: conflicting constants are unsat") {
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(1)));
  phi.add_bool(eq(ivar("x"), icst(2)));
  CHECK_EQ(solve_builtin(ints({"x"}), phi).status, SolveStatus::Unsat);
}

TEST_CASE("builtin: disequalities pick distinct smallest values") {
  PathConstraint phi;
  phi.add_bool(SymExpr::mk_not(eq(ivar("x"), ivar("y"))));
  auto r = solve_builtin(ints({"x", "y"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_NE(model_int(r, "x"), model_int(r, "y"));
  CHECK(model_satisfies(phi, r.model));
}

TEST_CASE("builtin: three-way distinct within bounds") {
  PathConstraint phi;
  const char* vs[] = {"a", "b", "c"};
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      phi.add_bool(SymExpr::mk_not(eq(ivar(vs[i]), ivar(vs[j]))));
  for (auto v : vs) {
    phi.add_bool(le(icst(0), ivar(v)));
    phi.add_bool(le(ivar(v), icst(2)));
  }
  auto r = solve_builtin(ints({"a", "b", "c"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK(model_satisfies(phi, r.model));

  // Shrink the range to two values and the same shape becomes unsat.
  phi.add_bool(le(ivar("c"), icst(1)));
  phi.add_bool(le(ivar("b"), icst(1)));
  phi.add_bool(le(ivar("a"), icst(1)));
  CHECK_EQ(solve_builtin(ints({"a", "b", "c"}), phi).status,
           SolveStatus::Unsat);
}

TEST_CASE("builtin: exclusions push the scan upward") {
  PathConstraint phi;
  phi.add_bool(le(icst(0), ivar("x")));
  phi.add_bool(SymExpr::mk_not(eq(ivar("x"), icst(0))));
  phi.add_bool(SymExpr::mk_not(eq(ivar("x"), icst(1))));
  auto r = solve_builtin(ints({"x"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 2);
}

TEST_CASE("builtin: strict bounds meet exactly") {
  PathConstraint phi;
  phi.add_bool(lt(ivar("x"), icst(3)));                  // x < 3
  phi.add_bool(SymExpr::mk_not(lt(ivar("x"), icst(2)))); // x >= 2
  auto r = solve_builtin(ints({"x"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 2);

  phi.add_bool(lt(ivar("x"), icst(2)));
  CHECK_EQ(solve_builtin(ints({"x"}), phi).status, SolveStatus::Unsat);
}

TEST_CASE("builtin: boolean and label literals") {
  VarDecls d;
  d.values["b"] = BaseType::Bool;
  d.choices["k"] = {"go", "stop"};

  PathConstraint phi;
  phi.add_bool(bvar("b"));
  phi.add_label("k", "stop");
  auto r = solve_builtin(d, phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK(r.model.values.at("b")->bval);
  CHECK_EQ(r.model.labels.at("k"), "stop");

  PathConstraint bad;
  bad.add_bool(bvar("b"));
  bad.add_bool(SymExpr::mk_not(bvar("b")));
  CHECK_EQ(solve_builtin(d, bad).status, SolveStatus::Unsat);

  PathConstraint badlbl;
  badlbl.add_label("k", "go");
  badlbl.add_label("k", "stop");
  CHECK_EQ(solve_builtin(d, badlbl).status, SolveStatus::Unsat);
}

TEST_CASE("builtin: models are total over the declarations") {
  VarDecls d = ints({"x", "seen"});
  d.values["u"] = BaseType::Unit;
  d.values["b"] = BaseType::Bool;
  d.choices["k"] = {"l", "r"};
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(9)));
  auto r = solve_builtin(d, phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 9);
  CHECK_EQ(model_int(r, "seen"), 0);
  CHECK_EQ(r.model.values.at("u")->kind, RValue::Kind::Unit);
  CHECK_FALSE(r.model.values.at("b")->bval);
  CHECK_EQ(r.model.labels.at("k"), "l");
}

TEST_CASE("builtin: nonlinear atoms give an honest unknown") {
  PathConstraint phi;
  phi.add_bool(eq(mul(ivar("x"), ivar("x")), icst(9)));
  auto r = solve_builtin(ints({"x"}), phi);
  CHECK_EQ(r.status, SolveStatus::Unknown);
}

TEST_CASE("builtin: rational infeasibility beyond offsets is unsat") {
  PathConstraint phi;
  // x + y <= 0 with x >= 1 and y >= 1.
  phi.add_bool(le(add(ivar("x"), ivar("y")), icst(0)));
  phi.add_bool(SymExpr::mk_not(le(ivar("x"), icst(0))));
  phi.add_bool(SymExpr::mk_not(le(ivar("y"), icst(0))));
  CHECK_EQ(solve_builtin(ints({"x", "y"}), phi).status, SolveStatus::Unsat);
}

TEST_CASE("builtin: integral vertex beyond offsets is adopted") {
  PathConstraint phi;
  // x + y = 5, x >= 2, y >= 2: the feasible vertices are integral.
  phi.add_bool(eq(add(ivar("x"), ivar("y")), icst(5)));
  phi.add_bool(SymExpr::mk_not(le(ivar("x"), icst(1))));
  phi.add_bool(SymExpr::mk_not(le(ivar("y"), icst(1))));
  auto r = solve_builtin(ints({"x", "y"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK(model_satisfies(phi, r.model));
}

TEST_CASE("builtin: general atoms mix with offset equalities soundly") {
  PathConstraint phi;
  // x = y + 3 joins the union-find; x + y = 5 stays general. Together they
  // force x = 4, y = 1.
  phi.add_bool(eq(ivar("x"), add(ivar("y"), icst(3))));
  phi.add_bool(eq(add(ivar("x"), ivar("y")), icst(5)));
  auto r = solve_builtin(ints({"x", "y"}), phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 4);
  CHECK_EQ(model_int(r, "y"), 1);
}

TEST_CASE("emission: declarations, label datatypes, assert order") {
  VarDecls d;
  d.choices["c"] = {"go", "stop"};
  d.values["b"] = BaseType::Bool;
  d.values["u"] = BaseType::Unit;
  d.values["x"] = BaseType::Int;
  d.values["y"] = BaseType::Int;
  PathConstraint phi;
  phi.add_label("c", "go");
  phi.add_bool(lt(ivar("x"), icst(5)));
  phi.add_bool(SymExpr::mk_not(eq(ivar("x"), ivar("y"))));

  std::string expect =
      "(set-logic ALL)\n"
      "(declare-datatypes ((Lbl_c 0)) (((c.go) (c.stop))))\n"
      "(declare-const c Lbl_c)\n"
      "(declare-const b Bool)\n"
      "(declare-const x Int)\n"
      "(declare-const y Int)\n"
      "(assert (= c c.go))\n"
      "(assert (< x 5))\n"
      "(assert (not (= x y)))\n"
      "(check-sat)\n"
      "(get-model)\n";
  CHECK_EQ(emit_smtlib2(d, phi), expect);
}

TEST_CASE("emission: complete disequality families fold into distinct") {
  VarDecls d = ints({"p", "q", "r"});
  PathConstraint phi;
  phi.add_bool(SymExpr::mk_not(eq(ivar("p"), ivar("q"))));
  phi.add_bool(lt(ivar("p"), icst(10)));
  phi.add_bool(SymExpr::mk_not(eq(ivar("p"), ivar("r"))));
  phi.add_bool(SymExpr::mk_not(eq(ivar("q"), ivar("r"))));

  std::string expect =
      "(set-logic ALL)\n"
      "(declare-const p Int)\n"
      "(declare-const q Int)\n"
      "(declare-const r Int)\n"
      "(assert (< p 10))\n"
      "(assert (distinct p q r))\n"
      "(check-sat)\n"
      "(get-model)\n";
  CHECK_EQ(emit_smtlib2(d, phi), expect);
}

TEST_CASE("emission: incomplete families stay as plain literals") {
  VarDecls d = ints({"p", "q", "r"});
  PathConstraint phi;
  phi.add_bool(SymExpr::mk_not(eq(ivar("p"), ivar("q"))));
  phi.add_bool(SymExpr::mk_not(eq(ivar("q"), ivar("r"))));

  std::string out = emit_smtlib2(d, phi);
  CHECK(out.find("(assert (not (= p q)))") != std::string::npos);
  CHECK(out.find("(assert (not (= q r)))") != std::string::npos);
  CHECK(out.find("distinct") == std::string::npos);
}

TEST_CASE("emission: negative constants use the minus form") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(-7)));
  std::string out = emit_smtlib2(d, phi);
  CHECK(out.find("(assert (= x (- 7)))") != std::string::npos);
}

TEST_CASE("external: verdicts and model parsing") {
  VarDecls d;
  d.values["x"] = BaseType::Int;
  d.values["b"] = BaseType::Bool;
  d.choices["c"] = {"go", "stop"};
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(5)));
  phi.add_bool(bvar("b"));
  phi.add_label("c", "go");

  ExternalSolver fake;
  fake.command =
      "cat > /dev/null; echo sat; echo '((define-fun x () Int 5) "
      "(define-fun b () Bool true) (define-fun c () Lbl_c c.go))'";
  auto r = solve_external(fake, d, phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 5);
  CHECK(r.model.values.at("b")->bval);
  CHECK_EQ(r.model.labels.at("c"), "go");

  fake.command = "cat > /dev/null; echo unsat";
  CHECK_EQ(solve_external(fake, d, phi).status, SolveStatus::Unsat);

  fake.command = "cat > /dev/null; echo unknown";
  CHECK_EQ(solve_external(fake, d, phi).status, SolveStatus::Unknown);
}

TEST_CASE("external: negative integers and model wrappers parse") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(-7)));
  ExternalSolver fake;
  fake.command =
      "cat > /dev/null; echo sat; echo '(model (define-fun x () Int (- 7)))'";
  auto r = solve_external(fake, d, phi);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), -7);
}

TEST_CASE("external: diagnostics before the verdict are skipped") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(1)));
  ExternalSolver fake;
  fake.command =
      "cat > /dev/null; echo '; warning: something'; echo sat; "
      "echo '((define-fun x () Int 1))'";
  CHECK_EQ(solve_external(fake, d, phi).status, SolveStatus::Sat);
}

TEST_CASE("external: models failing re-substitution are an error") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(5)));
  ExternalSolver fake;
  fake.command = "cat > /dev/null; echo sat; echo '((define-fun x () Int 3))'";
  CHECK_FAILS_WITH(Errc::SolverError, solve_external(fake, d, phi));
}

TEST_CASE("external: missing command reports backend unavailable") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(1)));
  ExternalSolver fake;
  fake.command = "/no_such_solver_binary_zq19";
  CHECK_FAILS_WITH(Errc::BackendUnavailable, solve_external(fake, d, phi));
  fake.command = "";
  CHECK_FAILS_WITH(Errc::BackendUnavailable, solve_external(fake, d, phi));
}

TEST_CASE("external: the deadline kills slow solvers") {
  VarDecls d = ints({"x"});
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(1)));
  ExternalSolver fake;
  fake.command = "cat > /dev/null; sleep 2; echo sat";
  fake.timeout_ms = 150;
  CHECK_FAILS_WITH(Errc::SolverError, solve_external(fake, d, phi));
}

TEST_CASE("orchestrator: builtin answers without touching the external") {
  PathConstraint phi;
  phi.add_bool(eq(ivar("x"), icst(2)));
  SolveOptions opts;
  opts.external = ExternalSolver{"/no_such_solver_binary_zq19", 1000};
  auto r = solve(ints({"x"}), phi, opts);
  REQUIRE_EQ(r.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r, "x"), 2);
}

TEST_CASE("orchestrator: unknown falls back to the external when given") {
  PathConstraint phi;
  phi.add_bool(eq(mul(ivar("x"), ivar("x")), icst(9)));
  SolveOptions opts;
  auto r = solve(ints({"x"}), phi, opts);
  CHECK_EQ(r.status, SolveStatus::Unknown);

  opts.external = ExternalSolver{
      "cat > /dev/null; echo sat; echo '((define-fun x () Int 3))'", 10000};
  auto r2 = solve(ints({"x"}), phi, opts);
  REQUIRE_EQ(r2.status, SolveStatus::Sat);
  CHECK_EQ(model_int(r2, "x"), 3);
}
