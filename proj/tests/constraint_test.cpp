// Symbolic expressions, path constraints, models, and the linear view.
#include "test_util.hpp"

#include "sill/constraint.hpp"

using namespace sill;

namespace {

SymPtr ivar(const std::string& n) { return SymExpr::mk_var(n, BaseType::Int); }
SymPtr bvar(const std::string& n) { return SymExpr::mk_var(n, BaseType::Bool); }

SkelModel model_of(std::map<std::string, BigInt> ints,
                   std::map<std::string, bool> bools = {},
                   std::map<std::string, std::string> labels = {}) {
  SkelModel m;
  for (auto& [k, v] : ints) m.values[k] = RValue::mk_int(v);
  for (auto& [k, v] : bools) m.values[k] = RValue::mk_bool(v);
  m.labels = std::move(labels);
  return m;
}

} // namespace

TEST_CASE("constant arithmetic folds") {
  auto e = SymExpr::mk_arith(ArithOp::Add, SymExpr::mk_int(2),
                             SymExpr::mk_int(3));
  REQUIRE_EQ(e->kind, SymExpr::Kind::IntConst);
  CHECK_EQ(e->ival, 5);

  auto m = SymExpr::mk_arith(ArithOp::Mul, SymExpr::mk_int(-4),
                             SymExpr::mk_int(6));
  CHECK_EQ(m->ival, -24);

  auto s = SymExpr::mk_arith(ArithOp::Sub, SymExpr::mk_int(1),
                             SymExpr::mk_int(9));
  CHECK_EQ(s->ival, -8);

  auto n = SymExpr::mk_neg(SymExpr::mk_int(7));
  CHECK_EQ(n->ival, -7);
}

TEST_CASE("comparisons fold on constants and stay symbolic on variables") {
  auto t = SymExpr::mk_cmp(CmpOp::Lt, SymExpr::mk_int(1), SymExpr::mk_int(2));
  REQUIRE_EQ(t->kind, SymExpr::Kind::BoolConst);
  CHECK(t->bval);

  auto f = SymExpr::mk_cmp(CmpOp::Eq, SymExpr::mk_int(3), SymExpr::mk_int(4));
  REQUIRE_EQ(f->kind, SymExpr::Kind::BoolConst);
  CHECK_FALSE(f->bval);

  auto sym = SymExpr::mk_cmp(CmpOp::Le, ivar("x"), SymExpr::mk_int(2));
  CHECK_EQ(sym->kind, SymExpr::Kind::Cmp);
  CHECK_FALSE(sym_is_const(sym));
}

TEST_CASE("negation folds constants and cancels doubles") {
  auto nt = SymExpr::mk_not(SymExpr::mk_bool(true));
  REQUIRE_EQ(nt->kind, SymExpr::Kind::BoolConst);
  CHECK_FALSE(nt->bval);

  auto b = bvar("b");
  auto nn = SymExpr::mk_not(SymExpr::mk_not(b));
  CHECK_EQ(nn.get(), b.get());
}

TEST_CASE("structured values are const exactly when their leaves are") {
  auto p = SymExpr::mk_pair(SymExpr::mk_int(1), SymExpr::mk_unit());
  CHECK(sym_is_const(p));
  auto q = SymExpr::mk_pair(SymExpr::mk_int(1), ivar("x"));
  CHECK_FALSE(sym_is_const(q));
  CHECK(sym_is_const(SymExpr::mk_inl(SymExpr::mk_bool(false))));
  CHECK_FALSE(sym_is_const(SymExpr::mk_inr(bvar("w"))));
}

TEST_CASE("path constraints drop literal true and detect literal false") {
  PathConstraint phi;
  phi.add_bool(SymExpr::mk_bool(true));
  CHECK_EQ(phi.size(), 0);
  CHECK_FALSE(phi.trivially_false());

  phi.add_bool(SymExpr::mk_cmp(CmpOp::Lt, ivar("x"), SymExpr::mk_int(5)));
  CHECK_EQ(phi.size(), 1);

  phi.add_bool(SymExpr::mk_bool(false));
  CHECK(phi.trivially_false());
}

TEST_CASE("to_linear handles sums, scaled variables, and negation") {
  // 3*x - y + 4
  auto e = SymExpr::mk_arith(
      ArithOp::Add,
      SymExpr::mk_arith(
          ArithOp::Sub,
          SymExpr::mk_arith(ArithOp::Mul, SymExpr::mk_int(3), ivar("x")),
          ivar("y")),
      SymExpr::mk_int(4));
  auto lin = to_linear(e);
  REQUIRE(lin.has_value());
  CHECK_EQ(lin->coeff.at("x"), 3);
  CHECK_EQ(lin->coeff.at("y"), -1);
  CHECK_EQ(lin->c, 4);

  // -(x + 2) == -x - 2
  auto n = SymExpr::mk_neg(
      SymExpr::mk_arith(ArithOp::Add, ivar("x"), SymExpr::mk_int(2)));
  auto ln = to_linear(n);
  REQUIRE(ln.has_value());
  CHECK_EQ(ln->coeff.at("x"), -1);
  CHECK_EQ(ln->c, -2);

  // x*(y+1) is nonlinear
  auto bad = SymExpr::mk_arith(
      ArithOp::Mul, ivar("x"),
      SymExpr::mk_arith(ArithOp::Add, ivar("y"), SymExpr::mk_int(1)));
  CHECK_FALSE(to_linear(bad).has_value());

  // x*2 with the constant on the right is still linear
  auto r = to_linear(SymExpr::mk_arith(ArithOp::Mul, ivar("x"),
                                       SymExpr::mk_int(2)));
  REQUIRE(r.has_value());
  CHECK_EQ(r->coeff.at("x"), 2);
}

TEST_CASE("to_linear cancels identical terms") {
  // (x + y) - x == y
  auto e = SymExpr::mk_arith(
      ArithOp::Sub, SymExpr::mk_arith(ArithOp::Add, ivar("x"), ivar("y")),
      ivar("x"));
  auto lin = to_linear(e);
  REQUIRE(lin.has_value());
  CHECK(lin->coeff.find("x") == lin->coeff.end());
  CHECK_EQ(lin->coeff.at("y"), 1);
}

TEST_CASE("sym_eval substitutes a model and computes") {
  auto e = SymExpr::mk_cmp(
      CmpOp::Eq, SymExpr::mk_arith(ArithOp::Add, ivar("x"), ivar("y")),
      SymExpr::mk_int(10));
  auto m = model_of({{"x", 4}, {"y", 6}});
  auto v = sym_eval(e, m);
  REQUIRE_EQ(v->kind, RValue::Kind::Bool);
  CHECK(v->bval);

  auto m2 = model_of({{"x", 4}, {"y", 7}});
  CHECK_FALSE(sym_eval(e, m2)->bval);

  auto pair = SymExpr::mk_pair(ivar("x"), SymExpr::mk_bool(true));
  auto pv = sym_eval(pair, m);
  REQUIRE_EQ(pv->kind, RValue::Kind::Pair);
  CHECK_EQ(pv->left->ival, 4);
}

TEST_CASE("sym_eval reports unbound variables") {
  auto m = model_of({{"x", 1}});
  CHECK_FAILS_WITH(Errc::MissingAssignment, sym_eval(ivar("zz"), m));
}

TEST_CASE("model_satisfies checks every literal") {
  PathConstraint phi;
  phi.add_bool(SymExpr::mk_cmp(CmpOp::Lt, ivar("x"), SymExpr::mk_int(5)));
  phi.add_bool(bvar("b"));
  phi.add_label("c", "go");

  auto yes = model_of({{"x", 3}}, {{"b", true}}, {{"c", "go"}});
  CHECK(model_satisfies(phi, yes));

  auto wrong_int = model_of({{"x", 9}}, {{"b", true}}, {{"c", "go"}});
  CHECK_FALSE(model_satisfies(phi, wrong_int));

  auto wrong_bool = model_of({{"x", 3}}, {{"b", false}}, {{"c", "go"}});
  CHECK_FALSE(model_satisfies(phi, wrong_bool));

  auto wrong_label = model_of({{"x", 3}}, {{"b", true}}, {{"c", "stop"}});
  CHECK_FALSE(model_satisfies(phi, wrong_label));
}

TEST_CASE("sym_of_rvalue lifts structure into constants") {
  auto v = RValue::mk_pair(RValue::mk_int(3),
                           RValue::mk_inl(RValue::mk_bool(true)));
  auto s = sym_of_rvalue(v);
  CHECK(sym_is_const(s));
  REQUIRE_EQ(s->kind, SymExpr::Kind::Pair);
  CHECK_EQ(s->a->ival, 3);
  CHECK_EQ(s->b->kind, SymExpr::Kind::Inl);
}

TEST_CASE("merging declarations rejects clashes") {
  VarDecls a, b;
  a.values["x"] = BaseType::Int;
  b.values["x"] = BaseType::Bool;
  CHECK_FAILS_WITH(Errc::DuplicateSkeletonVariable, a.merge(b));

  VarDecls c, d;
  c.choices["k"] = {"l", "r"};
  d.choices["k"] = {"l", "r"};
  CHECK_FAILS_WITH(Errc::DuplicateSkeletonVariable, c.merge(d));

  VarDecls e, f;
  e.values["x"] = BaseType::Int;
  f.values["y"] = BaseType::Int;
  f.choices["k"] = {"l"};
  e.merge(f);
  CHECK_EQ(e.values.size(), 2);
  CHECK_EQ(e.choices.size(), 1);
}
