// Lexer, parser, printer round-trips, and typechecker behaviour.
#include "test_util.hpp"

#include "sill/lexer.hpp"
#include "sill/parser.hpp"
#include "sill/printer.hpp"
#include "sill/typecheck.hpp"

using namespace sill;

namespace {

// A printed tree must reparse to a tree that prints identically.
void roundtrip_type(const std::string& src) {
  TypePtr t1 = parse_type_string(src);
  std::string p1 = print_type(t1);
  TypePtr t2 = parse_type_string(p1);
  CHECK_EQ(p1, print_type(t2));
}

void roundtrip_skel(const std::string& src) {
  SkelPtr k1 = parse_skel_string(src);
  std::string p1 = print_skel(k1);
  SkelPtr k2 = parse_skel_string(p1);
  CHECK_EQ(p1, print_skel(k2));
}

Program parse_ok(const std::string& src) {
  Program p = parse_program(src, "<test>");
  return p;
}

} // namespace

TEST_CASE("lexer splits multi-character operators correctly") {
  auto toks = lex("<- <| <= < |- |> -o - -- gone\n&_v &x +_w +y a-old", "<l>");
  std::vector<Tok> kinds;
  for (const auto& t : toks) kinds.push_back(t.kind);
  std::vector<Tok> want = {
      Tok::LArrow, Tok::GetTok, Tok::Le,        Tok::Lt,    Tok::Turnstile,
      Tok::PayTok, Tok::Lolli,  Tok::Minus,     Tok::AmpUnder, Tok::Ident,
      Tok::Amp,    Tok::Ident,  Tok::PlusUnder, Tok::Ident, Tok::Plus,
      Tok::Ident,  Tok::Ident,  Tok::Minus,     Tok::Ident, Tok::Eof};
  CHECK_EQ(kinds, want);
  CHECK_EQ(toks[9].text, "v");
  CHECK_EQ(toks[18].text, "old");
}

TEST_CASE("lexer tracks spans and rejects stray characters") {
  auto toks = lex("a\n  b", "<l>");
  CHECK_EQ(toks[1].span.line, 2);
  CHECK_EQ(toks[1].span.col, 3);
  CHECK_FAILS_WITH(Errc::ParseError, lex("|", "<l>"));
  CHECK_FAILS_WITH(Errc::ParseError, lex("a @ b", "<l>"));
}

TEST_CASE("session type parsing and printing round-trips") {
  roundtrip_type("1");
  roundtrip_type("X");
  roundtrip_type("bool => 1");
  roundtrip_type("unit /\\ |>2 1");
  roundtrip_type("(bool => 1) -o X");
  roundtrip_type("X * Y");
  roundtrip_type("(bool * int) => 1");
  roundtrip_type("bool * int => 1");
  roundtrip_type("int + bool * unit => 1");
  roundtrip_type("&{add: <|2 int => +{ok: X}, fin: int /\\ 1}");
  roundtrip_type("<|5/3 1");
  roundtrip_type("|>1/2 &{a: 1, b: X}");
  roundtrip_type("(X -o Y) * 1");
  roundtrip_type("(<|2 X) * Y");
}

TEST_CASE("value types in send positions bind as expected") {
  TypePtr t = parse_type_string("bool * int => 1");
  REQUIRE_EQ(t->kind, SessionType::Kind::ValIn);
  CHECK_EQ(t->value->kind, FunType::Kind::Prod);

  TypePtr s = parse_type_string("X * Y");
  CHECK_EQ(s->kind, SessionType::Kind::ChanOut);

  // => reaches right as far as possible
  TypePtr r = parse_type_string("bool => 1 -o X");
  REQUIRE_EQ(r->kind, SessionType::Kind::ValIn);
  CHECK_EQ(r->cont->kind, SessionType::Kind::ChanIn);
}

TEST_CASE("potential prefixes bind the whole remaining type") {
  TypePtr t = parse_type_string("<|2 int => X");
  REQUIRE_EQ(t->kind, SessionType::Kind::Get);
  CHECK_EQ(t->q, Rat(2));
  CHECK_EQ(t->cont->kind, SessionType::Kind::ValIn);

  TypePtr f = parse_type_string("<|5/3 1");
  CHECK_EQ(f->q, Rat(5) / Rat(3));
}

TEST_CASE("question marks register annotation sites") {
  int sites = 0;
  TypePtr t = parse_type_string("<|? |>? 1", &sites);
  CHECK_EQ(sites, 2);
  REQUIRE_EQ(t->kind, SessionType::Kind::Get);
  CHECK(t->ann_unknown());
  CHECK_EQ(t->ann_site, 0);
  CHECK_EQ(t->cont->ann_site, 1);
  CHECK_EQ(print_type(t), "<|? |>? 1");
}

TEST_CASE("parse errors carry the right codes") {
  CHECK_FAILS_WITH(Errc::ParseError, parse_type_string("2"));
  CHECK_FAILS_WITH(Errc::DuplicateLabel, parse_type_string("&{a: 1, a: 1}"));
  CHECK_FAILS_WITH(Errc::ParseError, parse_type_string("&_x{a: 1}"));
  CHECK_FAILS_WITH(Errc::ParseError, parse_type_string("bool => "));
}

TEST_CASE("skeleton parsing distinguishes world and program value positions") {
  SkelPtr world = parse_skel_string("x => 1");
  CHECK_EQ(world->kind, Skeleton::Kind::ValInWorld);
  SkelPtr prog = parse_skel_string("int => 1");
  CHECK_EQ(prog->kind, Skeleton::Kind::ValInProc);
  SkelPtr lit = parse_skel_string("true => 1");
  CHECK_EQ(lit->kind, Skeleton::Kind::ValInWorld);
  SkelPtr pair = parse_skel_string("(x, (y, 3)) => 1");
  REQUIRE_EQ(pair->kind, Skeleton::Kind::ValInWorld);
  CHECK_EQ(pair->hval->kind, HValue::Kind::Pair);

  roundtrip_skel("x => <|2 1");
  roundtrip_skel("&_v{a: 1, b: |>1 1}");
  roundtrip_skel("+_w{l: x /\\ 1}");
  roundtrip_skel("(x => 1) -o (inl y => 1)");
  roundtrip_skel("&{keep: 1, drop: 1}");
  roundtrip_skel("int => n => 1");
}

TEST_CASE("skeleton files bind targets and reject unknown amounts") {
  SkelFile f = parse_skel_file(
      "skeleton S = &_x{a: 1, b: 1}\ntarget c = S\ntarget d = <|2 1\n",
      "<skel>");
  CHECK_EQ(f.defs.size(), 1);
  CHECK_EQ(f.targets.size(), 2);
  CHECK_EQ(f.targets[0].first, "c");
  CHECK_FAILS_WITH(Errc::UnknownAnnotation,
                   parse_skel_file("target c = <|? 1", "<skel>"));
  CHECK_FAILS_WITH(Errc::DuplicateDefinition,
                   parse_skel_file("target c = 1\ntarget c = 1", "<skel>"));
}

namespace {

const char* kLinkProgram = R"(
type Link = unit /\ |>2 1

proc p2 |- {2} (d : Link) =
  send d ();
  pay d {2};
  close d

proc p1 |- {5} (c : 1) [d : Link] =
  u <- recv d;
  tick 3;
  get d {2};
  tick 2;
  wait d;
  close c

config {
  d <- p2;
  c <- p1 [d];
}
)";

} // namespace

TEST_CASE("a complete program parses, prints, and typechecks") {
  Program p = parse_ok(kLinkProgram);
  CHECK_EQ(p.config.size(), 2);
  CheckResult res = typecheck(p);
  CHECK(res.constraints.empty());

  // print -> reparse -> typecheck still holds
  std::string printed = print_program(p);
  Program p2 = parse_program(printed, "<printed>");
  CHECK_EQ(print_program(p2), printed);
  typecheck(p2);

  ExternalInterface xi = external_interface(p);
  CHECK_EQ(xi.provided.size(), 1);
  CHECK(xi.provided.count("c"));
  CHECK(xi.used.empty());
}

TEST_CASE("external interface reports world-provided channels") {
  Program p = parse_ok(R"(
type Link = unit /\ |>2 1
proc p1 |- {5} (c : 1) [d : Link] =
  u <- recv d;
  get d {2};
  wait d;
  close c
config { c <- p1 [d]; }
)");
  typecheck(p);
  ExternalInterface xi = external_interface(p);
  CHECK(xi.provided.count("c"));
  REQUIRE(xi.used.count("d"));
  CHECK_EQ(print_type(xi.used.at("d")), "Link");
}

TEST_CASE("typechecker rejects ill-potentialed and non-linear programs") {
  // tick past the available potential
  CHECK_FAILS_WITH(Errc::PotentialUnderflow, typecheck(parse_ok(R"(
proc p |- {1} (c : 1) = tick 2; close c
config { c <- p; }
)")));
  // pay without funds
  CHECK_FAILS_WITH(Errc::PotentialUnderflow, typecheck(parse_ok(R"(
type T = |>1 1
proc p |- {0} (c : T) = pay c {1}; close c
config { c <- p; }
)")));
  // get amount must match the type
  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
type T = <|2 1
proc p |- {0} (c : T) = get c {1}; close c
config { c <- p; }
)")));
  // unused channel at close
  CHECK_FAILS_WITH(Errc::LinearityViolation, typecheck(parse_ok(R"(
proc q |- {0} (d : 1) = close d
proc p |- {0} (c : 1) [d : 1] = close c
config { d <- q; c <- p [d]; }
)")));
  // a channel consumed twice in the config
  CHECK_FAILS_WITH(Errc::LinearityViolation, typecheck(parse_ok(R"(
proc q |- {0} (d : 1) = close d
proc p |- {0} (c : 1) [d : 1] = wait d; close c
config { d <- q; c <- p [d]; e <- p [d]; }
)")));
  // case must cover the labels exactly
  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
type T = &{a: 1, b: 1}
proc p |- {0} (c : T) = case c { a => close c }
config { c <- p; }
)")));
}

TEST_CASE("channel sends resolve against the session type") {
  Program p = parse_ok(R"(
type Pass = 1 -o 1
proc sink |- {0} (s : 1) = close s
proc relay |- {0} (c : Pass) =
  x <- recv c;
  wait x;
  close c
proc main |- {0} (top : 1) [c : Pass, s : 1] =
  send c s;
  wait c;
  close top
config { c <- relay; s <- sink; top <- main [c, s]; }
)");
  CHECK(typecheck(p).constraints.empty());

  // sending a channel where a value is expected
  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
type T = int => 1
proc u |- {0} (s : 1) = close s
proc q |- {0} (c : T) = x <- recv c; close c
proc p |- {0} (top : 1) [c : T, s : 1] =
  send c s;
  wait c;
  close top
config { c <- q; s <- u; top <- p [c, s]; }
)")));
}

TEST_CASE("forwarding requires matching protocols and an empty context") {
  Program p = parse_ok(R"(
type T = int => 1
proc q |- {0} (c : T) = x <- recv c; close c
proc p |- {0} (d : T) [c : T] = d <- c
config { c <- q; d <- p [c]; }
)");
  CHECK(typecheck(p).constraints.empty());

  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
type T = int => 1
proc q |- {0} (c : 1) = close c
proc p |- {0} (d : T) [c : 1] = d <- c
config { c <- q; d <- p [c]; }
)")));
}

TEST_CASE("recursive session types are equi-recursive") {
  Program p = parse_ok(R"(
type S = &{more: S, done: 1}
proc p |- {0} (c : S) =
  case c {
    more =>
      c2 <- q;
      c <- c2,
    done => close c
  }
proc q |- {0} (c : S) =
  c2 <- p;
  c <- c2
config { c <- p; }
)");
  CHECK(typecheck(p).constraints.empty());
  TypePtr s = p.sig.lookup_type("S");
  CHECK(type_equal(p.sig, SessionType::mk_var("S"), s));
}

TEST_CASE("signature hygiene catches bad definitions") {
  CHECK_FAILS_WITH(Errc::NonContractive, typecheck(parse_ok(R"(
type X = X
proc p |- {0} (c : 1) = close c
config { c <- p; }
)")));
  CHECK_FAILS_WITH(Errc::NonContractive, typecheck(parse_ok(R"(
def f() : int = f()
proc p |- {0} (c : 1) = close c
config { c <- p; }
)")));
  CHECK_FAILS_WITH(Errc::DanglingReference, typecheck(parse_ok(R"(
proc p |- {0} (c : Missing) = close c
config { c <- p; }
)")));
  CHECK_FAILS_WITH(Errc::DuplicateDefinition,
                   parse_ok("type X = 1\ntype X = 1\nconfig { }"));
}

TEST_CASE("value layer typechecks first-order programs") {
  Program p = parse_ok(R"(
def inc(x : int) : int = x + 1
def pick(b : bool, x : int, y : int) : int = if b then x else y
def swap(p : int * bool) : bool * int = match p { (x, y) => (y, x) }
def tag(x : int) : int + bool = inl x
def untag(s : int + bool) : int = match s { inl x => x, inr b => pick(b, 1, 0) }
proc p |- {0} (c : int => unit /\ 1) =
  x <- recv c;
  send c ();
  close c
config { c <- p; }
)");
  CHECK(typecheck(p).constraints.empty());

  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
def bad(x : int) : bool = x + 1
proc p |- {0} (c : 1) = close c
config { c <- p; }
)")));
}

TEST_CASE("unknown annotations produce constraints instead of errors") {
  Program p = parse_ok(R"(
type T = <|? 1
proc p |- {?} (c : T) = get c {?}; tick 3; close c
config { c <- p; }
)");
  CHECK_EQ(p.num_ann_sites, 3);
  CheckResult res = typecheck(p);
  CHECK_FALSE(res.constraints.empty());
}

TEST_CASE("spawned conditional branches must agree on their interface") {
  Program p = parse_ok(R"(
proc a |- {2} (c : 1) = tick 2; close c
proc b |- {2} (c : 1) = close c
proc main(x : bool) |- {2} (top : 1) =
  c <- if x then a else b;
  wait c;
  close top
config { top <- main(true); }
)");
  CHECK(typecheck(p).constraints.empty());

  CHECK_FAILS_WITH(Errc::TypeMismatch, typecheck(parse_ok(R"(
proc a |- {2} (c : 1) = tick 2; close c
proc b |- {1} (c : 1) = close c
proc main(x : bool) |- {2} (top : 1) =
  c <- if x then a else b;
  wait c;
  close top
config { top <- main(true); }
)")));
}
