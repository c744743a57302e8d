// Skeleton compatibility, action counting, generation, and cost bounds.
#include "test_util.hpp"

#include "sill/parser.hpp"
#include "sill/printer.hpp"
#include "sill/skeleton.hpp"
#include "sill/typecheck.hpp"

using namespace sill;

namespace {

constexpr Side kProv = Side::ProcProvides;
constexpr Side kUsed = Side::WorldProvides;

// A bare signature whose type table is filled from `name = body` entries.
Signature sig_with(
    const std::vector<std::pair<std::string, std::string>>& defs) {
  Signature sig;
  for (const auto& [name, body] : defs)
    sig.type_defs[name] = parse_type_string(body);
  return sig;
}

SkelCheckResult compat(const Signature& sig, const std::string& skel,
                       const std::string& type, Side side) {
  return check_compat(sig, parse_skel_string(skel), parse_type_string(type),
                      side);
}

SkelCheckResult compat(const std::string& skel, const std::string& type,
                       Side side) {
  return compat(Signature{}, skel, type, side);
}

std::string corpus_path(const std::string& name) {
  return std::string(SILL_CORPUS_DIR) + "/" + name;
}

Program corpus_program(const std::string& name) {
  Program p = parse_program(read_file(corpus_path(name)), name);
  typecheck(p);
  return p;
}

std::map<std::string, SkelPtr> corpus_skels(Program& p,
                                            const std::string& name) {
  SkelFile f = parse_skel_file(read_file(corpus_path(name)), name);
  return load_skel_file(p.sig, f);
}

Rat corpus_bound(const std::string& prog, const std::string& skel) {
  Program p = corpus_program(prog);
  auto skels = corpus_skels(p, skel);
  return config_cost_bound(p, skels);
}

} // namespace

TEST_CASE("terminated sessions only match each other") {
  CHECK(compat("1", "1", kProv).skeleton->kind == Skeleton::Kind::One);
  CHECK_FAILS_WITH(Errc::CompatError, compat("1", "int /\\ 1", kProv));
  CHECK_FAILS_WITH(Errc::CompatError, compat("1", "int => 1", kProv));
  CHECK_FAILS_WITH(Errc::CompatError, compat("int => 1", "1", kProv));
}

TEST_CASE("world-supplied values take value shapes, not types") {
  // The provider receives at `=>`, so on a provided channel the world sends.
  auto res = compat("x => 1", "int => 1", kProv);
  REQUIRE_EQ(res.value_vars.size(), 1);
  CHECK(res.value_vars.at("x") == BaseType::Int);

  // A value type in that position is the program's notation, not the world's.
  CHECK_FAILS_WITH(Errc::CompatError, compat("int => 1", "int => 1", kProv));

  // Literals are fine and bind nothing.
  CHECK(compat("3 => 1", "int => 1", kProv).value_vars.empty());
  CHECK(compat("true => 1", "bool => 1", kProv).value_vars.empty());
  CHECK(compat("() => 1", "unit => 1", kProv).value_vars.empty());

  // On a used channel the roles mirror: the world sends at `/\`.
  CHECK_EQ(compat("y /\\ 1", "int /\\ 1", kUsed).value_vars.count("y"), 1);
  CHECK_FAILS_WITH(Errc::CompatError, compat("y => 1", "int => 1", kUsed));
}

TEST_CASE("program-supplied values carry the value type through") {
  CHECK(compat("int /\\ 1", "int /\\ 1", kProv).value_vars.empty());
  CHECK(compat("(int * int) /\\ 1", "(int * int) /\\ 1", kProv)
            .value_vars.empty());
  // Wrong type or a value shape both fail.
  CHECK_FAILS_WITH(Errc::CompatError, compat("bool /\\ 1", "int /\\ 1", kProv));
  CHECK_FAILS_WITH(Errc::CompatError, compat("5 /\\ 1", "int /\\ 1", kProv));
  // Mirrored on used channels.
  CHECK(compat("int => 1", "int => 1", kUsed).value_vars.empty());
}

TEST_CASE("compound world values bind one variable per base leaf") {
  auto res = compat("(p, q) => 1", "(int * bool) => 1", kProv);
  CHECK(res.value_vars.at("p") == BaseType::Int);
  CHECK(res.value_vars.at("q") == BaseType::Bool);

  auto sum = compat("inl v => 1", "(int + bool) => 1", kProv);
  CHECK(sum.value_vars.at("v") == BaseType::Int);
  auto sumr = compat("inr w => 1", "(int + bool) => 1", kProv);
  CHECK(sumr.value_vars.at("w") == BaseType::Bool);

  // A variable cannot stand for a whole structured value.
  CHECK_FAILS_WITH(Errc::CompatError,
                   compat("w => 1", "(int * int) => 1", kProv));
  // Shape and type must agree.
  CHECK_FAILS_WITH(Errc::CompatError,
                   compat("(p, q) => 1", "int => 1", kProv));
  CHECK_FAILS_WITH(Errc::CompatError,
                   compat("inl v => 1", "(int * bool) => 1", kProv));
}

TEST_CASE("skeleton variables share one namespace") {
  CHECK_FAILS_WITH(Errc::DuplicateSkeletonVariable,
                   compat("x => x => 1", "int => bool => 1", kProv));
  CHECK_FAILS_WITH(Errc::DuplicateSkeletonVariable,
                   compat("(p, p) => 1", "(int * bool) => 1", kProv));
  CHECK_FAILS_WITH(
      Errc::DuplicateSkeletonVariable,
      compat("x => &_x{a: 1, b: 1}", "int => &{a: 1, b: 1}", kProv));
}

TEST_CASE("world-chosen choice points accept any nonempty label subset") {
  const std::string ty = "&{a: 1, b: int => 1}";
  // Dropping a label is allowed; a forced singleton needs no variable.
  auto res = compat("&{a: 1}", ty, kProv);
  CHECK(res.choice_vars.empty());
  CHECK(res.skeleton->kind == Skeleton::Kind::ExtWorld);
  CHECK(res.skeleton->choice_var.empty());

  // Keeping a real choice records it under the given variable.
  auto named = compat("&_s{a: 1, b: x => 1}", ty, kProv);
  REQUIRE_EQ(named.choice_vars.count("s"), 1);
  CHECK(named.choice_vars.at("s") ==
        std::vector<std::string>{"a", "b"});
  CHECK(named.value_vars.count("x") == 1);

  // An unnamed real choice gets a minted variable.
  auto minted = compat("&{a: 1, b: bx => 1}", ty, kProv);
  REQUIRE_EQ(minted.choice_vars.size(), 1);
  CHECK_EQ(minted.choice_vars.begin()->first, "sel#0");

  // Labels the protocol does not offer are rejected.
  CHECK_FAILS_WITH(Errc::CompatError, compat("&{c: 1}", ty, kProv));
}

TEST_CASE("program-chosen choice points need every label covered") {
  const std::string ty = "+{a: 1, b: 1}";
  CHECK(compat("+{a: 1, b: 1}", ty, kProv).choice_vars.empty());
  CHECK_FAILS_WITH(Errc::CompatError, compat("+{a: 1}", ty, kProv));
  // A choice variable makes no sense where the program decides.
  CHECK_FAILS_WITH(Errc::CompatError, compat("+_s{a: 1, b: 1}", ty, kProv));

  // On a used channel the same + type is the world's choice.
  CHECK(compat("+{a: 1}", ty, kUsed).skeleton->kind ==
        Skeleton::Kind::IntWorld);
  auto named = compat("+_s{a: 1, b: 1}", ty, kUsed);
  CHECK_EQ(named.choice_vars.count("s"), 1);
}

TEST_CASE("potential transfers must match the type exactly") {
  CHECK(compat("<|2 1", "<|2 1", kProv).skeleton->kind == Skeleton::Kind::Get);
  CHECK_FAILS_WITH(Errc::CompatError, compat("<|3 1", "<|2 1", kProv));
  CHECK_FAILS_WITH(Errc::CompatError, compat("|>2 1", "<|2 1", kProv));
  CHECK_FAILS_WITH(Errc::UnknownAnnotation, compat("<|2 1", "<|? 1", kProv));
}

TEST_CASE("channel transfers check the moved endpoint on the right side") {
  // A channel received from the world is provided by the world.
  CHECK(compat("(int => 1) -o 1", "(int => 1) -o 1", kProv)
            .value_vars.empty());
  CHECK_FAILS_WITH(Errc::CompatError,
                   compat("(x => 1) -o 1", "(int => 1) -o 1", kProv));
  // A channel handed out by the program keeps the program's side.
  CHECK_EQ(compat("(x => 1) * 1", "(int => 1) * 1", kProv)
               .value_vars.count("x"),
           1);
  CHECK_FAILS_WITH(Errc::CompatError,
                   compat("(int => 1) * 1", "(int => 1) * 1", kProv));
}

TEST_CASE("named skeletons expand but may not loop") {
  Signature sig = sig_with({{"T", "&{go: T, stop: 1}"}});
  sig.skeleton_defs["Fin"] = parse_skel_string("&{stop: 1}");
  sig.skeleton_defs["Loop"] = parse_skel_string("&{go: Loop}");

  auto res = compat(sig, "Fin", "T", kProv);
  CHECK(res.skeleton->kind == Skeleton::Kind::ExtWorld);
  CHECK_FAILS_WITH(Errc::FiniteInputViolation, compat(sig, "Loop", "T", kProv));
}

TEST_CASE("recursive protocols admit finite skeletons") {
  Signature sig =
      sig_with({{"Stream", "+{cons: |>2 int /\\ Stream, nil: 1}"}});
  auto res = compat(sig,
                    "+{cons: |>2 x1 /\\ +{cons: |>2 x2 /\\ +{nil: 1}}}",
                    "Stream", kUsed);
  CHECK_EQ(res.value_vars.size(), 2);
  CHECK(res.choice_vars.empty());
  CHECK_EQ(world_potential_bound(res.skeleton, kUsed), Rat(4));
}

TEST_CASE("count_actions solves the finiteness game") {
  Signature sig = sig_with({
      {"BoolSink", "bool => BoolSink"},
      {"BoolChanSink", "(bool => 1) -o BoolChanSink"},
      {"Stream", "+{cons: |>2 int /\\ Stream, nil: 1}"},
      {"Escape", "&{stop: 1, go: Escape}"},
  });
  auto count = [&](const std::string& name, Side side) {
    return count_actions(sig, sig.type_defs.at(name), side);
  };

  CHECK_FALSE(count("BoolSink", kProv).has_value());
  CHECK_FALSE(count("BoolSink", kUsed).has_value());
  CHECK_FALSE(count("BoolChanSink", kProv).has_value());

  // The world can bail out of the stream immediately; the program cannot be
  // trusted to, so the provider side is unbounded.
  CHECK_EQ(count("Stream", kUsed), 1);
  CHECK_FALSE(count("Stream", kProv).has_value());

  // Same definition, opposite sides: whoever picks at `&` flips per side.
  CHECK_EQ(count("Escape", kProv), 1);
  CHECK_FALSE(count("Escape", kUsed).has_value());

  CHECK_EQ(count_actions(sig, parse_type_string("int => <|1 1"), kProv), 2);
  CHECK_EQ(count_actions(sig, parse_type_string("1"), kProv), 0);

  CHECK_FAILS_WITH(
      Errc::FiniteInputViolation,
      require_finite_input(sig, sig.type_defs.at("BoolSink"), kProv, "c"));
}

TEST_CASE("skeletonize mints value shapes and prunes by budget") {
  Signature sig = sig_with({
      {"Stream", "+{cons: |>2 int /\\ Stream, nil: 1}"},
      {"BoolSink", "bool => BoolSink"},
  });

  CHECK_EQ(print_skel(skeletonize(sig, parse_type_string("int => bool => 1"),
                                  0, kProv)),
           "val#0 => val#1 => 1");
  CHECK_EQ(print_skel(skeletonize(sig, parse_type_string("unit /\\ 1"), 0,
                                  kUsed)),
           "() /\\ 1");
  CHECK_EQ(print_skel(skeletonize(
               sig, parse_type_string("(int * bool) => 1"), 0, kProv)),
           "(val#0, val#1) => 1");

  // Program decisions are carried over whole.
  CHECK_EQ(print_skel(skeletonize(sig, parse_type_string("(int * int) /\\ 1"),
                                  0, kProv)),
           "int * int /\\ 1");
  CHECK_EQ(print_skel(skeletonize(sig, parse_type_string("+{a: 1, b: 1}"), 0,
                                  kProv)),
           "+{a: 1, b: 1}");

  // The unroll budget caps type definition unfolds along each path; branches
  // that cannot finish within it are dropped at world-chosen points.
  TypePtr stream = parse_type_string("Stream");
  CHECK_EQ(print_skel(skeletonize(sig, stream, 1, kUsed)), "+{nil: 1}");
  CHECK_EQ(print_skel(skeletonize(sig, stream, 2, kUsed)),
           "+{cons: |>2 val#0 /\\ +{nil: 1}, nil: 1}");
  CHECK_FAILS_WITH(Errc::BudgetRequired, skeletonize(sig, stream, 0, kUsed));

  // Generated skeletons pass their own compatibility check.
  SkelPtr two = skeletonize(sig, stream, 3, kUsed);
  auto res = check_compat(sig, two, stream, kUsed);
  CHECK_EQ(res.value_vars.size(), 2);
  CHECK_EQ(res.choice_vars.size(), 2);

  CHECK_FAILS_WITH(Errc::FiniteInputViolation,
                   skeletonize(sig, parse_type_string("BoolSink"), 5, kProv));
  // A world-supplied sum has no canonical shape; it needs a written skeleton.
  CHECK_FAILS_WITH(Errc::UsageError,
                   skeletonize(sig, parse_type_string("(int + bool) => 1"), 0,
                               kProv));
  CHECK_FAILS_WITH(Errc::UnknownAnnotation,
                   skeletonize(sig, parse_type_string("<|? 1"), 0, kProv));
}

TEST_CASE("world_potential_bound takes the worst branch") {
  auto res = compat("<|2 &_s{a: <|3 1, b: 1}", "<|2 &{a: <|3 1, b: 1}", kProv);
  CHECK_EQ(world_potential_bound(res.skeleton, kProv), Rat(5));
  // Payments in the other direction do not count.
  auto pay = compat("|>2 1", "|>2 1", kProv);
  CHECK_EQ(world_potential_bound(pay.skeleton, kProv), Rat(0));
  CHECK_EQ(world_potential_bound(pay.skeleton, kUsed), Rat(2));
}

TEST_CASE("config_cost_bound rejects bad skeleton maps") {
  Program p = corpus_program("pair_loose.sill");
  CHECK_FAILS_WITH(Errc::UsageError, config_cost_bound(p, {}));
  auto skels = corpus_skels(p, "pair_loose.skel");
  auto extra = skels;
  extra["zzz"] = Skeleton::mk_one();
  CHECK_FAILS_WITH(Errc::UsageError, config_cost_bound(p, extra));
}

TEST_CASE("corpus cost bounds") {
  CHECK_EQ(corpus_bound("pair_loose.sill", "pair_loose.skel"), Rat(5));
  CHECK_EQ(corpus_bound("pair_tight.sill", "pair_tight.skel"), Rat(3));
  CHECK_EQ(corpus_bound("server_indep.sill", "server_indep.skel"), Rat(4));
  CHECK_EQ(corpus_bound("server_indep3.sill", "server_indep3.skel"), Rat(6));
  CHECK_EQ(corpus_bound("server_seq.sill", "server_seq.skel"), Rat(2));
  CHECK_EQ(corpus_bound("overview_ipcounter.sill", "stream10.skel"), Rat(20));
  CHECK_EQ(corpus_bound("overview_ipcounter.sill", "stream2.skel"), Rat(4));
  CHECK_FAILS_WITH(Errc::FiniteInputViolation,
                   corpus_bound("overview_ipcounter.sill", "inf_stream.skel"));
}

TEST_CASE("a config with one boundary channel bounds to its own potential") {
  Program p = corpus_program("twoproc.sill");
  std::map<std::string, SkelPtr> skels{{"c", Skeleton::mk_one()}};
  CHECK_EQ(config_cost_bound(p, skels), Rat(5));
}

TEST_CASE("programs demanding unbounded input are rejected up front") {
  Program p = corpus_program("inf_input.sill");
  ExternalInterface ext = external_interface(p);
  REQUIRE_EQ(ext.provided.count("c"), 1);
  CHECK_FALSE(count_actions(p.sig, ext.provided.at("c"), kProv).has_value());
  CHECK_FAILS_WITH(
      Errc::FiniteInputViolation,
      require_finite_input(p.sig, ext.provided.at("c"), kProv, "c"));
  CHECK_FAILS_WITH(Errc::FiniteInputViolation,
                   skeletonize(p.sig, ext.provided.at("c"), 8, kProv));
}
