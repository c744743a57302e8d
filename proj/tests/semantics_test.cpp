#include "doctest.h"
#include "test_util.hpp"

#include "sill/parser.hpp"
#include "sill/semantics.hpp"
#include "sill/typecheck.hpp"

using namespace sill;

namespace {

Program checked(const std::string& src) {
  Program p = parse_program(src, "<test>");
  typecheck(p);
  return p;
}

// Two processes whose per-process peaks (2 and 5) sum to 7, while the work
// of the whole configuration never exceeds 5 under any schedule: the 2 units
// p2 performs are re-counted at p1 when it absorbs the close message.
const char* kTwoProc = R"(
type Link = unit /\ |>2 1

proc p2 |- {4} (d : Link) =
  tick 2;
  send d ();
  pay d {2};
  close d

proc p1 |- {1} (c : 1) [d : Link] =
  u <- recv d;
  tick 1;
  get d {2};
  tick 2;
  wait d;
  close c

config { d <- p2; c <- p1 [d]; }
)";

} // namespace

TEST_CASE("expressions evaluate") {
  Program p = checked(R"(
def dbl(x : int) : int = x + x
def pick(b : bool) : int = if b then dbl(4) else 0 - 1
def swap(p : int * bool) : bool * int = match p { (x, y) => (y, x) }
proc main |- {0} (c : 1) = close c
config { c <- main; }
)");
  auto v = eval_expr(p.sig, {}, parse_expr_string("pick(true)"));
  CHECK_EQ(print_rvalue(v), "8");
  v = eval_expr(p.sig, {}, parse_expr_string("pick(1 == 2)"));
  CHECK_EQ(print_rvalue(v), "-1");
  v = eval_expr(p.sig, {}, parse_expr_string("swap((3, false))"));
  CHECK_EQ(print_rvalue(v), "(false, 3)");
  v = eval_expr(p.sig, {}, parse_expr_string("match inl 5 { inl x => x * 10, inr y => 0 }"));
  CHECK_EQ(print_rvalue(v), "50");
}

TEST_CASE("two-process example: net cost, high-water mark, naive peak sum") {
  Program p = checked(kTwoProc);
  Config cfg = initial_config(p);
  CHECK_EQ(cfg.procs.size(), 2);

  RunStats st = run_first_schedule(cfg, 1000, true);
  CHECK(st.finished);
  CHECK(st.blocked.empty());
  CHECK_EQ(st.net_cost, Rat(5));
  CHECK_EQ(st.high_water, Rat(5));
  // p2 peaks at its own 2; p1 at its own 3 plus the 2 it absorbs at wait.
  CHECK_EQ(st.pid_peak.at(0), Rat(2));
  CHECK_EQ(st.pid_peak.at(1), Rat(5));
  CHECK_EQ(st.naive_peak_sum, Rat(7));

  ExploreStats ex = explore_all_schedules(cfg, 100000);
  CHECK_EQ(ex.max_high_water, Rat(5));
  CHECK(ex.any_complete);
  CHECK_FALSE(ex.stuck_found);
  CHECK_EQ(ex.net_cost, Rat(5));
  CHECK_GT(ex.states, 1);
}

TEST_CASE("negative ticks make the high-water mark schedule-dependent") {
  Program p = checked(R"(
proc a |- {3} (x : 1) = tick 3; tick -3; close x
proc b |- {4} (y : 1) = tick 4; close y
proc main |- {0} (top : 1) [x : 1, y : 1] =
  wait x; wait y; close top
config { x <- a; y <- b; top <- main [x, y]; }
)");
  Config cfg = initial_config(p);
  // One schedule lets a's refund land before b runs...
  RunStats st = run_first_schedule(cfg, 1000, false);
  CHECK_EQ(st.net_cost, Rat(4));
  CHECK_EQ(st.high_water, Rat(4));
  // ...but interleaving b's tick between a's +3 and -3 reaches 7.
  ExploreStats ex = explore_all_schedules(cfg, 100000);
  CHECK_EQ(ex.max_high_water, Rat(7));
  CHECK_EQ(ex.net_cost, Rat(4));
  CHECK(ex.any_complete);
}

TEST_CASE("forwarding joins with either end and completes") {
  Program p = checked(R"(
type T = int => 1
proc q |- {0} (c : T) = x <- recv c; close c
proc relay |- {0} (d : T) [c : T] = d <- c
proc main |- {0} (top : 1) [d : T] =
  send d 9; wait d; close top
config { c <- q; d <- relay [c]; top <- main [d]; }
)");
  Config cfg = initial_config(p);
  RunStats st = run_first_schedule(cfg, 1000, false);
  CHECK(st.finished);
  CHECK_EQ(st.net_cost, Rat(0));
  ExploreStats ex = explore_all_schedules(cfg, 100000);
  CHECK(ex.any_complete);
  CHECK_FALSE(ex.stuck_found);
}

TEST_CASE("potential transfers do not synchronise") {
  Program p = checked(R"(
type T = |>1 1
proc prov |- {1} (c : T) = pay c {1}; close c
proc cli |- {0} (top : 1) [c : T] =
  get c {1}; tick 1; wait c; close top
config { c <- prov; top <- cli [c]; }
)");
  Config cfg = initial_config(p);
  // The client's `get` steps locally even before the provider's `pay`.
  std::vector<Step> steps = applicable_steps(cfg);
  bool client_can_get = false;
  for (const Step& s : steps)
    if (s.kind == Step::Kind::Get) client_can_get = true;
  CHECK(client_can_get);
  RunStats st = run_first_schedule(cfg, 1000, false);
  CHECK(st.finished);
  CHECK_EQ(st.net_cost, Rat(1));
}

TEST_CASE("canonical encoding erases channel names and process order") {
  // Two copies of the same process: stepping either one first must land on
  // the same work-erased key, or exploration would revisit mirror states.
  Program p = checked(R"(
proc w |- {1} (z : 1) = tick 1; close z
config { a <- w; b <- w; }
)");
  Config cfg = initial_config(p);
  std::vector<Step> steps = applicable_steps(cfg);
  REQUIRE_EQ(steps.size(), 2);
  Config left = cfg, right = cfg;
  apply_step(left, steps[0]);
  apply_step(right, steps[1]);
  CHECK_EQ(canonical_core(left), canonical_core(right));
  CHECK_NE(canonical_core(left), canonical_core(cfg));
  // The symmetric start state collapses the whole diamond: the exploration
  // visits 1 (start) + 1 (one stepped) + 1 (both stepped) + ... states,
  // never a mirror pair.
  ExploreStats ex = explore_all_schedules(cfg, 100000);
  CHECK_EQ(ex.max_high_water, Rat(2));
  CHECK_LE(ex.states, 9);
}

TEST_CASE("world ends drive external channels from a script") {
  Program p = checked(R"(
type Ask = int => unit /\ 1
proc main |- {2} (top : 1) [d : Ask] =
  send d 7;
  u <- recv d;
  tick 2;
  wait d;
  close top
config { top <- main [d]; }
)");
  ConcreteInput in;
  ChannelScript sc;
  WorldAction a;
  a.kind = WorldAction::Kind::RecvValue;
  sc.acts.push_back(a);
  a = WorldAction{};
  a.kind = WorldAction::Kind::SendValue;
  a.value = RValue::mk_unit();
  sc.acts.push_back(a);
  a = WorldAction{};
  a.kind = WorldAction::Kind::SendClose;
  sc.acts.push_back(a);
  in.scripts["d_script"] = sc;
  in.roots["d"] = {"d_script", true};

  Config cfg = initial_config(p);
  inject_input(cfg, in);
  RunStats st = run_first_schedule(cfg, 1000, false);
  CHECK(st.finished);
  CHECK(st.blocked.empty());
  CHECK_EQ(st.net_cost, Rat(2));

  Config cfg2 = initial_config(p);
  inject_input(cfg2, in);
  ExploreStats ex = explore_all_schedules(cfg2, 100000);
  CHECK_EQ(ex.max_high_water, Rat(2));
  CHECK(ex.any_complete);
}

TEST_CASE("a run without needed input reports the blocked process") {
  Program p = checked(R"(
proc main |- {0} (top : 1) [d : 1] = wait d; close top
config { top <- main [d]; }
)");
  Config cfg = initial_config(p);
  RunStats st = run_first_schedule(cfg, 1000, false);
  CHECK_FALSE(st.finished);
  REQUIRE_EQ(st.blocked.size(), 1);
  CHECK_EQ(st.blocked[0].pid, 0);
  CHECK(st.blocked[0].what.find("wait") != std::string::npos);
}

TEST_CASE("budgets stop runaway exploration") {
  Program p = checked(kTwoProc);
  Config cfg = initial_config(p);
  CHECK_FAILS_WITH(Errc::BudgetExceeded, explore_all_schedules(cfg, 2));
  CHECK_FAILS_WITH(Errc::BudgetExceeded, run_first_schedule(cfg, 3, false));
}

TEST_CASE("a configuration that respawns itself forever is detected") {
  Program p = checked(R"(
proc loop |- {0} (c : 1) = c2 <- loop; c <- c2
config { c <- loop; }
)");
  Config cfg = initial_config(p);
  CHECK_FAILS_WITH(Errc::BudgetExceeded, explore_all_schedules(cfg, 100000));
  CHECK_FAILS_WITH(Errc::BudgetExceeded, run_first_schedule(cfg, 50, false));
}
