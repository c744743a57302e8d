// Concrete cost semantics: multiset rewriting over process and message
// predicates, each carrying the work it has performed so far.
//
// Cost model:
//   - `tick q` adds q to the acting process's work counter (q may be
//     negative). Every other rule conserves the total.
//   - net cost of a run  = the final sum of work over all predicates,
//   - high-water mark    = the maximum the sum reaches along the schedule.
// Since only ticks change the sum, the high-water mark of a state is its
// current sum plus the best cumulative tick prefix any schedule can still
// produce; exploration memoises that quantity on work-erased states.
//
// Sends never block: the sender turns into a message predicate plus its
// continuation, and the receiver later joins with the message, absorbing its
// work. A send by the provider of c keeps the name c on the message and
// renames the provider to the fresh continuation channel; a send by the
// client mints the continuation name on the message instead. Potential
// transfers (`get`/`pay`) are bookkeeping for the type system and cost
// nothing here: they step locally without synchronisation.
//
// The external world is modelled by script-driven channel ends created from a
// concrete input. World ends advance eagerly after every program step; this
// loses no schedules because world messages carry no work and only enable
// program steps, never force them.
#pragma once

#include "sill/ast.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sill {

// --- runtime values -------------------------------------------------------

struct RValue;
using RVPtr = std::shared_ptr<const RValue>;

struct RValue {
  enum class Kind { Unit, Bool, Int, Pair, Inl, Inr, Proc };
  Kind kind;
  bool bval = false;
  BigInt ival = 0;
  RVPtr left, right; // Pair (both), Inl/Inr (left)
  // Proc: a process literal closed over the values it captured
  FunPtr pv;
  std::map<std::string, RVPtr> env;

  static RVPtr mk_unit();
  static RVPtr mk_bool(bool b);
  static RVPtr mk_int(BigInt v);
  static RVPtr mk_pair(RVPtr l, RVPtr r);
  static RVPtr mk_inl(RVPtr v);
  static RVPtr mk_inr(RVPtr v);
  static RVPtr mk_proc(FunPtr pv, std::map<std::string, RVPtr> env);
};

std::string print_rvalue(const RVPtr& v);
bool rvalue_equal(const RVPtr& a, const RVPtr& b);

// Evaluates a first-order expression. Terminates because the eagerly-called
// definition graph is acyclic (checked by check_signature) and process
// bodies are captured unevaluated.
RVPtr eval_expr(const Signature& sig, const std::map<std::string, RVPtr>& env,
                const FunPtr& e);

// --- configurations ---------------------------------------------------------

struct Msg {
  enum class Kind { Value, Chan, Label, Close, Fwd };
  Kind kind;
  std::string on;     // channel the interaction is on
  std::string next;   // continuation channel; Fwd: the forwarded-to channel
  bool from_provider; // which end sent it (Close and Fwd come from providers)
  Rat w;
  RVPtr value;      // Value
  std::string chan; // Chan payload
  std::string label;
};

struct ProcState {
  int pid; // stable across the run, for per-process accounting
  Rat w;
  ProcPtr term;
  std::string prov_var;  // the local name the term uses for its channel
  std::string prov_name; // the global channel it currently provides
  std::map<std::string, RVPtr> venv;
  std::map<std::string, std::string> cenv; // local channel var -> global name
};

// One action the external world performs on a channel it touches.
struct WorldAction {
  enum class Kind {
    SendValue, SendLabel, SendChan, SendClose,
    RecvValue, RecvLabel, RecvChan, RecvClose,
  };
  Kind kind;
  RVPtr value;             // SendValue
  std::string label;       // SendLabel
  std::string chan_script; // SendChan / RecvChan: script for the moved channel
  // RecvLabel: how the world reacts to each label the program may pick. On a
  // mapped label the end jumps to that script; an unmapped label stalls the
  // end (the world has no reaction, the message stays). An empty map just
  // advances linearly, for choices whose continuation needs no branching.
  std::map<std::string, std::string> branch_scripts;
};

struct ChannelScript {
  std::vector<WorldAction> acts;
};

// A concrete input: a script per world-touched channel. Roots bind the
// configuration's external channels; SendChan/RecvChan actions pull further
// scripts in for channels created or received mid-run.
struct ConcreteInput {
  std::map<std::string, ChannelScript> scripts;
  struct Root {
    std::string script;
    bool world_provides; // true when the world plays the provider end
  };
  std::map<std::string, Root> roots; // external channel -> script binding
};

struct WorldEnd {
  std::string script;
  size_t pos = 0;
  std::string cur;     // the global channel name this end currently holds
  bool world_provides; // which end of `cur` the world owns
};

struct Config {
  const Program* prog = nullptr;
  std::vector<ProcState> procs;
  std::vector<Msg> msgs;
  std::vector<WorldEnd> worlds;
  const ConcreteInput* input = nullptr; // scripts referenced by world ends
  Rat world_w;                          // work absorbed by the world
  long name_counter = 0;
  int next_pid = 0;

  Rat total_w() const;
};

// Spawns the config block's processes. The program must be typechecked and
// fully annotated.
Config initial_config(const Program& p);

// Attaches world ends for a concrete input. Channel names used by the input
// must not collide with names the run can mint, so this advances the
// configuration's name counter past them.
void inject_input(Config& cfg, const ConcreteInput& in);

// --- steps ---------------------------------------------------------------------

struct Step {
  enum class Kind {
    Tick, Get, Pay, Spawn,
    SendValue, SendChan, SendLabel, Close, Fwd,
    RecvValue, RecvChan, RecvLabel, Wait,
    FwdJoinProvider, // forward message absorbed by the provider it names
    FwdJoinClient,   // forward message absorbed by the client holding it
    FwdJoinMsg,      // forward message composed into another message
  };
  Kind kind;
  int proc = -1; // index into cfg.procs
  int msg = -1;  // index into cfg.msgs (receives and forward joins)
  int msg2 = -1; // FwdJoinMsg: the message being renamed
};

const char* step_kind_name(Step::Kind k);

// Program steps only; world ends advance in normalize_worlds.
std::vector<Step> applicable_steps(const Config& cfg);

// Applies one step, then lets every world end advance as far as it can.
// Returns the tick delta of the step (zero for all but Tick).
Rat apply_step(Config& cfg, const Step& s);

// A process that cannot step and the reason it cannot.
struct BlockReport {
  int pid;
  std::string what;
};
std::vector<BlockReport> blocked_report(const Config& cfg);

// --- whole-run drivers ----------------------------------------------------------

struct RunStats {
  Rat net_cost;
  Rat high_water;
  std::map<int, Rat> pid_peak; // peak work seen per process
  Rat naive_peak_sum;          // sum of the per-process peaks
  bool finished = false;       // no processes left
  std::vector<BlockReport> blocked;
  size_t steps = 0;
  std::vector<std::string> trace; // filled when want_trace
};

// Runs one deterministic schedule (first applicable step, procs in pid
// order). Throws BudgetExceeded past max_steps.
RunStats run_first_schedule(Config cfg, size_t max_steps, bool want_trace);

struct ExploreStats {
  Rat max_high_water;
  size_t states = 0;     // distinct work-erased states visited
  bool stuck_found = false;
  Rat net_cost;          // net cost of complete schedules (schedule-invariant)
  bool any_complete = false;
};

// Maximises the high-water mark over every schedule by memoised search on
// work-erased canonical states. Throws BudgetExceeded past state_budget.
ExploreStats explore_all_schedules(const Config& cfg, size_t state_budget);

// Work-erased canonical encoding of a configuration (exposed for tests).
std::string canonical_core(const Config& cfg);

} // namespace sill
