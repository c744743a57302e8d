// Abstract syntax for the session-typed language and its input skeletons.
//
// Three layers share this file:
//   - functional types/terms (values exchanged over channels, process values),
//   - session types (channel protocols, with potential annotations),
//   - skeletons (session types specialised to a finite interaction, with
//     symbolic variables at the positions the external world fills in).
//
// Nodes are immutable after construction and shared via shared_ptr; recursion
// in types and skeletons goes through named signature definitions only, never
// through inline fixed points.
#pragma once

#include "sill/diagnostics.hpp"
#include "sill/rational.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sill {

// ---------------------------------------------------------------------------
// Functional layer types

enum class BaseType { Unit, Bool, Int };

struct FunType;
struct SessionType;
using FunTypePtr = std::shared_ptr<const FunType>;
using TypePtr = std::shared_ptr<const SessionType>;

// A process interface {c : A <- [A1, ..., An] |> q}: what a spawned process
// provides, what it uses, and the potential it starts with.
struct ProcInterface {
  TypePtr provides;
  std::vector<TypePtr> uses;
  Rat init_potential;
  int init_site = -1; // annotation-site index when the potential is unknown
  bool init_unknown() const { return init_site >= 0; }
};

struct FunType {
  enum class Kind { Base, Prod, Sum, Proc };
  Kind kind;
  BaseType base = BaseType::Unit;          // Base
  FunTypePtr left, right;                  // Prod, Sum
  std::shared_ptr<ProcInterface> proc;     // Proc

  static FunTypePtr mk_base(BaseType b);
  static FunTypePtr mk_prod(FunTypePtr l, FunTypePtr r);
  static FunTypePtr mk_sum(FunTypePtr l, FunTypePtr r);
  static FunTypePtr mk_proc(ProcInterface iface);
};

bool fun_type_equal(const FunTypePtr& a, const FunTypePtr& b);
std::string base_type_name(BaseType b);

// ---------------------------------------------------------------------------
// Session types

struct SessionType {
  enum class Kind {
    Var,     // reference to a signature definition
    ValIn,   // b => A   provider receives a value
    ValOut,  // b /\ A   provider sends a value
    ChanIn,  // A1 -o A2 provider receives a channel
    ChanOut, // A1 *  A2 provider sends a channel
    Ext,     // &{l: A}  provider receives a label
    Int,     // +{l: A}  provider sends a label
    One,     // 1        provider closes
    Get,     // <|q A    provider receives q units of potential
    Pay,     // |>q A    provider pays q units of potential
  };
  Kind kind;
  std::string var;                        // Var
  FunTypePtr value;                       // ValIn, ValOut
  TypePtr arg, cont;                      // ChanIn/ChanOut (arg+cont), Get/Pay (cont)
  std::map<std::string, TypePtr> branches; // Ext, Int (ordered by label)
  Rat q;                                  // Get, Pay
  int ann_site = -1;                      // annotation-site index for unknown q
  SourceSpan span;

  bool ann_unknown() const { return ann_site >= 0; }

  static TypePtr mk_var(std::string name, SourceSpan sp = {});
  static TypePtr mk_valin(FunTypePtr b, TypePtr a);
  static TypePtr mk_valout(FunTypePtr b, TypePtr a);
  static TypePtr mk_chanin(TypePtr arg, TypePtr cont);
  static TypePtr mk_chanout(TypePtr arg, TypePtr cont);
  static TypePtr mk_ext(std::map<std::string, TypePtr> bs);
  static TypePtr mk_int(std::map<std::string, TypePtr> bs);
  static TypePtr mk_one();
  static TypePtr mk_get(Rat q, TypePtr cont, int site = -1);
  static TypePtr mk_pay(Rat q, TypePtr cont, int site = -1);
};

// ---------------------------------------------------------------------------
// Skeletons

// Skeleton value terms H: the shapes the external world may send, with
// variables (restricted to base sorts) at the leaves the solver fills in.
struct HValue;
using HPtr = std::shared_ptr<const HValue>;
struct HValue {
  enum class Kind { Var, Unit, Bool, Int, Pair, Inl, Inr };
  Kind kind;
  std::string var;
  bool bval = false;
  BigInt ival = 0;
  HPtr left, right; // Pair (both), Inl/Inr (left)

  static HPtr mk_var(std::string name);
  static HPtr mk_unit();
  static HPtr mk_bool(bool b);
  static HPtr mk_int(BigInt v);
  static HPtr mk_pair(HPtr l, HPtr r);
  static HPtr mk_inl(HPtr v);
  static HPtr mk_inr(HPtr v);
};

struct Skeleton;
using SkelPtr = std::shared_ptr<const Skeleton>;

struct Skeleton {
  enum class Kind {
    Var,         // reference to a named skeleton definition
    ValInWorld,  // H => K  world supplies a value (provider-side receive)
    ValInProc,   // b => K  the program supplies the value
    ValOutProc,  // b /\ K  the program sends a value
    ValOutWorld, // H /\ K  world supplies a value (provider-side send)
    ChanIn,      // K1 -o K2
    ChanOut,     // K1 * K2
    Ext,         // &{l: K}    labels chosen by the program
    ExtWorld,    // &_x{l: K}  labels chosen by the world, recorded in x
    Int,         // +{l: K}    labels chosen by the program
    IntWorld,    // +_x{l: K}  labels chosen by the world, recorded in x
    One,
    Get,         // <|q K
    Pay,         // |>q K
  };
  Kind kind;
  std::string var;                         // Var
  HPtr hval;                               // ValInWorld, ValOutWorld
  FunTypePtr value;                        // ValInProc, ValOutProc
  SkelPtr arg, cont;                       // ChanIn/ChanOut, Get/Pay (cont)
  std::string choice_var;                  // ExtWorld, IntWorld
  std::map<std::string, SkelPtr> branches; // choices
  Rat q;                                   // Get, Pay
  SourceSpan span;

  static SkelPtr mk_var(std::string name, SourceSpan sp = {});
  static SkelPtr mk_valin_world(HPtr h, SkelPtr k);
  static SkelPtr mk_valin_proc(FunTypePtr b, SkelPtr k);
  static SkelPtr mk_valout_proc(FunTypePtr b, SkelPtr k);
  static SkelPtr mk_valout_world(HPtr h, SkelPtr k);
  static SkelPtr mk_chanin(SkelPtr a, SkelPtr k);
  static SkelPtr mk_chanout(SkelPtr a, SkelPtr k);
  static SkelPtr mk_ext(std::map<std::string, SkelPtr> bs);
  static SkelPtr mk_ext_world(std::string x, std::map<std::string, SkelPtr> bs);
  static SkelPtr mk_int(std::map<std::string, SkelPtr> bs);
  static SkelPtr mk_int_world(std::string x, std::map<std::string, SkelPtr> bs);
  static SkelPtr mk_one();
  static SkelPtr mk_get(Rat q, SkelPtr k);
  static SkelPtr mk_pay(Rat q, SkelPtr k);
};

// Which side of an external channel the program is on. ProcProvides checks
// the skeleton against the provider protocol (K <= A); WorldProvides checks
// the mirrored judgment (A <= K) for channels the world provides.
enum class Side { ProcProvides, WorldProvides };
Side flip(Side s);

// ---------------------------------------------------------------------------
// Functional layer terms

struct FunTerm;
struct ProcTerm;
using FunPtr = std::shared_ptr<const FunTerm>;
using ProcPtr = std::shared_ptr<const ProcTerm>;

enum class ArithOp { Add, Sub, Mul };
enum class CmpOp { Eq, Lt, Le };

struct FunTerm {
  enum class Kind {
    Var, Unit, BoolLit, IntLit, Pair, Inl, Inr,
    FunRef,    // bare reference to a definition
    App,       // f(e1, ..., en), first-order
    Arith, Cmp, If,
    ProcVal,   // a process literal (only produced by `proc` definitions)
    MatchPair, // match e { (x, y) => e' }
    MatchSum,  // match e { inl x => e1, inr y => e2 }
  };
  Kind kind;
  std::string name;            // Var, FunRef, App (callee)
  bool bval = false;
  BigInt ival = 0;
  std::vector<FunPtr> args;    // App; Pair/Inl/Inr/Arith/Cmp/If/Match operands
  ArithOp aop = ArithOp::Add;
  CmpOp cop = CmpOp::Eq;
  std::string bind1, bind2;    // MatchPair (x,y), MatchSum (x|y)
  // ProcVal payload:
  std::string prov_name;
  std::vector<std::string> use_names;
  std::shared_ptr<ProcInterface> iface;
  ProcPtr body;
  SourceSpan span;

  static FunPtr mk_var(std::string n, SourceSpan sp = {});
  static FunPtr mk_unit();
  static FunPtr mk_bool(bool b);
  static FunPtr mk_int(BigInt v);
  static FunPtr mk_pair(FunPtr a, FunPtr b);
  static FunPtr mk_inl(FunPtr a);
  static FunPtr mk_inr(FunPtr a);
  static FunPtr mk_funref(std::string n, SourceSpan sp = {});
  static FunPtr mk_app(std::string f, std::vector<FunPtr> args, SourceSpan sp = {});
  static FunPtr mk_arith(ArithOp op, FunPtr a, FunPtr b);
  static FunPtr mk_cmp(CmpOp op, FunPtr a, FunPtr b);
  static FunPtr mk_if(FunPtr c, FunPtr t, FunPtr e);
  static FunPtr mk_procval(std::string prov, std::vector<std::string> uses,
                           std::shared_ptr<ProcInterface> iface, ProcPtr body);
  static FunPtr mk_match_pair(FunPtr e, std::string x, std::string y, FunPtr body);
  static FunPtr mk_match_sum(FunPtr e, std::string x, FunPtr l, std::string y, FunPtr r);
};

// ---------------------------------------------------------------------------
// Process layer terms

struct ProcTerm {
  enum class Kind {
    Spawn,  // c <- e [d1, ..., dn]; P
    Fwd,    // c <- d
    Tick,   // tick q; P
    Recv,   // x <- recv c; P   (value or channel, decided by c's type)
    SendVal,// send c e; P
    SendChan,// send c d; P
    Case,   // case c { l => P, ... }
    Select, // c.l; P
    Close,  // close c
    Wait,   // wait c; P
    Get,    // get c {q}; P
    Pay,    // pay c {q}; P
  };
  Kind kind;
  std::string chan;                 // the channel acted on (Spawn: the binder)
  std::string chan2;                // Fwd source, SendChan payload
  std::string binder;               // Recv
  FunPtr expr;                      // Spawn callee, SendVal payload
  std::vector<std::string> spawn_uses;
  std::map<std::string, ProcPtr> branches; // Case
  std::string label;                // Select
  Rat q;                            // Tick, Get, Pay
  int ann_site = -1;                // Get/Pay with unknown amount
  ProcPtr cont;
  SourceSpan span;

  bool ann_unknown() const { return ann_site >= 0; }

  static ProcPtr mk_spawn(std::string c, FunPtr e, std::vector<std::string> uses,
                          ProcPtr cont, SourceSpan sp = {});
  static ProcPtr mk_fwd(std::string to, std::string from, SourceSpan sp = {});
  static ProcPtr mk_tick(Rat q, ProcPtr cont, SourceSpan sp = {});
  static ProcPtr mk_recv(std::string binder, std::string c, ProcPtr cont,
                         SourceSpan sp = {});
  static ProcPtr mk_sendval(std::string c, FunPtr e, ProcPtr cont, SourceSpan sp = {});
  static ProcPtr mk_sendchan(std::string c, std::string d, ProcPtr cont,
                             SourceSpan sp = {});
  static ProcPtr mk_case(std::string c, std::map<std::string, ProcPtr> bs,
                         SourceSpan sp = {});
  static ProcPtr mk_select(std::string c, std::string l, ProcPtr cont,
                           SourceSpan sp = {});
  static ProcPtr mk_close(std::string c, SourceSpan sp = {});
  static ProcPtr mk_wait(std::string c, ProcPtr cont, SourceSpan sp = {});
  static ProcPtr mk_get(std::string c, Rat q, ProcPtr cont, int site = -1,
                        SourceSpan sp = {});
  static ProcPtr mk_pay(std::string c, Rat q, ProcPtr cont, int site = -1,
                        SourceSpan sp = {});
};

// ---------------------------------------------------------------------------
// Signatures and programs

struct FunDef {
  std::string name;
  std::vector<std::pair<std::string, FunTypePtr>> params;
  FunPtr value;   // for `proc` definitions this is a ProcVal
  FunTypePtr ret; // declared return type; null for `proc` definitions
  SourceSpan span;
};

struct Signature {
  std::map<std::string, TypePtr> type_defs;
  std::map<std::string, FunDef> fun_defs;
  std::map<std::string, SkelPtr> skeleton_defs;

  TypePtr lookup_type(const std::string& name, SourceSpan sp = {}) const;
  const FunDef& lookup_fun(const std::string& name, SourceSpan sp = {}) const;
  SkelPtr lookup_skeleton(const std::string& name, SourceSpan sp = {}) const;
};

// One top-level instantiation from a program's `config { ... }` block.
struct ConfigEntry {
  std::string chan;                 // the channel the process provides
  FunPtr callee;                    // process expression to spawn
  std::vector<std::string> uses;    // channels it consumes
  SourceSpan span;
};

// The number of `?` annotation sites registered while parsing, used by
// annotation inference to size its unknown vector.
struct Program {
  Signature sig;
  std::vector<ConfigEntry> config;
  int num_ann_sites = 0;
  std::string source_name;
};

// Unfolds a Var one step through the signature. Other kinds pass through.
TypePtr unfold(const Signature& sig, const TypePtr& t);
SkelPtr unfold_skel(const Signature& sig, const SkelPtr& k);

// Coinductive equality of session types up to unfolding of definitions.
bool type_equal(const Signature& sig, const TypePtr& a, const TypePtr& b);

// Rejects definitions like X = X whose unfolding never reaches a constructor.
void check_contractive(const Signature& sig);

// Resolves every Var reference (types, skeletons, functions) or fails with
// DanglingReference; also validates the functional-layer call graph that is
// evaluated eagerly (outside process bodies) to be acyclic.
void check_signature(const Program& p);

const char* proc_kind_name(ProcTerm::Kind k);

} // namespace sill
