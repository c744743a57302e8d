// Skeletons describe one finite interaction between a configuration and the
// external world on a single channel. This module validates hand-written
// skeletons against session types, generates canonical skeletons from types
// under an unfold budget, decides whether finite interactions exist at all,
// and computes how much potential a skeleton lets the world inject.
#pragma once

#include "sill/ast.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sill {

struct SkelFile;

struct SkelCheckResult {
  // Fully expanded (no skeleton Vars), with every world-chosen choice point
  // normalised to its world-chosen node kind and, when it offers more than
  // one label, named by a choice variable.
  SkelPtr skeleton;
  // Value variables the world fills in, with their base sorts.
  std::map<std::string, BaseType> value_vars;
  // Choice variables, each with the labels the skeleton leaves open (a
  // nonempty subset of the type's labels, in label order).
  std::map<std::string, std::vector<std::string>> choice_vars;
};

// Checks a skeleton against a concrete session type. `side` says who
// provides the channel the skeleton describes. Rules:
//   - positions the program decides (its sends, its label choices) must be
//     carried over exactly: value types equal, label sets complete;
//   - positions the world decides may be specialised: world-sent values
//     become concrete shapes with variables at base-sort leaves, and
//     world-chosen label sets may shrink to any nonempty subset;
//   - potential transfers and channel moves must mirror the type, with
//     channel receives checked on the flipped side.
// Variables (value and choice) share one namespace; reuse is rejected.
SkelCheckResult check_compat(const Signature& sig, const SkelPtr& skel,
                             const TypePtr& type, Side side);

// Minimal number of protocol actions a finite interaction at this type
// needs, letting the world pick escape branches at its choice points;
// nullopt when every strategy is infinite (so no skeleton can exist).
std::optional<unsigned long long> count_actions(const Signature& sig,
                                                const TypePtr& t, Side side);

// Fails with FiniteInputViolation when count_actions is unbounded.
void require_finite_input(const Signature& sig, const TypePtr& t, Side side,
                          const std::string& chan);

// Generates the canonical skeleton for a type: every world-decided value
// becomes a fresh variable shape, every world-chosen choice keeps all
// branches reachable within the budget (dropping the rest), and program
// decisions are carried over whole. `unfold_budget` limits how many type
// definition unfolds any one path may take; exceeding it fails with
// BudgetRequired. Run check_compat on the result to collect its variables.
SkelPtr skeletonize(const Signature& sig, const TypePtr& t, int unfold_budget,
                    Side side);

// Upper bound on the potential the world can push into the program over a
// channel with this (expanded) skeleton: provider receives (<|q) count when
// the program provides, provider payments (|>q) count when the world does,
// channels received from the world count on the flipped side, and choice
// points take the worst branch.
Rat world_potential_bound(const SkelPtr& k, Side side);

// Total potential available to a configuration interacting through the
// given skeletons: the sum of config-entry initial potentials plus the
// world inflow bound of every external channel. Every external channel must
// have a skeleton bound to it.
Rat config_cost_bound(const Program& p,
                      const std::map<std::string, SkelPtr>& skels);

// Installs a parsed skeleton file's named definitions into the signature and
// returns its channel bindings as a map. Rejects a definition name that is
// already taken and a channel bound twice.
std::map<std::string, SkelPtr> load_skel_file(Signature& sig,
                                              const SkelFile& f);

} // namespace sill
