// From skeletons to concrete inputs.
//
// An input space pairs every external channel of a configuration with a
// validated skeleton: the finite interaction shape the world will follow,
// with variables at the positions the world decides. A model assigns those
// variables; instantiation turns (space, model) into the channel scripts the
// concrete semantics runs against. Enumeration walks a finite value domain
// to produce every input the space admits, which is what the brute-force
// oracles in the tests compare against.
#pragma once

#include "sill/constraint.hpp"
#include "sill/semantics.hpp"
#include "sill/skeleton.hpp"
#include "sill/typecheck.hpp"

#include <map>
#include <string>
#include <vector>

namespace sill {

struct InputSpace {
  // Per external channel: the expanded skeleton and who provides the channel.
  std::map<std::string, SkelCheckResult> checked;
  std::map<std::string, Side> sides;
  // All skeleton variables across the channels, one namespace.
  VarDecls decls;
};

// Validates one skeleton per external channel of the configuration. Missing
// skeletons and skeletons bound to channels the configuration does not
// expose are rejected; variables must be distinct across channels.
InputSpace input_space(const Program& p,
                       const std::map<std::string, SkelPtr>& skels);

// Builds the world scripts that realize `model` over the space. The model
// must cover every variable (solvers return total models). The script for an
// external channel carries the channel's name; channels moved mid-session
// get derived names ("c/1", "c/2", ...). Program-side choice points become
// branch-aware label receives, so one input reacts correctly no matter which
// label the program picks.
ConcreteInput instantiate_input(const InputSpace& space,
                                const SkelModel& model);

// Finite domains for enumeration. Integer variables draw from `per_var` when
// listed and from `ints` otherwise; booleans and units enumerate themselves;
// choice variables range over their open labels.
struct ValueDomain {
  std::vector<BigInt> ints;
  std::map<std::string, std::vector<BigInt>> per_var;
};

// Every model over the space's variables, values drawn from the domain.
// Fails with DomainTooLarge when the product exceeds `cap`, and with
// UsageError when an integer variable has an empty domain.
std::vector<SkelModel> enumerate_models(const InputSpace& space,
                                        const ValueDomain& dom, size_t cap);

// enumerate_models followed by instantiation: every concrete input the
// space admits over the domain.
std::vector<ConcreteInput> enumerate_inputs(const InputSpace& space,
                                            const ValueDomain& dom,
                                            size_t cap);

std::string print_input(const ConcreteInput& in);

} // namespace sill
