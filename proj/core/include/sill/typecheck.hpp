// Session typechecking with potential tracking.
//
// Checks every definition once against its declared interface (so recursion
// through spawning needs no unfolding) and then checks the config block's
// channel wiring. Potential is threaded as an affine expression: on a fully
// annotated program every comparison is decided on the spot, while `?` sites
// turn the comparisons into constraints for the inference LP.
#pragma once

#include "sill/ast.hpp"
#include "sill/linexpr.hpp"

#include <map>
#include <vector>

namespace sill {

struct CheckResult {
  // Nonempty only when the program has `?` annotation sites (or when a
  // constraint mixes sites with constants). All constants here are satisfied.
  std::vector<LinConstraint> constraints;
};

CheckResult typecheck(const Program& p);

// The configuration's boundary with the external world, available after a
// successful typecheck: channels the processes provide to the world, and
// channels the processes expect the world to provide.
struct ExternalInterface {
  std::map<std::string, TypePtr> provided;
  std::map<std::string, TypePtr> used;
};

ExternalInterface external_interface(const Program& p);

// The interface of the process a config entry spawns (its provided type,
// used types, and initial potential), resolved without running anything.
std::shared_ptr<ProcInterface> config_callee_interface(const Program& p,
                                                       const ConfigEntry& e);

} // namespace sill
