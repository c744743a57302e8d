// Deciding path constraints and producing witness models.
//
// Two backends share one result type. The built-in solver decides the
// fragment the language actually produces (label assignments, boolean
// literals, and linear integer atoms, with a complete procedure on the
// offset-equality + bounds + disequality subset) so the whole pipeline runs
// with zero external dependencies. Anything outside that fragment returns
// Unknown, and the orchestrating solve() can then shell out to any
// SMT-LIB2-speaking solver process.
//
// Every satisfiable answer is re-substituted into the constraint before it
// is returned; a model that does not check is reported as a solver error
// rather than passed along.
#pragma once

#include "sill/constraint.hpp"

#include <optional>
#include <string>

namespace sill {

enum class SolveStatus { Sat, Unsat, Unknown };

struct SolveResult {
  SolveStatus status = SolveStatus::Unknown;
  SkelModel model;    // total over decls when status == Sat
  std::string detail; // why Unknown / Unsat, for reports
};

// Renders declarations plus one assert per literal in SMT-LIB2. Output is
// byte-stable for a given input: declarations are sorted by name, label
// universes become datatype declarations, and any family of variables that
// is pairwise distinct is folded into a single (assert (distinct ...)).
// Ends with (check-sat) and (get-model).
std::string emit_smtlib2(const VarDecls& decls, const PathConstraint& phi);

// The built-in decision procedure. Sound on every answer it gives: Sat
// models satisfy phi (a failed re-substitution is an Internal error, since
// that would be a bug here, not in user input), Unsat is definitive
// (backed by an exact rational feasibility check), Unknown means the
// constraint falls outside the supported fragment.
SolveResult solve_builtin(const VarDecls& decls, const PathConstraint& phi);

// External solver subprocess: feeds it the emit_smtlib2 text on stdin and
// parses `sat`/`unsat`/`unknown` plus the (get-model) s-expression. The
// command is run through /bin/sh, so flags are allowed ("z3 -in"). Fails
// with SolverError when the process cannot run, times out, or answers in an
// unparseable way.
struct ExternalSolver {
  std::string command;
  int timeout_ms = 10000;
};
SolveResult solve_external(const ExternalSolver& ext, const VarDecls& decls,
                           const PathConstraint& phi);

// Fills in every declared variable the model does not mention: integers
// default to 0, booleans to false, units to (), choices to their first
// label. Solvers call this so Sat models are always total.
void complete_model(const VarDecls& decls, SkelModel& m);

// Built-in first; on Unknown, the external solver if one is configured.
// Sat models are completed to total maps over decls (unconstrained
// variables default to 0 / false / () / the first label) and re-checked by
// substitution before being returned.
struct SolveOptions {
  std::optional<ExternalSolver> external;
};
SolveResult solve(const VarDecls& decls, const PathConstraint& phi,
                  const SolveOptions& opts = {});

} // namespace sill
