// Exact-rational linear programming for annotation inference.
//
// Solves: minimize objective . x  subject to the given constraints, x >= 0.
// Two-phase simplex with Bland's rule, so degenerate programs terminate.
// All arithmetic is exact; no tolerances are involved anywhere.
#pragma once

#include "sill/linexpr.hpp"
#include "sill/rational.hpp"

#include <vector>

namespace sill {

struct LpResult {
  bool feasible = false;
  std::vector<Rat> x; // one value per variable, all >= 0
  Rat objective;
};

// num_vars: variables 0..num_vars-1 (LinExpr site indices must stay below
// it). Each constraint's expression e is read as e >= 0 or e = 0.
LpResult lp_solve(int num_vars, const std::vector<LinConstraint>& cons,
                  const std::vector<Rat>& objective);

} // namespace sill
