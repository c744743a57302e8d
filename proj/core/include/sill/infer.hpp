// Annotation inference: solves every `?` potential site in a program to a
// concrete rational and rebuilds the program with the solved values filled
// in. The assignment minimises the sum of all sites subject to the typing
// constraints, so unconstrained sites come out as 0 (and stay written as
// explicit zeros).
#pragma once

#include "sill/ast.hpp"

#include <vector>

namespace sill {

struct InferResult {
  Program program;        // fully annotated; num_ann_sites is 0
  std::vector<Rat> sites; // solved value per original site index
};

// Typechecks, solves the collected constraints exactly, and substitutes.
// Fails with Infeasible when no nonnegative assignment satisfies them.
// Programs without `?` sites pass through unchanged.
InferResult infer_annotations(const Program& p);

} // namespace sill
