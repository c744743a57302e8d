// Recursive-descent parser for program (.sill) and skeleton (.skel) files.
//
// Program files contain `type`, `def`, and `proc` definitions plus one
// `config { ... }` block naming the top-level processes. Skeleton files
// contain `skeleton` definitions and `target c = K` bindings that attach a
// skeleton to one of the program's external channels.
//
// Grammar notes (also in the README):
//   - `b => A` / `b /\ A` take a value type on the left; `A -o B` and `A * B`
//     take session types on both sides. `(bool => 1) -o X` needs the parens
//     because `=>` extends to the right as far as possible.
//   - `<|q` and `|>q` bind the entire remaining type: `<|2 int => X` reads as
//     `<|2 (int => X)`.
//   - In skeletons, a value position holds either a value type (the program
//     computes that value) or a value term with variables (the external world
//     supplies it): `int => K` vs `x => K`.
//   - `?` at a potential position (type annotations, `get`/`pay` amounts, the
//     `|- {q}` of a process header) marks it for annotation inference.
#pragma once

#include "sill/ast.hpp"

#include <string>
#include <utility>
#include <vector>

namespace sill {

// A parsed .skel file: shared named skeletons plus per-channel bindings.
struct SkelFile {
  std::map<std::string, SkelPtr> defs;
  std::vector<std::pair<std::string, SkelPtr>> targets;
  std::string source_name;
};

Program parse_program(const std::string& src, const std::string& filename);
SkelFile parse_skel_file(const std::string& src, const std::string& filename);

// Single-construct entry points for tests and programmatic use. The site
// counter, when given, receives the number of `?` annotation sites seen.
TypePtr parse_type_string(const std::string& src, int* num_sites = nullptr);
SkelPtr parse_skel_string(const std::string& src);
FunPtr parse_expr_string(const std::string& src);

std::string read_file(const std::string& path);

} // namespace sill
