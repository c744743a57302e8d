// Pretty-printers that emit the concrete syntax back out. Printing then
// reparsing yields a structurally identical tree; tests rely on that.
#pragma once

#include "sill/ast.hpp"
#include "sill/parser.hpp"

#include <string>

namespace sill {

std::string print_fun_type(const FunTypePtr& t);
std::string print_type(const TypePtr& t);
std::string print_hvalue(const HPtr& h);
std::string print_skel(const SkelPtr& k);
std::string print_expr(const FunPtr& e);
std::string print_proc(const ProcPtr& p, int indent = 0);
std::string print_program(const Program& p);
std::string print_skel_file(const SkelFile& f);

} // namespace sill
