// Affine expressions over annotation-site unknowns, used to thread potential
// through the typechecker. A fully annotated program only ever produces
// constant expressions; `?` sites introduce variables whose constraints are
// later solved by the annotation-inference LP.
#pragma once

#include "sill/diagnostics.hpp"
#include "sill/rational.hpp"

#include <map>
#include <string>

namespace sill {

struct LinExpr {
  Rat c;                    // constant term
  std::map<int, Rat> coeff; // annotation site -> coefficient, zeros dropped

  static LinExpr constant(Rat r) {
    LinExpr e;
    e.c = std::move(r);
    return e;
  }
  static LinExpr site(int i) {
    LinExpr e;
    e.coeff[i] = 1;
    return e;
  }

  bool is_const() const { return coeff.empty(); }

  LinExpr& operator+=(const LinExpr& o) {
    c += o.c;
    for (const auto& [i, k] : o.coeff) {
      Rat& mine = coeff[i];
      mine += k;
      if (mine == 0) coeff.erase(i);
    }
    return *this;
  }
  LinExpr& operator-=(const LinExpr& o) {
    c -= o.c;
    for (const auto& [i, k] : o.coeff) {
      Rat& mine = coeff[i];
      mine -= k;
      if (mine == 0) coeff.erase(i);
    }
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
  friend bool operator==(const LinExpr& a, const LinExpr& b) {
    return a.c == b.c && a.coeff == b.coeff;
  }
};

inline std::string linexpr_to_string(const LinExpr& e) {
  std::string s = rat_to_string(e.c);
  for (const auto& [i, k] : e.coeff)
    s += " + " + rat_to_string(k) + "*q" + std::to_string(i);
  return s;
}

// e >= 0 or e == 0, with the reason it was emitted for Infeasible reports.
struct LinConstraint {
  enum class Kind { Geq0, Eq0 };
  Kind kind;
  LinExpr e;
  std::string why;
  SourceSpan span;
};

} // namespace sill
