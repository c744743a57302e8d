#include "sill/simplex.hpp"

#include "sill/diagnostics.hpp"

namespace sill {

namespace {

// Dense tableau kept in B^-1 A form: pivoting updates rows in place, reduced
// costs are recomputed from the cost vector each iteration. Sizes here are
// small (tens of variables, hundreds of rows), so clarity wins over sparsity.
struct Tableau {
  int cols = 0;
  std::vector<std::vector<Rat>> a; // m x cols
  std::vector<Rat> b;              // m, kept nonnegative
  std::vector<int> basis;          // m, column basic in each row

  void pivot(int row, int col) {
    Rat piv = a[row][col];
    for (int j = 0; j < cols; ++j) a[row][j] /= piv;
    b[row] /= piv;
    for (size_t i = 0; i < a.size(); ++i) {
      if (static_cast<int>(i) == row) continue;
      Rat f = a[i][col];
      if (f == 0) continue;
      for (int j = 0; j < cols; ++j) a[i][j] -= f * a[row][j];
      b[i] -= f * b[row];
    }
    basis[row] = col;
  }

  // Minimises cost . x over the current feasible basis. Returns the optimum.
  Rat run(const std::vector<Rat>& cost) {
    const size_t kMaxIters = 200000;
    for (size_t iter = 0;; ++iter) {
      if (iter > kMaxIters)
        fail(Errc::Internal, "simplex failed to converge");
      // Reduced costs r_j = c_j - c_B . column_j; Bland: first negative.
      int enter = -1;
      for (int j = 0; j < cols && enter < 0; ++j) {
        Rat r = cost[j];
        for (size_t i = 0; i < a.size(); ++i)
          if (cost[basis[i]] != 0) r -= cost[basis[i]] * a[i][j];
        if (r < 0) enter = j;
      }
      if (enter < 0) break;
      // Ratio test; Bland: among ties, the row whose basic column is lowest.
      int leave = -1;
      Rat best;
      for (size_t i = 0; i < a.size(); ++i) {
        if (a[i][enter] <= 0) continue;
        Rat ratio = b[i] / a[i][enter];
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[i] < basis[leave]))
          best = ratio, leave = static_cast<int>(i);
      }
      if (leave < 0)
        fail(Errc::Internal, "simplex: objective unbounded below");
      pivot(leave, enter);
    }
    Rat obj = 0;
    for (size_t i = 0; i < a.size(); ++i)
      if (cost[basis[i]] != 0) obj += cost[basis[i]] * b[i];
    return obj;
  }
};

} // namespace

LpResult lp_solve(int num_vars, const std::vector<LinConstraint>& cons,
                  const std::vector<Rat>& objective) {
  if (static_cast<int>(objective.size()) != num_vars)
    fail(Errc::Internal, "lp_solve: objective size mismatch");
  for (const auto& c : cons)
    for (const auto& [site, coef] : c.e.coeff)
      if (site < 0 || site >= num_vars)
        fail(Errc::Internal, "lp_solve: constraint mentions unknown variable");

  // Assemble rows a.x (>=|=) rhs with rhs = -constant, then normalise to
  // equalities over [vars | slacks | artificials] with nonnegative rhs.
  struct Row {
    std::vector<Rat> a;
    Rat rhs;
    bool eq;
  };
  std::vector<Row> rows;
  for (const auto& c : cons) {
    Row r;
    r.a.assign(num_vars, 0);
    for (const auto& [site, coef] : c.e.coeff) r.a[site] = coef;
    r.rhs = -c.e.c;
    r.eq = c.kind == LinConstraint::Kind::Eq0;
    rows.push_back(std::move(r));
  }

  int num_slack = 0;
  for (const auto& r : rows)
    if (!r.eq) num_slack++;
  // Artificials are added per-row as needed below.
  Tableau t;
  std::vector<int> artificial_cols;
  int slack_at = num_vars;
  int art_at = num_vars + num_slack;
  t.cols = num_vars + num_slack;
  int next_slack = 0;

  std::vector<std::vector<Rat>> raw;
  std::vector<Rat> rhs;
  std::vector<int> art_rows;
  for (auto& r : rows) {
    std::vector<Rat> row(t.cols, 0);
    bool neg = r.rhs < 0;
    for (int j = 0; j < num_vars; ++j) row[j] = neg ? -r.a[j] : r.a[j];
    Rat b = neg ? -r.rhs : r.rhs;
    bool needs_art;
    if (r.eq) {
      needs_art = true;
    } else if (!neg) {
      // a.x >= rhs with rhs >= 0: surplus column, artificial to start.
      row[slack_at + next_slack++] = -1;
      needs_art = true;
    } else {
      // a.x >= rhs with rhs < 0 became -a.x <= -rhs: slack is basic.
      row[slack_at + next_slack++] = 1;
      needs_art = false;
    }
    raw.push_back(std::move(row));
    rhs.push_back(b);
    art_rows.push_back(needs_art ? 1 : 0);
  }

  int num_art = 0;
  for (int f : art_rows) num_art += f;
  t.cols = num_vars + num_slack + num_art;
  t.a.assign(raw.size(), {});
  t.b = rhs;
  t.basis.assign(raw.size(), -1);
  int next_art = 0;
  for (size_t i = 0; i < raw.size(); ++i) {
    raw[i].resize(t.cols, 0);
    if (art_rows[i]) {
      int col = art_at + next_art++;
      raw[i][col] = 1;
      t.basis[i] = col;
      artificial_cols.push_back(col);
    } else {
      // The slack introduced for this row is basic; find it.
      for (int j = slack_at; j < art_at; ++j)
        if (raw[i][j] == 1) {
          t.basis[i] = j;
          break;
        }
    }
    t.a[i] = std::move(raw[i]);
  }

  LpResult res;
  if (num_art > 0) {
    std::vector<Rat> phase1(t.cols, 0);
    for (int col : artificial_cols) phase1[col] = 1;
    Rat inf = t.run(phase1);
    if (inf != 0) {
      res.feasible = false;
      return res;
    }
    // Pivot any artificial still basic (at zero) out of the basis; a row
    // with no other nonzero column is redundant and can stay put since its
    // artificial is fixed at zero and never re-enters (cost below).
    for (size_t i = 0; i < t.a.size(); ++i) {
      if (t.basis[i] < art_at) continue;
      for (int j = 0; j < art_at; ++j)
        if (t.a[i][j] != 0) {
          t.pivot(static_cast<int>(i), j);
          break;
        }
    }
  }

  std::vector<Rat> phase2(t.cols, 0);
  for (int j = 0; j < num_vars; ++j) phase2[j] = objective[j];
  // Keep artificials out: a tiny positive cost would be inexact; instead
  // forbid them as entering columns by giving them cost high enough that
  // their reduced cost stays nonnegative. Since they are at zero and the
  // phase-1 optimum was zero, simply excluding them is equivalent: zero out
  // their columns so they can never improve the objective.
  for (int col : artificial_cols)
    for (size_t i = 0; i < t.a.size(); ++i)
      if (t.basis[i] != col) t.a[i][col] = 0;

  res.objective = t.run(phase2);
  res.feasible = true;
  res.x.assign(num_vars, 0);
  for (size_t i = 0; i < t.a.size(); ++i)
    if (t.basis[i] < num_vars) res.x[t.basis[i]] = t.b[i];
  return res;
}

} // namespace sill
