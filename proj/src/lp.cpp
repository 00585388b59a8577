#include "pact/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pact {

namespace {

constexpr double kTol = 1e-9;
constexpr int kMaxPivots = 50000;

struct VarMap {
  // x = shift + u[col_plus] - u[col_minus]; either col may be unused (npos).
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t col_plus = npos;
  std::size_t col_minus = npos;
  double shift = 0.0;
};

struct Tableau {
  std::vector<std::vector<double>> rows;  // each: coeffs over all cols + rhs
  std::vector<double> obj;                // reduced-cost row (min sense)
  std::vector<std::size_t> basis;         // basic column per row
  std::size_t cols = 0;

  double rhs(std::size_t i) const { return rows[i][cols]; }

  void pivot(std::size_t pr, std::size_t pc) {
    auto& prow = rows[pr];
    double pv = prow[pc];
    for (auto& v : prow) v /= pv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == pr) continue;
      double f = rows[i][pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols; ++j) rows[i][j] -= f * prow[j];
    }
    double f = obj[pc];
    if (f != 0.0)
      for (std::size_t j = 0; j <= cols; ++j) obj[j] -= f * prow[j];
    basis[pr] = pc;
  }

  // Bland: smallest column with negative reduced cost among allowed columns.
  std::size_t entering(std::size_t allowed_cols) const {
    for (std::size_t j = 0; j < allowed_cols; ++j)
      if (obj[j] < -kTol) return j;
    return cols;
  }

  // Min-ratio row; ties broken toward the smallest basic column index.
  std::size_t leaving(std::size_t pc) const {
    std::size_t best = rows.size();
    double best_ratio = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i][pc] <= kTol) continue;
      double ratio = rhs(i) / rows[i][pc];
      if (best == rows.size() || ratio < best_ratio - kTol ||
          (std::fabs(ratio - best_ratio) <= kTol && basis[i] < basis[best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.var_count();
  if (lp.lower.size() != n || lp.upper.size() != n)
    throw std::invalid_argument("solve_lp: bounds size mismatch");
  for (const auto& c : lp.constraints)
    if (c.coeffs.size() != n)
      throw std::invalid_argument("solve_lp: constraint size mismatch");

  LpSolution sol;
  for (std::size_t i = 0; i < n; ++i)
    if (lp.lower[i] > lp.upper[i] + kTol) return sol;  // infeasible

  // Shift/split variables so every tableau variable is >= 0.
  std::vector<VarMap> vmap(n);
  std::size_t ucols = 0;
  for (std::size_t i = 0; i < n; ++i) {
    bool lo_fin = std::isfinite(lp.lower[i]);
    bool hi_fin = std::isfinite(lp.upper[i]);
    if (lo_fin) {
      vmap[i].shift = lp.lower[i];
      vmap[i].col_plus = ucols++;
    } else if (hi_fin) {
      vmap[i].shift = lp.upper[i];
      vmap[i].col_minus = ucols++;
    } else {
      vmap[i].col_plus = ucols++;
      vmap[i].col_minus = ucols++;
    }
  }

  struct URow {
    std::vector<double> a;
    bool geq = false;  // after normalization every row is <= or >=
    double b = 0.0;
  };
  std::vector<URow> urows;
  auto to_u = [&](const std::vector<double>& coeffs, double rhs,
                  LinearProgram::Relation rel) {
    URow r;
    r.a.assign(ucols, 0.0);
    r.b = rhs;
    for (std::size_t i = 0; i < n; ++i) {
      double c = coeffs[i];
      if (c == 0.0) continue;
      r.b -= c * vmap[i].shift;
      if (vmap[i].col_plus != VarMap::npos) r.a[vmap[i].col_plus] += c;
      if (vmap[i].col_minus != VarMap::npos) r.a[vmap[i].col_minus] -= c;
    }
    r.geq = (rel == LinearProgram::Relation::greater_equal);
    urows.push_back(std::move(r));
  };

  for (const auto& c : lp.constraints) {
    if (c.rel == LinearProgram::Relation::equal) {
      // Equality rows enter as an opposing inequality pair.
      to_u(c.coeffs, c.rhs, LinearProgram::Relation::less_equal);
      to_u(c.coeffs, c.rhs, LinearProgram::Relation::greater_equal);
    } else {
      to_u(c.coeffs, c.rhs, c.rel);
    }
  }
  // Finite two-sided bounds add a row in u-space: u_i <= hi - lo (or hi
  // shifted from the other side for upper-bounded-only variables).
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isfinite(lp.lower[i]) && std::isfinite(lp.upper[i])) {
      URow r;
      r.a.assign(ucols, 0.0);
      r.a[vmap[i].col_plus] = 1.0;
      r.b = lp.upper[i] - lp.lower[i];
      r.geq = false;
      urows.push_back(std::move(r));
    }
  }

  // Normalize rhs >= 0 (flip row sense when negating).
  for (auto& r : urows) {
    if (r.b < 0.0) {
      for (auto& v : r.a) v = -v;
      r.b = -r.b;
      r.geq = !r.geq;
    }
  }

  const std::size_t m = urows.size();
  std::size_t n_slack = 0, n_art = 0;
  for (const auto& r : urows) (r.geq ? n_art : n_slack) += 1;
  // Columns: u vars, slacks (<= rows), surpluses (>= rows), artificials.
  const std::size_t surplus0 = ucols + n_slack;
  const std::size_t art0 = surplus0 + n_art;
  const std::size_t total = art0 + n_art;

  Tableau t;
  t.cols = total;
  t.rows.assign(m, std::vector<double>(total + 1, 0.0));
  t.basis.assign(m, 0);
  {
    std::size_t si = 0, gi = 0;
    for (std::size_t i = 0; i < m; ++i) {
      auto& row = t.rows[i];
      std::copy(urows[i].a.begin(), urows[i].a.end(), row.begin());
      row[total] = urows[i].b;
      if (urows[i].geq) {
        row[surplus0 + gi] = -1.0;
        row[art0 + gi] = 1.0;
        t.basis[i] = art0 + gi;
        ++gi;
      } else {
        row[ucols + si] = 1.0;
        t.basis[i] = ucols + si;
        ++si;
      }
    }
  }

  int pivots = 0;
  auto run_simplex = [&](std::size_t allowed_cols) -> bool {
    // Returns false when unbounded.
    while (true) {
      std::size_t pc = t.entering(allowed_cols);
      if (pc == t.cols) return true;
      std::size_t pr = t.leaving(pc);
      if (pr == t.rows.size()) return false;
      t.pivot(pr, pc);
      if (++pivots > kMaxPivots)
        throw std::runtime_error("solve_lp: iteration cap exceeded");
    }
  };

  // Phase 1: minimize artificial sum.
  t.obj.assign(total + 1, 0.0);
  for (std::size_t j = art0; j < total; ++j) t.obj[j] = 1.0;
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis[i] >= art0)
      for (std::size_t j = 0; j <= total; ++j) t.obj[j] -= t.rows[i][j];
  run_simplex(total);
  double art_sum = -t.obj[total];
  if (art_sum > kTol * (1.0 + std::fabs(art_sum))) return sol;  // infeasible

  // Drive leftover artificials out of the basis; drop rows that are fully
  // redundant.
  for (std::size_t i = 0; i < m; ++i) {
    if (t.basis[i] < art0) continue;
    std::size_t pc = total;
    for (std::size_t j = 0; j < art0; ++j)
      if (std::fabs(t.rows[i][j]) > kTol) {
        pc = j;
        break;
      }
    if (pc != total) t.pivot(i, pc);
  }
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < art0) keep.push_back(i);
  if (keep.size() != t.rows.size()) {
    std::vector<std::vector<double>> rows2;
    std::vector<std::size_t> basis2;
    for (std::size_t i : keep) {
      rows2.push_back(std::move(t.rows[i]));
      basis2.push_back(t.basis[i]);
    }
    t.rows = std::move(rows2);
    t.basis = std::move(basis2);
  }

  // Phase 2: original objective in min sense over non-artificial columns.
  const bool maximize = lp.sense == LinearProgram::Sense::maximize;
  std::vector<double> cost(art0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double c = maximize ? -lp.objective[i] : lp.objective[i];
    if (c == 0.0) continue;
    if (vmap[i].col_plus != VarMap::npos) cost[vmap[i].col_plus] += c;
    if (vmap[i].col_minus != VarMap::npos) cost[vmap[i].col_minus] -= c;
  }
  t.obj.assign(total + 1, 0.0);
  std::copy(cost.begin(), cost.end(), t.obj.begin());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    double cb = t.basis[i] < art0 ? cost[t.basis[i]] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t j = 0; j <= total; ++j) t.obj[j] -= cb * t.rows[i][j];
  }
  bool bounded = run_simplex(art0);
  sol.iterations = pivots;
  if (!bounded) {
    sol.status = LpStatus::unbounded;
    sol.value = maximize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
    return sol;
  }

  std::vector<double> u(art0, 0.0);
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    if (t.basis[i] < art0) u[t.basis[i]] = t.rhs(i);
  sol.x.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double v = vmap[i].shift;
    if (vmap[i].col_plus != VarMap::npos) v += u[vmap[i].col_plus];
    if (vmap[i].col_minus != VarMap::npos) v -= u[vmap[i].col_minus];
    sol.x[i] = v;
  }
  sol.value = 0.0;
  for (std::size_t i = 0; i < n; ++i) sol.value += lp.objective[i] * sol.x[i];

  double viol = 0.0;
  for (const auto& c : lp.constraints) {
    double lhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) lhs += c.coeffs[i] * sol.x[i];
    switch (c.rel) {
      case LinearProgram::Relation::less_equal:
        viol = std::max(viol, lhs - c.rhs);
        break;
      case LinearProgram::Relation::greater_equal:
        viol = std::max(viol, c.rhs - lhs);
        break;
      case LinearProgram::Relation::equal:
        viol = std::max(viol, std::fabs(lhs - c.rhs));
        break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    viol = std::max(viol, lp.lower[i] - sol.x[i]);
    viol = std::max(viol, sol.x[i] - lp.upper[i]);
  }
  sol.max_violation = std::max(viol, 0.0);
  sol.status = LpStatus::optimal;
  return sol;
}

}  // namespace pact
