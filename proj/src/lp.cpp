#include "pmf/lp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmf {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "unknown";
}

LinearProgram::LinearProgram(std::size_t num_vars, LpDirection dir)
    : direction(dir),
      objective(num_vars, 0.0),
      lower(num_vars, 0.0),
      upper(num_vars, kInfinity) {}

void LinearProgram::add_constraint(std::vector<double> coeffs,
                                   ConstraintSense sense, double b) {
  if (coeffs.size() != num_vars()) {
    throw std::invalid_argument("LinearProgram: constraint has wrong length");
  }
  rows.push_back(std::move(coeffs));
  senses.push_back(sense);
  rhs.push_back(b);
}

void LinearProgram::set_bounds(std::size_t var, double lo, double hi) {
  lower.at(var) = lo;
  upper.at(var) = hi;
}

double LpSolution::duality_gap() const {
  return std::abs(objective - dual_objective);
}

bool LpSolution::certified(const LpTolerances& tol) const {
  return optimal() && primal_residual <= tol.feasibility &&
         complementarity_residual <= tol.duality_gap &&
         duality_gap() <= tol.duality_gap;
}

namespace {

// Original variable x_j = offset + sum(coef * x'_col) over its columns.
struct VarMap {
  double offset = 0.0;
  std::size_t col = 0;
  double coef = 1.0;
  // Second column of a free variable (coefficient -1), or npos.
  std::size_t neg_col = static_cast<std::size_t>(-1);
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * (cols + 1), 0.0),
        cost_row_(cols + 1, 0.0), basis_(rows, kNone) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double rhs(std::size_t r) const { return at(r, cols_); }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::vector<std::size_t>& basis() { return basis_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  // Reduced costs d_j = c_j - c_B B^-1 A_j for the given cost vector.
  void price(const std::vector<double>& cost) {
    for (std::size_t c = 0; c <= cols_; ++c) {
      cost_row_[c] = c < cols_ ? cost[c] : 0.0;
    }
    for (std::size_t r = 0; r < rows_; ++r) {
      const double cb = cost[basis_[r]];
      if (cb == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) cost_row_[c] -= cb * at(r, c);
    }
  }
  double reduced_cost(std::size_t c) const { return cost_row_[c]; }
  // Objective value c_B B^-1 b.
  double value() const { return -cost_row_[cols_]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double piv = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= piv;
    at(pr, pc) = 1.0;
    for (std::size_t r = 0; r < rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    const double f = cost_row_[pc];
    if (f != 0.0) {
      for (std::size_t c = 0; c <= cols_; ++c) cost_row_[c] -= f * at(pr, c);
      cost_row_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  std::vector<double> cost_row_;
  std::vector<std::size_t> basis_;
};

enum class PhaseResult { kOptimal, kUnbounded };

// Bland's rule: lowest-index improving column enters; among tied ratios the
// lowest-index basic variable leaves.
PhaseResult run_simplex(Tableau& t, const std::vector<bool>& eligible,
                        const LpTolerances& tol, std::size_t& iterations,
                        std::size_t iteration_limit) {
  while (true) {
    std::size_t enter = kNone;
    for (std::size_t c = 0; c < t.cols(); ++c) {
      if (eligible[c] && t.reduced_cost(c) < -tol.optimality) {
        enter = c;
        break;
      }
    }
    if (enter == kNone) return PhaseResult::kOptimal;

    std::size_t leave = kNone;
    double best = kInfinity;
    for (std::size_t r = 0; r < t.rows(); ++r) {
      const double a = t.at(r, enter);
      if (a <= tol.pivot) continue;
      const double ratio = std::max(t.rhs(r), 0.0) / a;
      if (leave == kNone || ratio < best - 1e-12 * (1.0 + std::abs(best))) {
        best = ratio;
        leave = r;
      } else if (std::abs(ratio - best) <= 1e-12 * (1.0 + std::abs(best)) &&
                 t.basis()[r] < t.basis()[leave]) {
        leave = r;
      }
    }
    if (leave == kNone) return PhaseResult::kUnbounded;
    t.pivot(leave, enter);
    if (++iterations > iteration_limit) {
      throw std::runtime_error("simplex: iteration limit exceeded");
    }
  }
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol) {
  const std::size_t n = lp.num_vars();
  const std::size_t m0 = lp.num_constraints();
  for (double c : lp.objective) {
    if (!std::isfinite(c)) throw std::invalid_argument("LinearProgram: non-finite objective");
  }
  if (lp.senses.size() != m0 || lp.rhs.size() != m0 || lp.lower.size() != n ||
      lp.upper.size() != n) {
    throw std::invalid_argument("LinearProgram: inconsistent dimensions");
  }

  LpSolution sol;
  const double sign = lp.direction == LpDirection::kMaximize ? -1.0 : 1.0;

  // Shift/split variables so every standard-form column is >= 0.
  std::vector<VarMap> vars(n);
  std::size_t ncols = 0;
  struct BoundRow {
    std::size_t col;
    double width;
  };
  std::vector<BoundRow> bound_rows;
  for (std::size_t j = 0; j < n; ++j) {
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo > hi) return sol;  // trivially infeasible
    if (std::isfinite(lo)) {
      vars[j] = {lo, ncols++, 1.0, kNone};
      if (std::isfinite(hi)) bound_rows.push_back({vars[j].col, hi - lo});
    } else if (std::isfinite(hi)) {
      vars[j] = {hi, ncols++, -1.0, kNone};
    } else {
      vars[j] = {0.0, ncols, 1.0, ncols + 1};
      ncols += 2;
    }
  }
  const std::size_t nstruct = ncols;
  const std::size_t m = m0 + bound_rows.size();

  // Standard-form rows over the structural columns.
  std::vector<std::vector<double>> a(m, std::vector<double>(nstruct, 0.0));
  std::vector<double> b(m, 0.0);
  std::vector<ConstraintSense> sense(m, ConstraintSense::kLessEqual);
  for (std::size_t r = 0; r < m0; ++r) {
    if (lp.rows[r].size() != n) throw std::invalid_argument("LinearProgram: ragged row");
    double shift = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double coef = lp.rows[r][j];
      if (coef == 0.0) continue;
      shift += coef * vars[j].offset;
      a[r][vars[j].col] += coef * vars[j].coef;
      if (vars[j].neg_col != kNone) a[r][vars[j].neg_col] -= coef;
    }
    b[r] = lp.rhs[r] - shift;
    sense[r] = lp.senses[r];
  }
  for (std::size_t k = 0; k < bound_rows.size(); ++k) {
    a[m0 + k][bound_rows[k].col] = 1.0;
    b[m0 + k] = bound_rows[k].width;
  }
  std::vector<double> row_sign(m, 1.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (b[r] < 0.0) {
      row_sign[r] = -1.0;
      b[r] = -b[r];
      for (double& v : a[r]) v = -v;
      if (sense[r] == ConstraintSense::kLessEqual) {
        sense[r] = ConstraintSense::kGreaterEqual;
      } else if (sense[r] == ConstraintSense::kGreaterEqual) {
        sense[r] = ConstraintSense::kLessEqual;
      }
    }
  }

  // Slack, surplus and artificial columns. Each row owns one identity column
  // (slack or artificial) that starts in the basis.
  std::vector<std::size_t> identity_col(m);
  std::vector<std::size_t> surplus_col(m, kNone);
  std::size_t total = nstruct;
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] == ConstraintSense::kGreaterEqual) surplus_col[r] = total++;
    identity_col[r] = total++;
  }
  std::vector<bool> artificial(total, false);
  for (std::size_t r = 0; r < m; ++r) {
    if (sense[r] != ConstraintSense::kLessEqual) artificial[identity_col[r]] = true;
  }

  Tableau t(m, total);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t c = 0; c < nstruct; ++c) t.at(r, c) = a[r][c];
    if (surplus_col[r] != kNone) t.at(r, surplus_col[r]) = -1.0;
    t.at(r, identity_col[r]) = 1.0;
    t.rhs(r) = b[r];
    t.basis()[r] = identity_col[r];
  }

  std::vector<double> cost(total, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double c = sign * lp.objective[j];
    cost[vars[j].col] += c * vars[j].coef;
    if (vars[j].neg_col != kNone) cost[vars[j].neg_col] -= c;
  }
  std::vector<bool> eligible(total);
  for (std::size_t c = 0; c < total; ++c) eligible[c] = !artificial[c];

  const std::size_t limit = 1000 + 50 * (m + total);
  std::size_t iterations = 0;

  // Phase 1: minimise the sum of artificials.
  const bool any_artificial = std::find(artificial.begin(), artificial.end(), true) != artificial.end();
  if (any_artificial) {
    std::vector<double> phase1(total, 0.0);
    for (std::size_t c = 0; c < total; ++c) phase1[c] = artificial[c] ? 1.0 : 0.0;
    t.price(phase1);
    run_simplex(t, eligible, tol, iterations, limit);
    double worst = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (artificial[t.basis()[r]]) worst = std::max(worst, t.rhs(r));
    }
    if (worst > tol.feasibility) {
      sol.status = LpStatus::kInfeasible;
      sol.iterations = iterations;
      return sol;
    }
    // Snap residual artificials to zero and drive them out where the row
    // still has a usable structural entry; rows left with an artificial are
    // redundant.
    for (std::size_t r = 0; r < m; ++r) {
      if (!artificial[t.basis()[r]]) continue;
      t.rhs(r) = 0.0;
      std::size_t best = kNone;
      double best_abs = 1e-9;
      for (std::size_t c = 0; c < total; ++c) {
        if (artificial[c]) continue;
        const double v = std::abs(t.at(r, c));
        if (v > best_abs) {
          best_abs = v;
          best = c;
        }
      }
      if (best != kNone) t.pivot(r, best);
    }
  }

  // Phase 2.
  t.price(cost);
  if (run_simplex(t, eligible, tol, iterations, limit) == PhaseResult::kUnbounded) {
    sol.status = LpStatus::kUnbounded;
    sol.iterations = iterations;
    return sol;
  }
  sol.status = LpStatus::kOptimal;
  sol.iterations = iterations;

  std::vector<double> xs(total, 0.0);
  for (std::size_t r = 0; r < m; ++r) xs[t.basis()[r]] = std::max(t.rhs(r), 0.0);

  sol.primal.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = vars[j].offset + vars[j].coef * xs[vars[j].col];
    if (vars[j].neg_col != kNone) v -= xs[vars[j].neg_col];
    sol.primal[j] = v;
  }

  // Duals of the standard-form rows: y_r = c_B . (B^-1 e_r), read from the
  // identity columns. Map back to the caller's sign convention.
  sol.dual.assign(m0, 0.0);
  for (std::size_t r = 0; r < m0; ++r) {
    double y = 0.0;
    for (std::size_t k = 0; k < m; ++k) y += cost[t.basis()[k]] * t.at(k, identity_col[r]);
    sol.dual[r] = sign * row_sign[r] * y;
  }

  // Certificates in the original variables.
  double obj = 0.0;
  for (std::size_t j = 0; j < n; ++j) obj += lp.objective[j] * sol.primal[j];
  sol.objective = obj;

  sol.reduced_costs.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = lp.objective[j];
    for (std::size_t r = 0; r < m0; ++r) d -= lp.rows[r][j] * sol.dual[r];
    sol.reduced_costs[j] = d;
  }

  double dual_obj = 0.0;
  for (std::size_t r = 0; r < m0; ++r) dual_obj += sol.dual[r] * lp.rhs[r];
  double comp = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = sol.reduced_costs[j];
    const double x = sol.primal[j];
    // Minimisation wants d >= 0 at a lower bound and d <= 0 at an upper bound.
    const double dm = sign * d;
    double term;
    if (std::abs(d) <= tol.optimality) {
      term = d * x;
    } else if (dm > 0.0) {
      term = std::isfinite(lp.lower[j]) ? d * lp.lower[j] : -sign * kInfinity;
    } else {
      term = std::isfinite(lp.upper[j]) ? d * lp.upper[j] : -sign * kInfinity;
    }
    dual_obj += term;
    double dist = kInfinity;
    if (std::isfinite(lp.lower[j])) dist = std::min(dist, std::abs(x - lp.lower[j]));
    if (std::isfinite(lp.upper[j])) dist = std::min(dist, std::abs(x - lp.upper[j]));
    comp = std::max(comp, std::isfinite(dist) ? std::abs(d) * dist : std::abs(d));
  }
  sol.dual_objective = dual_obj;

  double resid = 0.0;
  for (std::size_t r = 0; r < m0; ++r) {
    double ax = 0.0;
    for (std::size_t j = 0; j < n; ++j) ax += lp.rows[r][j] * sol.primal[j];
    const double gap = ax - lp.rhs[r];
    double viol = 0.0;
    switch (lp.senses[r]) {
      case ConstraintSense::kLessEqual:
        viol = std::max(gap, 0.0);
        break;
      case ConstraintSense::kGreaterEqual:
        viol = std::max(-gap, 0.0);
        break;
      case ConstraintSense::kEqual:
        viol = std::abs(gap);
        break;
    }
    resid = std::max(resid, viol);
    comp = std::max(comp, std::abs(sol.dual[r]) * std::abs(gap));
  }
  for (std::size_t j = 0; j < n; ++j) {
    resid = std::max(resid, lp.lower[j] - sol.primal[j]);
    resid = std::max(resid, sol.primal[j] - lp.upper[j]);
  }
  sol.primal_residual = resid;
  sol.complementarity_residual = comp;
  return sol;
}

}  // namespace pmf
