#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace pmf {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// All LP tolerances in one place.
struct LpTolerances {
  double feasibility = 1e-8;
  double optimality = 1e-9;
  double duality_gap = 1e-7;
  // Entries smaller than this are not used as pivots.
  double pivot = 1e-11;
};

enum class ConstraintSense { kLessEqual, kEqual, kGreaterEqual };
enum class LpDirection { kMinimize, kMaximize };
enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

// optimise  c.x  s.t.  a_k.x (<=|=|>=) b_k,  lower <= x <= upper.
// Variables default to [0, +inf).
struct LinearProgram {
  explicit LinearProgram(std::size_t num_vars,
                         LpDirection dir = LpDirection::kMinimize);

  void add_constraint(std::vector<double> coeffs, ConstraintSense sense,
                      double rhs);
  void set_bounds(std::size_t var, double lo, double hi);
  void set_free(std::size_t var) { set_bounds(var, -kInfinity, kInfinity); }

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_constraints() const { return rows.size(); }

  LpDirection direction;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::vector<double>> rows;
  std::vector<ConstraintSense> senses;
  std::vector<double> rhs;
};

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  double objective = 0.0;
  // Value of the Lagrangian dual at `dual`; equals `objective` at optimality.
  double dual_objective = 0.0;
  std::vector<double> primal;
  // One multiplier per constraint, with c - A^T y = reduced_costs.
  std::vector<double> dual;
  std::vector<double> reduced_costs;
  double primal_residual = 0.0;
  double complementarity_residual = 0.0;
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::kOptimal; }
  double duality_gap() const;
  // Primal feasibility, complementary slackness and strong duality all
  // within `tol`.
  bool certified(const LpTolerances& tol = {}) const;
};

// Dense two-phase tableau simplex with Bland's rule. Deterministic; never
// cycles. Infeasible and unbounded problems are statuses, not exceptions.
LpSolution solve_lp(const LinearProgram& lp, const LpTolerances& tol = {});

}  // namespace pmf
