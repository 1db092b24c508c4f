#include "pmf/rho.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

namespace pmf {

namespace {

// The equality system H(., q) = Delta with duplicate and all-zero rows
// removed. Removed rows are checked against Delta directly.
struct SignalSystem {
  std::vector<std::vector<double>> rows;  // each of length M
  std::vector<double> rhs;
  double inconsistency = 0.0;  // largest violation among removed rows
};

SignalSystem reduce_system(const GameSpec& game, const SignalDistVector& delta) {
  const std::size_t n = game.n_actions();
  const std::size_t m = game.n_outcomes();
  const std::size_t ns = game.n_signals();
  if (delta.n_components() != n || delta.n_signals() != ns) {
    throw ValidationError("signal distribution vector: dimension mismatch");
  }
  SignalSystem sys;
  const auto& kernel = game.feedback();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < ns; ++s) {
      std::vector<double> row(m);
      bool zero = true;
      for (std::size_t j = 0; j < m; ++j) {
        row[j] = kernel.prob(i, j, s);
        if (row[j] != 0.0) zero = false;
      }
      const double b = delta(i, s);
      if (zero) {
        sys.inconsistency = std::max(sys.inconsistency, std::abs(b));
        continue;
      }
      auto it = std::find(sys.rows.begin(), sys.rows.end(), row);
      if (it != sys.rows.end()) {
        const auto k = static_cast<std::size_t>(it - sys.rows.begin());
        sys.inconsistency = std::max(sys.inconsistency, std::abs(b - sys.rhs[k]));
        continue;
      }
      sys.rows.push_back(std::move(row));
      sys.rhs.push_back(b);
    }
  }
  return sys;
}

LpTolerances rho_tolerances() {
  LpTolerances tol;
  tol.feasibility = kFeasibilityTolerance;
  return tol;
}

// min_q sum_j q_j c_j  s.t.  sys, q in the simplex.
LpSolution solve_inner(const SignalSystem& sys, const std::vector<double>& cost,
                       const LpTolerances& tol) {
  const std::size_t m = cost.size();
  LinearProgram lp(m, LpDirection::kMinimize);
  lp.objective = cost;
  lp.add_constraint(std::vector<double>(m, 1.0), ConstraintSense::kEqual, 1.0);
  for (std::size_t u = 0; u < sys.rows.size(); ++u) {
    lp.add_constraint(sys.rows[u], ConstraintSense::kEqual, sys.rhs[u]);
  }
  return solve_lp(lp, tol);
}

std::vector<double> reward_profile(const GameSpec& game, std::span<const double> p) {
  std::vector<double> cost(game.n_outcomes());
  for (std::size_t j = 0; j < cost.size(); ++j) cost[j] = game.reward(p, j);
  return cost;
}

[[noreturn]] void throw_infeasible() {
  throw InfeasibleSignalError("signal distribution vector is not in the feasible set");
}

OutcomeDistribution clean_distribution(const std::vector<double>& q) {
  std::vector<double> v(q.size());
  double s = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    v[j] = std::max(0.0, q[j]);
    s += v[j];
  }
  for (double& x : v) x /= s;
  return OutcomeDistribution(std::move(v));
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

}  // namespace

double Subgradient::spread() const {
  if (direction.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(direction.begin(), direction.end());
  return *hi - *lo;
}

double Subgradient::sup_norm() const {
  double v = 0.0;
  for (double x : direction) v = std::max(v, std::abs(x));
  return v;
}

RhoSolution rho_solve(const GameSpec& game, const MixedAction& p,
                      const SignalDistVector& delta) {
  if (p.size() != game.n_actions()) {
    throw ValidationError("mixed action: dimension mismatch");
  }
  const SignalSystem sys = reduce_system(game, delta);
  if (sys.inconsistency > kFeasibilityTolerance) throw_infeasible();
  LpSolution lp = solve_inner(sys, reward_profile(game, p.probs()), rho_tolerances());
  if (lp.status != LpStatus::kOptimal) throw_infeasible();
  RhoSolution out{clamp01(lp.objective), clean_distribution(lp.primal), std::move(lp)};
  return out;
}

double rho(const GameSpec& game, const MixedAction& p, const SignalDistVector& delta) {
  return rho_solve(game, p, delta).value;
}

Subgradient rho_subgradient(const GameSpec& game, const MixedAction& p,
                            const SignalDistVector& delta) {
  RhoSolution sol = rho_solve(game, p, delta);
  Subgradient g;
  g.direction.assign(game.n_actions(), 0.0);
  const auto q = sol.minimizer.probs();
  for (std::size_t i = 0; i < game.n_actions(); ++i) {
    double b = 0.0;
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) b += q[j] * game.reward(i, j);
    g.direction[i] = b;
  }
  g.witness = std::move(sol.minimizer);
  g.bound = 1.0;
  return g;
}

bool is_feasible(const GameSpec& game, const SignalDistVector& delta, double tol) {
  const SignalSystem sys = reduce_system(game, delta);
  if (sys.inconsistency > tol) return false;
  LpTolerances t;
  t.feasibility = tol;
  const LpSolution lp =
      solve_inner(sys, std::vector<double>(game.n_outcomes(), 0.0), t);
  return lp.status == LpStatus::kOptimal;
}

LpSolution rho_dual(const GameSpec& game, const MixedAction& p,
                    const SignalDistVector& delta) {
  const SignalSystem sys = reduce_system(game, delta);
  if (sys.inconsistency > kFeasibilityTolerance || !is_feasible(game, delta)) {
    throw_infeasible();
  }
  const std::size_t u = sys.rows.size();
  const std::size_t m = game.n_outcomes();
  LinearProgram lp(u + 1, LpDirection::kMaximize);
  for (std::size_t k = 0; k < u; ++k) {
    lp.objective[k] = sys.rhs[k];
    lp.set_free(k);
  }
  lp.objective[u] = 1.0;
  lp.set_free(u);
  const std::vector<double> cost = reward_profile(game, p.probs());
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(u + 1, 1.0);
    for (std::size_t k = 0; k < u; ++k) row[k] = sys.rows[k][j];
    lp.add_constraint(std::move(row), ConstraintSense::kLessEqual, cost[j]);
  }
  return solve_lp(lp);
}

MaxRho max_rho(const GameSpec& game, const SignalDistVector& delta) {
  const SignalSystem sys = reduce_system(game, delta);
  if (sys.inconsistency > kFeasibilityTolerance || !is_feasible(game, delta)) {
    throw_infeasible();
  }
  const std::size_t n = game.n_actions();
  const std::size_t m = game.n_outcomes();
  const std::size_t u = sys.rows.size();
  // Variables: p (n), y (u, free), y0 (free).
  LinearProgram lp(n + u + 1, LpDirection::kMaximize);
  for (std::size_t k = 0; k < u; ++k) {
    lp.objective[n + k] = sys.rhs[k];
    lp.set_free(n + k);
  }
  lp.objective[n + u] = 1.0;
  lp.set_free(n + u);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(n + u + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) row[i] = -game.reward(i, j);
    for (std::size_t k = 0; k < u; ++k) row[n + k] = sys.rows[k][j];
    row[n + u] = 1.0;
    lp.add_constraint(std::move(row), ConstraintSense::kLessEqual, 0.0);
  }
  std::vector<double> simplex(n + u + 1, 0.0);
  std::fill(simplex.begin(), simplex.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
  lp.add_constraint(std::move(simplex), ConstraintSense::kEqual, 1.0);

  const LpSolution sol = solve_lp(lp, rho_tolerances());
  if (sol.status != LpStatus::kOptimal) {
    throw Error(std::string("max_rho: joint LP ") + to_string(sol.status));
  }
  std::vector<double> p(sol.primal.begin(), sol.primal.begin() + static_cast<std::ptrdiff_t>(n));
  double s = 0.0;
  for (double& x : p) {
    x = std::max(0.0, x);
    s += x;
  }
  for (double& x : p) x /= s;
  return MaxRho{clamp01(sol.objective), MixedAction(std::move(p))};
}

OutcomeGrouping::OutcomeGrouping(const GameSpec& game) : game_(&game) {
  const auto& kernel = game.feedback();
  if (!kernel.is_deterministic()) {
    throw ConfigError("outcome grouping requires deterministic feedback");
  }
  const std::size_t n = game.n_actions();
  const std::size_t m = game.n_outcomes();
  class_of_.assign(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    bool placed = false;
    for (std::size_t k = 0; k < classes_.size() && !placed; ++k) {
      const std::size_t head = classes_[k].front();
      bool same = true;
      for (std::size_t i = 0; i < n && same; ++i) {
        same = kernel.signal_of(i, j) == kernel.signal_of(i, head);
      }
      if (same) {
        classes_[k].push_back(j);
        class_of_[j] = k;
        placed = true;
      }
    }
    if (!placed) {
      class_of_[j] = classes_.size();
      classes_.push_back({j});
    }
  }
}

std::size_t OutcomeGrouping::representative(std::span<const double> p,
                                            std::size_t cls) const {
  const auto& members = classes_.at(cls);
  std::size_t best = members.front();
  double best_r = game_->reward(p, best);
  for (std::size_t a = 1; a < members.size(); ++a) {
    const double r = game_->reward(p, members[a]);
    if (r < best_r) {
      best_r = r;
      best = members[a];
    }
  }
  return best;
}

std::vector<std::size_t> OutcomeGrouping::representatives(std::span<const double> p) const {
  std::vector<std::size_t> reps(classes_.size());
  for (std::size_t k = 0; k < classes_.size(); ++k) reps[k] = representative(p, k);
  return reps;
}

std::vector<double> OutcomeGrouping::apply(std::span<const double> p,
                                           std::span<const double> q) const {
  std::vector<double> out(q.size(), 0.0);
  for (std::size_t k = 0; k < classes_.size(); ++k) {
    double mass = 0.0;
    for (std::size_t j : classes_[k]) mass += q[j];
    out[representative(p, k)] += mass;
  }
  return out;
}

VertexEvaluation evaluate_vertex(const GameSpec& game, const OutcomeGrouping& grouping,
                                 std::span<const double> p, std::size_t outcome) {
  const std::size_t rep = grouping.representative(p, grouping.class_of(outcome));
  return VertexEvaluation{game.reward(p, rep), rep};
}

bool signals_identify_classes(const GameSpec& game) {
  if (!game.feedback().is_deterministic()) return false;
  const OutcomeGrouping grouping(game);
  const auto dim = static_cast<Eigen::Index>(game.n_actions() * game.n_signals());
  Eigen::MatrixXd a(dim + 1, static_cast<Eigen::Index>(grouping.num_classes()));
  for (std::size_t k = 0; k < grouping.num_classes(); ++k) {
    const auto col = game.feedback_column(grouping.classes()[k].front());
    const auto c = static_cast<Eigen::Index>(k);
    for (Eigen::Index r = 0; r < dim; ++r) a(r, c) = col[static_cast<std::size_t>(r)];
    a(dim, c) = 1.0;
  }
  return Eigen::FullPivLU<Eigen::MatrixXd>(a).rank() == a.cols();
}

}  // namespace pmf
