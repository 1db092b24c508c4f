#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pmf/game.hpp"
#include "pmf/lp.hpp"

namespace pmf {

// Membership tolerance for Delta in F.
inline constexpr double kFeasibilityTolerance = 1e-7;

// A sub-gradient of the concave map p -> rho(p, Delta).
struct Subgradient {
  std::vector<double> direction;
  // Inner minimiser q* that generated `direction` (absent for the linear
  // extension, which combines several minimisers).
  std::optional<OutcomeDistribution> witness;
  // Bound on |direction_k| guaranteed for this call.
  double bound = 1.0;

  // max_k b_k - min_k b_k. Sub-gradients over the simplex are defined up to
  // adding a multiple of (1,...,1); this is the sup-norm of the
  // representative whose smallest component is zero.
  double spread() const;
  double sup_norm() const;
};

struct RhoSolution {
  double value = 0.0;
  OutcomeDistribution minimizer;
  LpSolution lp;
};

// rho(p, Delta) = min { r(p, q) : H(., q) = Delta }, solved as an LP over q.
// Throws InfeasibleSignalError when Delta is not in F (to 1e-7).
RhoSolution rho_solve(const GameSpec& game, const MixedAction& p,
                      const SignalDistVector& delta);
double rho(const GameSpec& game, const MixedAction& p, const SignalDistVector& delta);

// Danskin sub-gradient b_i = sum_j q*_j r(i, j) at the LP's optimal basic
// minimiser q*.
Subgradient rho_subgradient(const GameSpec& game, const MixedAction& p,
                            const SignalDistVector& delta);

// Value of the dual program max [Delta; 1].y s.t. [H(., j); 1].y <= r(p, j),
// with y free. Equals rho(p, Delta) on F by strong duality.
LpSolution rho_dual(const GameSpec& game, const MixedAction& p,
                    const SignalDistVector& delta);

struct MaxRho {
  double value = 0.0;
  MixedAction argmax;
};

// max_p rho(p, Delta) as one joint LP over (p, y) with the inner problem
// dualised.
MaxRho max_rho(const GameSpec& game, const SignalDistVector& delta);

// Whether Delta lies in F within `tol`.
bool is_feasible(const GameSpec& game, const SignalDistVector& delta,
                 double tol = kFeasibilityTolerance);

// Partition of outcomes by identical deterministic feedback columns.
class OutcomeGrouping {
 public:
  explicit OutcomeGrouping(const GameSpec& game);

  std::size_t num_classes() const { return classes_.size(); }
  const std::vector<std::vector<std::size_t>>& classes() const { return classes_; }
  std::size_t class_of(std::size_t outcome) const { return class_of_[outcome]; }

  // Per class, the outcome y minimising r(p, y); lowest index on ties.
  std::vector<std::size_t> representatives(std::span<const double> p) const;
  std::size_t representative(std::span<const double> p, std::size_t cls) const;

  // T(q): mass of each class moved onto its representative against p.
  std::vector<double> apply(std::span<const double> p, std::span<const double> q) const;

 private:
  const GameSpec* game_;
  std::vector<std::vector<std::size_t>> classes_;
  std::vector<std::size_t> class_of_;
};

// rho(p, H(., delta_j)) for deterministic feedback, evaluated through the
// grouping: the minimal reward over j's class, with the representative's
// reward column as sub-gradient.
struct VertexEvaluation {
  double value;
  std::size_t representative;
};
VertexEvaluation evaluate_vertex(const GameSpec& game, const OutcomeGrouping& grouping,
                                 std::span<const double> p, std::size_t outcome);

// Deterministic feedback whose distinct columns are affinely independent:
// H(., q) then determines the grouped distribution T(q), rho(p, .) is linear
// on F, and with distinct columns rho(p, H(., q)) = r(p, q).
bool signals_identify_classes(const GameSpec& game);

}  // namespace pmf
