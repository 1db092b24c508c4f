#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "pmf/game.hpp"
#include "pmf/rho.hpp"

namespace pmf {

// Linear extension of Delta -> rho(p, Delta) from F to the whole signal
// space, for deterministic feedback. A vector x of dimension N*|S| is
// projected onto span{H(., j)} and written as sum_j c_j H(., j) with
// minimum-norm coordinates c; the extension is sum_j c_j rho(p, H(., delta_j)).
class LinearExtension {
 public:
  // Throws ConfigError for stochastic feedback and when rho is not
  // consistent along the null space of the column matrix (to 1e-7, checked
  // on sampled p).
  explicit LinearExtension(const GameSpec& game);

  const GameSpec& game() const { return *game_; }
  const OutcomeGrouping& grouping() const { return grouping_; }

  std::vector<double> coordinates(std::span<const double> x) const;
  // Orthogonal projection of x onto span{H(., j)}.
  std::vector<double> project(std::span<const double> x) const;

  double value(const MixedAction& p, std::span<const double> x) const;
  // sum_j c_j g_j with g_j the sub-gradient of rho(., H(., delta_j)) at p.
  // With use_lp the g_j come from the LP oracle rather than the grouping.
  Subgradient subgradient(const MixedAction& p, std::span<const double> x,
                          bool use_lp = false) const;
  // Same for the importance-weighted indicator e_action (x) delta_signal / weight.
  Subgradient indicator_subgradient(const MixedAction& p, std::size_t action,
                                    std::size_t signal, double weight,
                                    bool use_lp = false) const;

  // Largest |sum_j c_j rho(p, H(., delta_j))| seen over null-space directions
  // during construction.
  double consistency_residual() const { return consistency_residual_; }

 private:
  Subgradient combine(const MixedAction& p, const Eigen::VectorXd& c, bool use_lp) const;

  const GameSpec* game_;
  OutcomeGrouping grouping_;
  Eigen::MatrixXd columns_;  // (N*S) x M
  Eigen::MatrixXd pinv_;     // M x (N*S)
  double consistency_residual_ = 0.0;
};

double linear_extension_rho(const GameSpec& game, const MixedAction& p,
                            std::span<const double> x);
Subgradient linear_extension_subgradient(const GameSpec& game, const MixedAction& p,
                                         std::span<const double> x);

struct CConstants {
  // max over (i, j) of max_p of the extension at the projection of
  // e_i (x) delta_{h(i, j)}.
  double value = 0.0;
  // Same with |.|: the magnitude bound the estimator variance argument uses.
  double magnitude = 0.0;
  // Largest l1 norm of those coordinates; a cruder upper bound on both.
  double l1 = 0.0;
};

// Deterministic feedback only (ConfigError otherwise).
CConstants c_constant(const GameSpec& game);

}  // namespace pmf
