#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "pmf/game.hpp"

namespace pmf {

// Margin added to the sampled sub-gradient spread.
inline constexpr double kSubgradientMargin = 0.05;

// `count` deterministic interior points of the (dim-1)-simplex from a Halton
// sequence (exponential spacings, normalised).
std::vector<std::vector<double>> simplex_samples(std::size_t dim, std::size_t count);

// Uniform Lipschitz constant of Delta -> rho(p, Delta) over F, w.r.t. the
// Euclidean norm of the flattened N*|S| vector, uniform in p. Computed from
// all bases of [H; 1^T]: each gives rho locally as y.[Delta; 1], and the
// bound is the largest norm of y restricted to the directions of F.
double lipschitz_bound(const GameSpec& game);

// Value of max 1.y s.t. [H(., j); 1].y <= 1 for all j, y >= 0, with
// components for never-emitted (action, signal) pairs dropped. Reported as
// a diagnostic; +inf when unbounded.
double lipschitz_lp_value(const GameSpec& game);

// Largest sub-gradient spread (max b - min b) over a deterministic sample of
// (p, Delta): vertices, the centre and 64 Halton points for p; feedback
// columns and 64 Halton mixtures for Delta.
double sampled_subgradient_spread(const GameSpec& game);

// min(1, sampled spread + kSubgradientMargin).
double subgradient_bound(const GameSpec& game);

struct GameConstants {
  double K_bound = 1.0;
  double K_sampled = 0.0;
  // Flattened-vector Lipschitz constant.
  double L_bound = 0.0;
  // Lipschitz constant w.r.t. one P(S) component; outcome-only games only
  // (then sqrt(N) * L_bound).
  std::optional<double> L_component;
  double L_lp_value = 0.0;
  // Deterministic feedback only.
  std::optional<double> C_bound;
  std::optional<double> C_magnitude;
  std::optional<double> C_l1;
};

GameConstants compute_constants(const GameSpec& game);

// A game together with its constants, computed once.
class GameHandle {
 public:
  explicit GameHandle(GameSpec game);
  const GameSpec& game() const { return *game_; }
  const GameConstants& constants() const { return constants_; }
  std::shared_ptr<const GameSpec> shared_game() const { return game_; }

 private:
  std::shared_ptr<const GameSpec> game_;
  GameConstants constants_;
};

}  // namespace pmf
