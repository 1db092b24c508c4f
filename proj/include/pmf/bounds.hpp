#pragma once

#include <string>
#include <vector>

#include "pmf/constants.hpp"
#include "pmf/forecaster.hpp"

namespace pmf {

struct BoundTerm {
  std::string name;
  double value = 0.0;
};

struct BoundReport {
  std::vector<BoundTerm> terms;
  double total = 0.0;
};

// High-probability regret bound of the configured variant at confidence
// delta, term by term. Constants used: det-outcome K; rand-outcome the
// per-component L and K; rand-action-outcome the flattened L and K;
// det-action-outcome C (magnitude), params.k_scale in the eta term and K in
// the exploration term.
BoundReport theoretical_bound(const ForecasterParams& params, const GameSpec& game,
                              const GameConstants& constants, double delta);

// Per-block estimation error bounds at confidence delta.
// rand-outcome: sqrt(2 ln(2/delta) / m) for one P(S) component.
// rand-action-outcome: Freedman's d for the flattened vector.
double block_error_bound(const ForecasterParams& params, const GameSpec& game, double delta);

// sqrt(ln(2/delta) / (2n)): two-sided realized-vs-expected reward gap.
double azuma_gap_bound(std::size_t n, double delta);

}  // namespace pmf
