#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pmf/bounds.hpp"
#include "pmf/constants.hpp"
#include "pmf/environment.hpp"
#include "pmf/forecaster.hpp"
#include "pmf/game.hpp"

namespace pmf {

struct EpisodeOptions {
  // Keep per-round actions, outcomes, signals and rewards.
  bool record_rounds = true;
  // Also keep p_t for every round (N doubles per round).
  bool record_distributions = false;
};

struct Transcript {
  std::string game;
  std::string forecaster;
  std::string environment;
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::optional<ForecasterParams> params;

  // Per-round columns (empty unless recorded).
  std::vector<std::uint32_t> actions;
  std::vector<std::uint32_t> outcomes;
  std::vector<std::uint32_t> signals;
  std::vector<double> rewards;
  std::vector<std::vector<double>> distributions;

  // Always kept.
  std::vector<std::size_t> outcome_counts;
  double total_reward = 0.0;
  double total_expected_reward = 0.0;
  std::size_t updates = 0;
  double max_subgradient_norm = 0.0;
  std::vector<BlockEstimate> blocks;

  bool has_rounds() const { return actions.size() == horizon; }
  // q_bar_n: normalised outcome counts. Error for an empty transcript.
  OutcomeDistribution empirical_outcomes() const;
};

// Runs n rounds of the protocol: the environment picks J_t, the forecaster
// picks p_t and draws I_t, the reward is recorded, and the signal
// s_t ~ H(I_t, J_t) is revealed to the forecaster.
Transcript run_episode(const GameSpec& game, Forecaster& forecaster, Environment& env,
                       std::size_t n, EpisodeStreams& streams, const EpisodeOptions& options = {});

// Builds the forecaster and environment from their descriptions and splits
// `seed` into the three streams.
Transcript run_episode(const GameSpec& game, const GameConstants& constants,
                       const ForecasterParams& params, const EnvironmentSpec& env,
                       std::uint64_t seed, const EpisodeOptions& options = {});

struct RegretReport {
  double benchmark = 0.0;
  std::vector<double> benchmark_argmax;
  double average_reward = 0.0;
  double average_expected_reward = 0.0;
  double regret = 0.0;
  double delta = 0.05;
  std::optional<BoundReport> bound;
};

// R_n = max_p rho(p, H(., q_bar_n)) - average realised reward. The bound is
// attached when the transcript carries forecaster parameters and constants
// are given.
RegretReport regret(const GameSpec& game, const Transcript& transcript,
                    const GameConstants* constants = nullptr, double delta = 0.05);

struct BlockDiagnostic {
  std::size_t block = 0;
  double raw_error = 0.0;
  double projected_error = 0.0;
};

struct EstimatorDiagnostics {
  double bound = 0.0;
  std::vector<BlockDiagnostic> blocks;
  std::size_t violations = 0;
  double violation_fraction = 0.0;
};

// Compares each block's estimate with the true Delta^b built from the
// recorded outcomes. rand-outcome errors are measured on one P(S)
// component, rand-action-outcome errors on the flattened vector.
EstimatorDiagnostics estimator_diagnostics(const GameSpec& game, const Transcript& transcript,
                                           double delta);

struct RateOptions {
  std::vector<std::size_t> horizons;
  std::size_t seeds = 20;
  double delta = 0.05;
  std::uint64_t base_seed = 1;
  std::size_t bootstrap = 200;
  std::uint64_t bootstrap_seed = 12345;
  ForecasterOverrides overrides;
  // Worker threads for the seed loop; results do not depend on it.
  std::size_t threads = 1;
};

struct RatePoint {
  std::size_t horizon = 0;
  double median_regret = 0.0;
  double bound = 0.0;
  std::vector<double> regrets;
};

struct RateReport {
  std::string forecaster;
  std::string environment;
  std::vector<RatePoint> points;
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double target = 0.0;
};

// Builds a fresh forecaster for horizon n.
using ForecasterFactory = std::function<std::unique_ptr<Forecaster>(std::size_t n)>;

// Median regret per horizon and the least-squares slope of log median vs
// log n, with a percentile bootstrap interval over seeds. Requires at least
// 4 horizons spanning 2 decades and at least 20 seeds.
RateReport rate_experiment(const GameSpec& game, const GameConstants& constants, Variant variant,
                           const EnvironmentSpec& env, const RateOptions& options);
RateReport rate_experiment(const GameSpec& game, const ForecasterFactory& factory,
                           std::string label, double target, const EnvironmentSpec& env,
                           const RateOptions& options);

// Least-squares slope of y on x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);
double median(std::vector<double> v);

// Runs fn(k) for k in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace pmf
