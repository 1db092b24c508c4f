#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pmf/errors.hpp"
#include "pmf/rng.hpp"

namespace pmf {

// Tolerance on probability sums accepted at the input boundary.
inline constexpr double kSimplexTolerance = 1e-9;

namespace detail {
std::vector<double> validate_simplex(std::vector<double> probs,
                                     std::string_view what);
}  // namespace detail

// A point of a probability simplex. Validated to kSimplexTolerance and then
// renormalised, so downstream code sees an exact simplex point.
template <typename Tag>
class SimplexPoint {
 public:
  explicit SimplexPoint(std::vector<double> probs)
      : probs_(detail::validate_simplex(std::move(probs), Tag::kName)) {}

  static SimplexPoint uniform(std::size_t n) {
    return SimplexPoint(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }
  static SimplexPoint point_mass(std::size_t n, std::size_t k) {
    std::vector<double> v(n, 0.0);
    v.at(k) = 1.0;
    return SimplexPoint(std::move(v));
  }

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t k) const { return probs_[k]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }

  friend bool operator==(const SimplexPoint&, const SimplexPoint&) = default;

 private:
  std::vector<double> probs_;
};

struct MixedActionTag {
  static constexpr const char* kName = "mixed action";
};
struct OutcomeDistributionTag {
  static constexpr const char* kName = "outcome distribution";
};

// Distribution p over the forecaster's N actions.
using MixedAction = SimplexPoint<MixedActionTag>;
// Distribution q over the environment's M outcomes.
using OutcomeDistribution = SimplexPoint<OutcomeDistributionTag>;

// H(i, j) for every action/outcome pair, stored as one N x M x S tensor of
// point masses or general distributions.
class FeedbackKernel {
 public:
  FeedbackKernel() = default;
  // `table` is row-major N x M x S. Every cell must be a probability vector
  // within kSimplexTolerance; cells are renormalised.
  FeedbackKernel(std::size_t n_actions, std::size_t n_outcomes,
                 std::size_t n_signals, std::vector<double> table);

  double prob(std::size_t i, std::size_t j, std::size_t s) const {
    return table_[(i * n_outcomes_ + j) * n_signals_ + s];
  }
  std::span<const double> cell(std::size_t i, std::size_t j) const {
    return {table_.data() + (i * n_outcomes_ + j) * n_signals_, n_signals_};
  }
  std::span<const double> table() const { return table_; }

  bool is_deterministic() const { return deterministic_; }
  bool is_outcome_only() const { return outcome_only_; }
  // Signal index h(i, j); only meaningful for deterministic kernels.
  std::size_t signal_of(std::size_t i, std::size_t j) const {
    return point_signal_[i * n_outcomes_ + j];
  }

  std::size_t n_actions() const { return n_actions_; }
  std::size_t n_outcomes() const { return n_outcomes_; }
  std::size_t n_signals() const { return n_signals_; }

 private:
  std::size_t n_actions_ = 0;
  std::size_t n_outcomes_ = 0;
  std::size_t n_signals_ = 0;
  std::vector<double> table_;
  std::vector<std::uint32_t> point_signal_;
  bool deterministic_ = false;
  bool outcome_only_ = false;
};

// Per-action distributions over signals; a point of P(S)^N viewed as a flat
// vector of dimension N * S (action-major).
class SignalDistVector {
 public:
  SignalDistVector(std::size_t n_components, std::size_t n_signals,
                   std::vector<double> flat);

  // Builds a vector whose N components all equal `component`.
  static SignalDistVector replicated(std::size_t n_components,
                                     std::span<const double> component);

  std::size_t n_components() const { return n_components_; }
  std::size_t n_signals() const { return n_signals_; }
  std::span<const double> component(std::size_t i) const {
    return {flat_.data() + i * n_signals_, n_signals_};
  }
  std::span<const double> flat() const { return flat_; }
  double operator()(std::size_t i, std::size_t s) const {
    return flat_[i * n_signals_ + s];
  }

 private:
  std::size_t n_components_;
  std::size_t n_signals_;
  std::vector<double> flat_;
};

// One partial-monitoring game: rewards r(i, j) in [0, 1] and feedback H.
// Immutable after construction.
class GameSpec {
 public:
  // `rewards` is row-major N x M.
  GameSpec(std::string name, std::vector<std::string> signals,
           std::size_t n_actions, std::size_t n_outcomes,
           std::vector<double> rewards, FeedbackKernel feedback);

  const std::string& name() const { return name_; }
  std::size_t n_actions() const { return n_actions_; }
  std::size_t n_outcomes() const { return n_outcomes_; }
  std::size_t n_signals() const { return signals_.size(); }
  const std::vector<std::string>& signals() const { return signals_; }
  const FeedbackKernel& feedback() const { return feedback_; }

  double reward(std::size_t i, std::size_t j) const {
    return rewards_[i * n_outcomes_ + j];
  }
  std::span<const double> rewards() const { return rewards_; }
  // r(p, j) = sum_i p_i r(i, j).
  double reward(std::span<const double> p, std::size_t j) const;
  // The column of r(., .) for outcome j.
  std::vector<double> reward_column(std::size_t j) const;

  // Flattened H(., j): the N*S vector of per-action signal distributions.
  std::vector<double> feedback_column(std::size_t j) const;

  // Signal index of a name, or throws ValidationError.
  std::size_t signal_index(std::string_view name) const;

 private:
  std::string name_;
  std::vector<std::string> signals_;
  std::size_t n_actions_;
  std::size_t n_outcomes_;
  std::vector<double> rewards_;
  FeedbackKernel feedback_;
};

// Parses the JSON game format. Classification flags are recomputed from the
// expanded table.
GameSpec parse_game(std::string_view text);
GameSpec load_game(const std::string& path);

// H(., q) = sum_j q_j H(., j).
SignalDistVector signal_dist(const GameSpec& game, const OutcomeDistribution& q);

// H(., delta_j): the feedback column of a single outcome.
SignalDistVector signal_column(const GameSpec& game, std::size_t j);

// Draws s ~ H(i, j).
std::size_t draw_signal(const GameSpec& game, std::size_t i, std::size_t j,
                        Rng& rng);

// True when no two outcomes share a deterministic feedback column.
bool has_distinct_columns(const GameSpec& game);

}  // namespace pmf
