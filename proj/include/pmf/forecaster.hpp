#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pmf/constants.hpp"
#include "pmf/ewa.hpp"
#include "pmf/game.hpp"
#include "pmf/rng.hpp"

namespace pmf {

enum class Variant { kDetOutcome, kRandOutcome, kRandActionOutcome, kDetActionOutcome };

const char* to_string(Variant v);
// Accepts "det-outcome", "rand-outcome", "rand-action-outcome",
// "det-action-outcome"; ConfigError otherwise.
Variant parse_variant(std::string_view name);
bool is_blocked(Variant v);
bool is_mixed(Variant v);
// Exponent of n in the variant's regret rate.
double target_exponent(Variant v);

// ConfigError("variant/feedback mismatch: ...") when the variant's feedback
// assumptions do not hold for `game`.
void check_compatible(Variant v, const GameSpec& game);

// How sub-gradients at deterministic feedback vertices are obtained. kAuto
// reads them off the outcome grouping; kLp always solves the inner LP.
enum class SubgradientOracle { kAuto, kLp };

struct ForecasterOverrides {
  std::optional<double> eta;
  std::optional<std::size_t> block;
  std::optional<double> gamma;
};

struct ForecasterParams {
  Variant variant = Variant::kDetOutcome;
  std::size_t horizon = 1;
  double eta = 1.0;
  // Block length m; 0 for unblocked variants.
  std::size_t block = 0;
  // Exploration rate; 0 for unmixed variants.
  double gamma = 0.0;
  // Scale of the sub-gradients the default eta was tuned for.
  double k_scale = 1.0;
  SubgradientOracle oracle = SubgradientOracle::kAuto;

  // Defaults from n, N and the game constants, then `overrides`.
  static ForecasterParams defaults(Variant v, std::size_t horizon, const GameSpec& game,
                                   const GameConstants& constants,
                                   const ForecasterOverrides& overrides = {});
  // ConfigError on out-of-range values.
  void validate() const;
};

// Sub-gradient scale for the extended sub-gradients of det-action-outcome:
// N * C_l1 / sqrt(gamma), the root-mean-square bound on their size.
double extended_subgradient_scale(const GameSpec& game, const GameConstants& constants,
                                  double gamma);

struct BlockEstimate {
  std::size_t block = 0;
  std::vector<double> raw_mean;
  std::vector<double> projected;
  double distance = 0.0;
};

// Step-wise forecaster interface. Each round: next_distribution(), then
// observe(action, signal). The forecaster never sees outcomes.
class Forecaster {
 public:
  virtual ~Forecaster() = default;

  virtual MixedAction next_distribution() = 0;
  std::size_t draw_action(const MixedAction& p, Rng& rng) const {
    return rng.categorical(p.probs());
  }
  virtual void observe(std::size_t action, std::size_t signal) = 0;

  virtual std::string label() const = 0;
  virtual std::size_t updates() const { return 0; }
  virtual std::vector<double> log_weights() const { return {}; }
  const std::vector<BlockEstimate>& block_estimates() const { return blocks_; }
  // Largest sup-norm of a sub-gradient used so far.
  double max_subgradient_norm() const { return max_norm_; }

 protected:
  std::vector<BlockEstimate> blocks_;
  double max_norm_ = 0.0;
};

// The game must outlive the returned forecaster.
std::unique_ptr<Forecaster> make_forecaster(const GameSpec& game,
                                            const GameConstants& constants,
                                            const ForecasterParams& params);

// Plays the same mixed action every round and never learns.
class FixedForecaster : public Forecaster {
 public:
  explicit FixedForecaster(MixedAction p, std::string label = "fixed")
      : p_(std::move(p)), label_(std::move(label)) {}
  MixedAction next_distribution() override { return p_; }
  void observe(std::size_t, std::size_t) override {}
  std::string label() const override { return label_; }

 private:
  MixedAction p_;
  std::string label_;
};

}  // namespace pmf
