#include "pmf/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmf/extension.hpp"
#include "pmf/hull.hpp"
#include "pmf/rho.hpp"

namespace pmf {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::kDetOutcome:
      return "det-outcome";
    case Variant::kRandOutcome:
      return "rand-outcome";
    case Variant::kRandActionOutcome:
      return "rand-action-outcome";
    case Variant::kDetActionOutcome:
      return "det-action-outcome";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::kDetOutcome, Variant::kRandOutcome, Variant::kRandActionOutcome,
                    Variant::kDetActionOutcome}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

bool is_blocked(Variant v) {
  return v == Variant::kRandOutcome || v == Variant::kRandActionOutcome;
}

bool is_mixed(Variant v) {
  return v == Variant::kRandActionOutcome || v == Variant::kDetActionOutcome;
}

double target_exponent(Variant v) {
  switch (v) {
    case Variant::kDetOutcome:
      return -0.5;
    case Variant::kRandOutcome:
      return -0.25;
    case Variant::kRandActionOutcome:
      return -0.2;
    case Variant::kDetActionOutcome:
      return -1.0 / 3.0;
  }
  return 0.0;
}

void check_compatible(Variant v, const GameSpec& game) {
  const auto& k = game.feedback();
  const bool need_det = v == Variant::kDetOutcome || v == Variant::kDetActionOutcome;
  const bool need_oo = v == Variant::kDetOutcome || v == Variant::kRandOutcome;
  if (need_det && !k.is_deterministic()) {
    throw ConfigError(std::string("variant/feedback mismatch: ") + to_string(v) +
                      " requires deterministic feedback");
  }
  if (need_oo && !k.is_outcome_only()) {
    throw ConfigError(std::string("variant/feedback mismatch: ") + to_string(v) +
                      " requires outcome-only feedback");
  }
}

double extended_subgradient_scale(const GameSpec& game, const GameConstants& constants,
                                  double gamma) {
  const double c = constants.C_l1.value_or(1.0);
  return static_cast<double>(game.n_actions()) * c / std::sqrt(gamma);
}

ForecasterParams ForecasterParams::defaults(Variant v, std::size_t horizon, const GameSpec& game,
                                            const GameConstants& constants,
                                            const ForecasterOverrides& overrides) {
  if (horizon == 0) throw ConfigError("horizon must be positive");
  check_compatible(v, game);
  ForecasterParams p;
  p.variant = v;
  p.horizon = horizon;
  const double n = static_cast<double>(horizon);
  const double log_n_actions = std::log(static_cast<double>(game.n_actions()));
  const double k = constants.K_bound;

  switch (v) {
    case Variant::kDetOutcome:
      break;
    case Variant::kRandOutcome:
      p.block = static_cast<std::size_t>(std::ceil(std::sqrt(n)));
      break;
    case Variant::kRandActionOutcome:
      p.block = static_cast<std::size_t>(std::ceil(std::pow(n, 0.6)));
      p.gamma = std::min(0.5, std::pow(n, -0.2));
      break;
    case Variant::kDetActionOutcome:
      if (!constants.C_l1) {
        throw ConfigError("det-action-outcome requires rho(p, .) to be linear on the feasible set");
      }
      p.gamma = std::min(0.5, std::pow(n, -1.0 / 3.0) *
                                  std::pow(static_cast<double>(game.n_actions()), 2.0 / 3.0));
      break;
  }
  if (overrides.block) p.block = *overrides.block;
  if (overrides.gamma) p.gamma = *overrides.gamma;
  if (p.block > horizon) p.block = horizon;

  p.k_scale = v == Variant::kDetActionOutcome && p.gamma > 0.0
                  ? extended_subgradient_scale(game, constants, p.gamma)
                  : k;
  const double m = is_blocked(v) ? static_cast<double>(std::max<std::size_t>(p.block, 1)) : 1.0;
  p.eta = log_n_actions > 0.0 && p.k_scale > 0.0
              ? std::sqrt(2.0 * m * log_n_actions / n) / p.k_scale
              : 1.0;
  if (overrides.eta) p.eta = *overrides.eta;
  p.validate();
  return p;
}

void ForecasterParams::validate() const {
  if (horizon == 0) throw ConfigError("horizon must be positive");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be positive");
  if (is_blocked(variant)) {
    if (block == 0) throw ConfigError("block length m must be positive");
    if (block > horizon) throw ConfigError("block length m must not exceed the horizon");
  }
  if (is_mixed(variant) && !(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("gamma must lie in (0, 1)");
  }
}

namespace {

std::vector<double> mix_uniform(const std::vector<double>& p, double gamma) {
  std::vector<double> out(p.size());
  const double u = gamma / static_cast<double>(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) out[k] = (1.0 - gamma) * p[k] + u;
  return out;
}

// Distinct vertex list, in first-occurrence order.
std::vector<std::vector<double>> distinct(std::vector<std::vector<double>> v) {
  std::vector<std::vector<double>> out;
  for (auto& x : v) {
    if (std::find(out.begin(), out.end(), x) == out.end()) out.push_back(std::move(x));
  }
  return out;
}

class WeightedForecaster : public Forecaster {
 public:
  WeightedForecaster(const GameSpec& game, const ForecasterParams& params)
      : game_(game), params_(params), ewa_(game.n_actions(), params.eta) {
    params_.validate();
  }

  std::string label() const override { return to_string(params_.variant); }
  std::size_t updates() const override { return ewa_.updates(); }
  std::vector<double> log_weights() const override {
    return {ewa_.log_weights().begin(), ewa_.log_weights().end()};
  }

 protected:
  void apply(const std::vector<double>& direction) {
    for (double b : direction) max_norm_ = std::max(max_norm_, std::abs(b));
    ewa_.update(direction);
  }
  std::vector<double> weight_distribution() const { return softmax(ewa_.log_weights()); }

  void require_pending() {
    if (!pending_) throw std::logic_error("observe() called without next_distribution()");
    pending_ = false;
  }

  const GameSpec& game_;
  ForecasterParams params_;
  ExponentialWeights ewa_;
  std::optional<MixedAction> current_;
  bool pending_ = false;
};

class DetOutcomeForecaster final : public WeightedForecaster {
 public:
  DetOutcomeForecaster(const GameSpec& game, const ForecasterParams& params)
      : WeightedForecaster(game, params), grouping_(game),
        signal_class_(game.n_signals(), static_cast<std::size_t>(-1)) {
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) {
      signal_class_[game.feedback().signal_of(0, j)] = grouping_.class_of(j);
    }
  }

  MixedAction next_distribution() override {
    current_.emplace(weight_distribution());
    pending_ = true;
    return *current_;
  }

  void observe(std::size_t, std::size_t signal) override {
    require_pending();
    const std::size_t cls = signal_class_.at(signal);
    if (cls == static_cast<std::size_t>(-1)) throw Error("det-outcome: signal emitted by no outcome");
    std::vector<double> b(game_.n_actions());
    if (params_.oracle == SubgradientOracle::kLp) {
      std::vector<double> point(game_.n_signals(), 0.0);
      point[signal] = 1.0;
      b = rho_subgradient(game_, *current_,
                          SignalDistVector::replicated(game_.n_actions(), point))
              .direction;
    } else {
      const std::size_t rep = grouping_.representative(current_->probs(), cls);
      for (std::size_t i = 0; i < b.size(); ++i) b[i] = game_.reward(i, rep);
    }
    apply(b);
  }

 private:
  OutcomeGrouping grouping_;
  std::vector<std::size_t> signal_class_;
};

class RandOutcomeForecaster final : public WeightedForecaster {
 public:
  RandOutcomeForecaster(const GameSpec& game, const ForecasterParams& params)
      : WeightedForecaster(game, params), counts_(game.n_signals(), 0.0) {
    std::vector<std::vector<double>> v;
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) {
      const auto cell = game.feedback().cell(0, j);
      v.emplace_back(cell.begin(), cell.end());
    }
    vertices_ = distinct(std::move(v));
  }

  MixedAction next_distribution() override {
    current_.emplace(weight_distribution());
    pending_ = true;
    return *current_;
  }

  void observe(std::size_t, std::size_t signal) override {
    require_pending();
    counts_.at(signal) += 1.0;
    if (++in_block_ < params_.block) return;

    const double m = static_cast<double>(params_.block);
    BlockEstimate est;
    est.block = blocks_.size();
    est.raw_mean.resize(counts_.size());
    for (std::size_t s = 0; s < counts_.size(); ++s) est.raw_mean[s] = counts_[s] / m;
    const HullProjection proj = project_hull(est.raw_mean, vertices_);
    est.projected = proj.point;
    est.distance = proj.distance;
    const SignalDistVector delta = SignalDistVector::replicated(game_.n_actions(), est.projected);
    blocks_.push_back(std::move(est));
    apply(rho_subgradient(game_, *current_, delta).direction);
    std::fill(counts_.begin(), counts_.end(), 0.0);
    in_block_ = 0;
  }

 private:
  std::vector<std::vector<double>> vertices_;
  std::vector<double> counts_;
  std::size_t in_block_ = 0;
};

class RandActionOutcomeForecaster final : public WeightedForecaster {
 public:
  RandActionOutcomeForecaster(const GameSpec& game, const ForecasterParams& params)
      : WeightedForecaster(game, params), acc_(game.n_actions() * game.n_signals(), 0.0) {
    std::vector<std::vector<double>> v;
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) v.push_back(game.feedback_column(j));
    vertices_ = distinct(std::move(v));
  }

  MixedAction next_distribution() override {
    // p^b is fixed within a block.
    if (in_block_ == 0 || !current_) current_.emplace(mix_uniform(weight_distribution(), params_.gamma));
    pending_ = true;
    return *current_;
  }

  void observe(std::size_t action, std::size_t signal) override {
    require_pending();
    const std::size_t ns = game_.n_signals();
    acc_.at(action * ns + signal) += 1.0 / (*current_)[action];
    if (++in_block_ < params_.block) return;

    const double m = static_cast<double>(params_.block);
    BlockEstimate est;
    est.block = blocks_.size();
    est.raw_mean.resize(acc_.size());
    for (std::size_t k = 0; k < acc_.size(); ++k) est.raw_mean[k] = acc_[k] / m;
    const HullProjection proj = project_hull(est.raw_mean, vertices_);
    est.projected = proj.point;
    est.distance = proj.distance;
    const SignalDistVector delta(game_.n_actions(), ns, est.projected);
    blocks_.push_back(std::move(est));
    apply(rho_subgradient(game_, *current_, delta).direction);
    std::fill(acc_.begin(), acc_.end(), 0.0);
    in_block_ = 0;
  }

 private:
  std::vector<std::vector<double>> vertices_;
  std::vector<double> acc_;
  std::size_t in_block_ = 0;
};

class DetActionOutcomeForecaster final : public WeightedForecaster {
 public:
  DetActionOutcomeForecaster(const GameSpec& game, const ForecasterParams& params)
      : WeightedForecaster(game, params), ext_(game) {}

  MixedAction next_distribution() override {
    current_.emplace(mix_uniform(weight_distribution(), params_.gamma));
    pending_ = true;
    return *current_;
  }

  void observe(std::size_t action, std::size_t signal) override {
    require_pending();
    const Subgradient g = ext_.indicator_subgradient(
        *current_, action, signal, (*current_)[action], params_.oracle == SubgradientOracle::kLp);
    apply(g.direction);
  }

 private:
  LinearExtension ext_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const GameSpec& game, const GameConstants&,
                                            const ForecasterParams& params) {
  check_compatible(params.variant, game);
  params.validate();
  switch (params.variant) {
    case Variant::kDetOutcome:
      return std::make_unique<DetOutcomeForecaster>(game, params);
    case Variant::kRandOutcome:
      return std::make_unique<RandOutcomeForecaster>(game, params);
    case Variant::kRandActionOutcome:
      return std::make_unique<RandActionOutcomeForecaster>(game, params);
    case Variant::kDetActionOutcome:
      return std::make_unique<DetActionOutcomeForecaster>(game, params);
  }
  throw ConfigError("unknown variant");
}

}  // namespace pmf
