#include "pmf/bounds.hpp"

#include <cmath>

namespace pmf {

namespace {

BoundReport finish(std::vector<BoundTerm> terms) {
  BoundReport r;
  for (const auto& t : terms) r.total += t.value;
  r.terms = std::move(terms);
  return r;
}

}  // namespace

BoundReport theoretical_bound(const ForecasterParams& params, const GameSpec& game,
                              const GameConstants& constants, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  const double n = static_cast<double>(params.horizon);
  const double big_n = static_cast<double>(game.n_actions());
  const double ns = static_cast<double>(game.n_signals());
  const double log_n = std::log(big_n);
  const double eta = params.eta;
  const double k = constants.K_bound;
  const double azuma1 = std::sqrt(std::log(1.0 / delta) / (2.0 * n));

  switch (params.variant) {
    case Variant::kDetOutcome:
      return finish({{"weights", log_n / (eta * n)},
                     {"variance", k * k * eta / 2.0},
                     {"azuma", azuma1}});
    case Variant::kRandOutcome: {
      const double m = static_cast<double>(params.block);
      const double l = constants.L_component.value_or(constants.L_bound);
      return finish({{"estimation", 2.0 * std::sqrt(2.0) * l / std::sqrt(m) *
                                        std::sqrt(std::log(2.0 / delta))},
                     {"weights", m * log_n / (n * eta)},
                     {"variance", k * k * eta / 2.0},
                     {"partial_block", m / n},
                     {"azuma", azuma1}});
    }
    case Variant::kRandActionOutcome: {
      const double m = static_cast<double>(params.block);
      const double g = params.gamma;
      const double l = constants.L_bound;
      const double lg = std::log(2.0 * big_n * ns / delta);
      return finish({{"estimation", 2.0 * l * big_n * std::sqrt(2.0 * ns / (g * m) * lg)},
                     {"estimation_tail", 2.0 * l * std::pow(big_n, 1.5) * std::sqrt(ns) /
                                             (3.0 * g * m) * lg},
                     {"weights", m * log_n / (n * eta)},
                     {"variance", k * k * eta / 2.0},
                     {"exploration", 2.0 * k * g},
                     {"partial_block", m / n},
                     {"azuma", azuma1}});
    }
    case Variant::kDetActionOutcome: {
      const double g = params.gamma;
      const double c = constants.C_magnitude.value_or(0.0);
      const double lg = std::log(2.0 / delta);
      const double ks = params.k_scale;
      return finish({{"estimation", 2.0 * big_n * c * std::sqrt(2.0 / (n * g) * lg)},
                     {"estimation_tail", 2.0 / 3.0 * big_n * c / (g * n) * lg},
                     {"weights", log_n / (eta * n)},
                     {"variance", eta * ks * ks / 2.0},
                     {"exploration", 2.0 * k * g},
                     {"azuma", std::sqrt(lg / (2.0 * n))}});
    }
  }
  throw ConfigError("unknown variant");
}

double block_error_bound(const ForecasterParams& params, const GameSpec& game, double delta) {
  const double m = static_cast<double>(params.block);
  if (params.variant == Variant::kRandOutcome) {
    return std::sqrt(2.0 * std::log(2.0 / delta) / m);
  }
  if (params.variant == Variant::kRandActionOutcome) {
    const double big_n = static_cast<double>(game.n_actions());
    const double ns = static_cast<double>(game.n_signals());
    const double lg = std::log(2.0 * big_n * ns / delta);
    const double r = big_n / (params.gamma * m);
    return std::sqrt(big_n * ns) * (std::sqrt(2.0 * r * lg) + r * lg / 3.0);
  }
  throw ConfigError("block error bounds apply to blocked variants only");
}

double azuma_gap_bound(std::size_t n, double delta) {
  return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

}  // namespace pmf
