#pragma once

#include <span>
#include <vector>

#include "pmf/game.hpp"

namespace pmf {

// Exponentially weighted average over N experts. Weights are kept as
// logarithms so long runs never overflow; the distribution is a softmax and
// therefore invariant to a common rescaling of the weights.
class ExponentialWeights {
 public:
  ExponentialWeights(std::size_t n, double eta);

  // w_k <- w_k * exp(eta * reward_k).
  void update(std::span<const double> reward);
  MixedAction distribution() const;

  std::span<const double> log_weights() const { return log_w_; }
  // Weights rescaled so that the largest equals 1.
  std::vector<double> weights() const;
  double eta() const { return eta_; }
  std::size_t updates() const { return updates_; }

 private:
  double eta_;
  std::vector<double> log_w_;
  std::size_t updates_ = 0;
};

// Softmax of a log-weight vector.
std::vector<double> softmax(std::span<const double> log_w);

}  // namespace pmf
