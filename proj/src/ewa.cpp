#include "pmf/ewa.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmf {

std::vector<double> softmax(std::span<const double> log_w) {
  const double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> p(log_w.size());
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    p[k] = std::exp(log_w[k] - top);
    s += p[k];
  }
  for (double& x : p) x /= s;
  return p;
}

ExponentialWeights::ExponentialWeights(std::size_t n, double eta)
    : eta_(eta), log_w_(n, 0.0) {
  if (n == 0) throw std::invalid_argument("ExponentialWeights: no experts");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw std::invalid_argument("ExponentialWeights: eta must be positive");
  }
}

void ExponentialWeights::update(std::span<const double> reward) {
  if (reward.size() != log_w_.size()) {
    throw std::invalid_argument("ExponentialWeights: reward dimension mismatch");
  }
  for (std::size_t k = 0; k < log_w_.size(); ++k) log_w_[k] += eta_ * reward[k];
  ++updates_;
}

MixedAction ExponentialWeights::distribution() const { return MixedAction(softmax(log_w_)); }

std::vector<double> ExponentialWeights::weights() const {
  const double top = *std::max_element(log_w_.begin(), log_w_.end());
  std::vector<double> w(log_w_.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::exp(log_w_[k] - top);
  return w;
}

}  // namespace pmf
