#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pmf/game.hpp"
#include "pmf/rng.hpp"

namespace pmf {

// Outcome generator. Called once per round before the forecaster moves;
// adaptive rules only ever see the forecaster's realised past actions.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t next_outcome(Rng& rng) = 0;
  // Realised action of the round that just finished.
  virtual void observe_action(std::size_t) {}
  virtual std::string describe() const = 0;
};

// Parsed environment description; instantiated per episode.
//   iid:q1,q2,...        i.i.d. outcomes from q
//   cyclic:j1,j2,...     repeats the (0-based) sequence
//   best-response        argmin_j r(p_hat, j), p_hat = empirical past actions
//   switching[:period]   cycles through outcomes, switching every period
//                        rounds (default ceil(sqrt(n)))
struct EnvironmentSpec {
  enum class Kind { kIid, kCyclic, kBestResponse, kSwitching };

  Kind kind = Kind::kIid;
  std::vector<double> q;
  std::vector<std::size_t> sequence;
  std::size_t period = 0;

  static EnvironmentSpec parse(std::string_view text);
  static EnvironmentSpec iid(std::vector<double> q);
  std::string to_string() const;
  // ConfigError if the description does not fit the game.
  std::unique_ptr<Environment> instantiate(const GameSpec& game, std::size_t horizon) const;
};

}  // namespace pmf
