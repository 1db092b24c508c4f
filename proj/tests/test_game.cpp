#include <cmath>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "pmf/game.hpp"

using namespace pmf;

namespace {

const char* kExample = R"({
  "name": "eps",
  "signals": ["a", "b"],
  "rewards": [[1.0, 0.0, 0.0], [0.5, 0.5, 0.5]],
  "feedback": {"type": "stochastic", "outcome_only": true,
               "table": [[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]]}
})";

std::string error_of(const std::string& text) {
  try {
    parse_game(text);
  } catch (const ValidationError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("outcome-only stochastic game is expanded and classified") {
  const GameSpec g = parse_game(kExample);
  CHECK(g.n_actions() == 2);
  CHECK(g.n_outcomes() == 3);
  CHECK(g.n_signals() == 2);
  CHECK(g.feedback().is_outcome_only());
  CHECK_FALSE(g.feedback().is_deterministic());
  CHECK(g.feedback().prob(1, 1, 0) == doctest::Approx(0.5));
  CHECK(g.reward(std::vector<double>{0.5, 0.5}, 0) == doctest::Approx(0.75));
}

TEST_CASE("deterministic action-dependent game") {
  const GameSpec g = testing::load_test_game("label_efficient_3x2.json");
  CHECK(g.feedback().is_deterministic());
  CHECK_FALSE(g.feedback().is_outcome_only());
  CHECK(g.feedback().signal_of(2, 1) == g.signal_index("b"));
  CHECK(g.feedback().signal_of(0, 1) == g.signal_index("none"));
  CHECK(has_distinct_columns(g));
}

TEST_CASE("classification flags are recomputed from the table") {
  // Declared stochastic but every cell is a point mass.
  const GameSpec g = parse_game(R"({"signals":["x","y"],"rewards":[[0.2,0.4]],
    "feedback":{"type":"stochastic","table":[[[1,0],[0,1]]]}})");
  CHECK(g.feedback().is_deterministic());
  CHECK(g.feedback().is_outcome_only());
}

TEST_CASE("validation errors name the offending location") {
  CHECK(error_of(R"({"signals":["x"],"rewards":[[1.5]],
    "feedback":{"type":"deterministic","outcome_only":true,"table":["x"]}})")
            .find("rewards[0][0]") != std::string::npos);
  CHECK(error_of(R"({"signals":["x","y"],"rewards":[[1,0]],
    "feedback":{"type":"stochastic","outcome_only":true,"table":[[0.5,0.6],[1,0]]}})")
            .find("not summing to 1") != std::string::npos);
  CHECK(error_of(R"({"signals":["x"],"rewards":[[1,0],[0]],
    "feedback":{"type":"deterministic","outcome_only":true,"table":["x","x"]}})")
            .find("dimension mismatch") != std::string::npos);
  CHECK(error_of(R"({"signals":["x"],"rewards":[[1]],
    "feedback":{"type":"deterministic","outcome_only":true,"table":["z"]}})")
            .find("unknown signal") != std::string::npos);
  CHECK(error_of("{\n  \"signals\": [\"x\"\n  \"rewards\"").find("line 3") != std::string::npos);
}

TEST_CASE("simplex points are validated and renormalised") {
  CHECK_THROWS_AS(MixedAction(std::vector<double>{0.5, 0.6}), ValidationError);
  CHECK_THROWS_AS(MixedAction(std::vector<double>{-0.1, 1.1}), ValidationError);
  const MixedAction p(std::vector<double>{0.5, 0.5 + 1e-10});
  CHECK(p[0] + p[1] == 1.0);
}

TEST_CASE("signal_dist is the mixture of feedback columns") {
  const GameSpec g = parse_game(kExample);
  const auto d = signal_dist(g, OutcomeDistribution(std::vector<double>{0.2, 0.4, 0.4}));
  CHECK(d(0, 0) == doctest::Approx(0.4));
  CHECK(d(1, 1) == doctest::Approx(0.6));
  const auto col = signal_column(g, 2);
  CHECK(col(0, 1) == 1.0);
}

TEST_CASE("draw_signal follows H") {
  const GameSpec g = parse_game(kExample);
  Rng rng(3);
  int a = 0;
  const int n = 20000;
  for (int t = 0; t < n; ++t) a += draw_signal(g, 0, 1, rng) == 0 ? 1 : 0;
  CHECK(std::abs(a / static_cast<double>(n) - 0.5) < 0.02);
  for (int t = 0; t < 100; ++t) CHECK(draw_signal(g, 1, 0, rng) == 0);
}

TEST_CASE("rng streams are reproducible and independent") {
  auto s1 = EpisodeStreams::split(7);
  auto s2 = EpisodeStreams::split(7);
  auto s3 = EpisodeStreams::split(8);
  CHECK(s1.forecaster.next_u64() == s2.forecaster.next_u64());
  CHECK(s1.environment.next_u64() != s1.signal.next_u64());
  CHECK(s2.signal.next_u64() != s3.signal.next_u64());
  Rng r(1);
  const std::vector<double> probs{0.0, 1.0, 0.0};
  for (int k = 0; k < 50; ++k) CHECK(r.categorical(probs) == 1);
}
