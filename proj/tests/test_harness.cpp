#include <cmath>
#include <memory>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "pmf/harness.hpp"
#include "pmf/rho.hpp"

using namespace pmf;

namespace {

EnvironmentSpec iid(std::vector<double> q) { return EnvironmentSpec::iid(std::move(q)); }

// Records the order of protocol calls.
struct Log {
  std::vector<std::string> events;
};

class LoggingEnv : public Environment {
 public:
  explicit LoggingEnv(Log& log) : log_(log) {}
  std::size_t next_outcome(Rng&) override {
    log_.events.push_back("outcome");
    return 0;
  }
  void observe_action(std::size_t) override { log_.events.push_back("env-sees-action"); }
  std::string describe() const override { return "logging"; }

 private:
  Log& log_;
};

class LoggingForecaster : public Forecaster {
 public:
  explicit LoggingForecaster(Log& log) : log_(log) {}
  MixedAction next_distribution() override {
    log_.events.push_back("distribution");
    return MixedAction::uniform(2);
  }
  void observe(std::size_t, std::size_t) override { log_.events.push_back("signal"); }
  std::string label() const override { return "logging"; }

 private:
  Log& log_;
};

}  // namespace

TEST_CASE("protocol order within a round") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  Log log;
  LoggingEnv env(log);
  LoggingForecaster f(log);
  auto streams = EpisodeStreams::split(1);
  const Transcript tr = run_episode(g, f, env, 2, streams);
  const std::vector<std::string> expected{"outcome", "distribution", "signal", "env-sees-action",
                                          "outcome", "distribution", "signal", "env-sees-action"};
  CHECK(log.events == expected);
  CHECK(tr.has_rounds());
}

TEST_CASE("empty transcript has no regret") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  const GameConstants c = compute_constants(g);
  const auto p = ForecasterParams::defaults(Variant::kDetOutcome, 1, g, c);
  FixedForecaster f(MixedAction::uniform(2));
  auto env = iid({0.5, 0.5}).instantiate(g, 0);
  auto streams = EpisodeStreams::split(1);
  const Transcript tr = run_episode(g, f, *env, 0, streams);
  CHECK(tr.actions.empty());
  CHECK_THROWS_AS(regret(g, tr, &c), Error);
  (void)p;
}

TEST_CASE("identical inputs give identical transcripts") {
  const GameSpec g = testing::load_test_game("stochastic_3x3.json");
  const GameConstants c = compute_constants(g);
  const auto p = ForecasterParams::defaults(Variant::kRandActionOutcome, 3000, g, c);
  const Transcript a = run_episode(g, c, p, iid({0.2, 0.5, 0.3}), 7);
  const Transcript b = run_episode(g, c, p, iid({0.2, 0.5, 0.3}), 7);
  const Transcript d = run_episode(g, c, p, iid({0.2, 0.5, 0.3}), 8);
  CHECK(a.actions == b.actions);
  CHECK(a.signals == b.signals);
  CHECK(a.rewards == b.rewards);
  CHECK(a.actions != d.actions);
  std::vector<std::size_t> counts(3, 0);
  for (auto j : a.outcomes) ++counts[j];
  CHECK(counts == a.outcome_counts);
}

TEST_CASE("example game: always outcome 2 against always action 2 has zero regret") {
  const GameSpec g = testing::load_test_game("example1_eps05.json");
  FixedForecaster f(MixedAction(std::vector<double>{0.0, 1.0}));
  auto env = EnvironmentSpec::parse("cyclic:1").instantiate(g, 1000);
  auto streams = EpisodeStreams::split(1);
  const Transcript tr = run_episode(g, f, *env, 1000, streams);
  const RegretReport r = regret(g, tr);
  CHECK(r.benchmark == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.average_reward == 0.5);
  CHECK(std::abs(r.regret) < 1e-12);
}

TEST_CASE("full-monitoring benchmark is the best fixed action") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  const GameConstants c = compute_constants(g);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = ForecasterParams::defaults(Variant::kDetOutcome, 2000, g, c);
    const Transcript tr = run_episode(g, c, p, iid({0.45, 0.55}), seed);
    const RegretReport r = regret(g, tr, &c);
    double best = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      double s = 0.0;
      for (auto j : tr.outcomes) s += g.reward(i, j);
      best = std::max(best, s / 2000.0);
    }
    CHECK(std::abs(r.benchmark - best) <= 1e-8);
    CHECK(r.regret <= r.benchmark);
    REQUIRE(r.bound);
  }
}

TEST_CASE("playing the benchmark maximiser has concentration-level regret") {
  const GameSpec g = testing::load_test_game("stochastic_3x3.json");
  const OutcomeDistribution q(std::vector<double>{0.3, 0.3, 0.4});
  const MaxRho star = max_rho(g, signal_dist(g, q));
  FixedForecaster f(star.argmax);
  auto env = iid(q.vector()).instantiate(g, 100000);
  auto streams = EpisodeStreams::split(5);
  EpisodeOptions opt;
  opt.record_rounds = false;
  const Transcript tr = run_episode(g, f, *env, 100000, streams, opt);
  CHECK(regret(g, tr).regret <= 0.02);
}

TEST_CASE("deterministic feedback through the rand-outcome estimator is exact") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  const GameConstants c = compute_constants(g);
  const auto p = ForecasterParams::defaults(Variant::kRandOutcome, 4000, g, c);
  const Transcript tr = run_episode(g, c, p, iid({0.3, 0.7}), 3);
  const EstimatorDiagnostics d = estimator_diagnostics(g, tr, 0.05);
  REQUIRE(!d.blocks.empty());
  for (const auto& b : d.blocks) CHECK(b.raw_error <= 1e-12);
}

TEST_CASE("rand-outcome block errors respect the concentration bound") {
  const GameSpec g = testing::load_test_game("example1_eps05.json");
  const GameConstants c = compute_constants(g);
  const auto p = ForecasterParams::defaults(Variant::kRandOutcome, 40000, g, c, {std::nullopt, 400, std::nullopt});
  const Transcript tr = run_episode(g, c, p, iid({0.2, 0.3, 0.5}), 11);
  const EstimatorDiagnostics d = estimator_diagnostics(g, tr, 0.05);
  CHECK(d.blocks.size() == 100);
  CHECK(d.violation_fraction <= 0.10);
  CHECK_THROWS_AS(estimator_diagnostics(g, run_episode(g, c, ForecasterParams::defaults(Variant::kDetOutcome, 10, testing::load_test_game("full_monitoring_2x2.json"), compute_constants(testing::load_test_game("full_monitoring_2x2.json"))), iid({0.5, 0.5}), 1), 0.05),
                  Error);
}

TEST_CASE("more exploration gives smaller importance-weighted estimation error") {
  const GameSpec g = testing::load_test_game("stochastic_3x3.json");
  const GameConstants c = compute_constants(g);
  auto median_error = [&](double gamma) {
    std::vector<double> errs;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      // A large eta concentrates the weights after one block, so the floor gamma/N matters.
      const auto p = ForecasterParams::defaults(Variant::kRandActionOutcome, 4000, g, c, {50.0, 1000, gamma});
      const Transcript tr = run_episode(g, c, p, iid({0.8, 0.1, 0.1}), seed);
      const auto blocks = estimator_diagnostics(g, tr, 0.05).blocks;
      for (std::size_t b = 1; b < blocks.size(); ++b) errs.push_back(blocks[b].raw_error);
    }
    return median(errs);
  };
  CHECK(median_error(0.5) < median_error(0.05));
}

TEST_CASE("full monitoring is no harder than noisy monitoring") {
  const GameSpec noisy = testing::load_test_game("example1_eps05.json");
  const GameSpec full = parse_game(R"({"signals":["x","y","z"],"rewards":[[1,0,0],[0.5,0.5,0.5]],
    "feedback":{"type":"deterministic","outcome_only":true,"table":["x","y","z"]}})");
  auto med = [](const GameSpec& g, Variant v) {
    const GameConstants c = compute_constants(g);
    std::vector<double> rs;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      const auto p = ForecasterParams::defaults(v, 10000, g, c);
      EpisodeOptions o;
      o.record_rounds = false;
      rs.push_back(regret(g, run_episode(g, c, p, iid({0.2, 0.3, 0.5}), seed, o)).regret);
    }
    return median(rs);
  };
  CHECK(med(full, Variant::kDetOutcome) <= med(noisy, Variant::kRandOutcome));
}

TEST_CASE("rate experiment guards and determinism") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  const GameConstants c = compute_constants(g);
  RateOptions o;
  o.horizons = {1000};
  try {
    rate_experiment(g, c, Variant::kDetOutcome, iid({0.7, 0.3}), o);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("at least 4 horizons required") != std::string::npos);
  }
  o.horizons = {100, 1000, 5000, 10000};
  o.seeds = 5;
  CHECK_THROWS_AS(rate_experiment(g, c, Variant::kDetOutcome, iid({0.7, 0.3}), o), ConfigError);
  o.horizons = {100, 300, 1000, 3000};
  CHECK_THROWS_AS(rate_experiment(g, c, Variant::kDetOutcome, iid({0.7, 0.3}), o), ConfigError);
  o.horizons = {100, 1000, 3000, 10000};
  o.seeds = 20;
  const RateReport a = rate_experiment(g, c, Variant::kDetOutcome, iid({0.7, 0.3}), o);
  o.threads = 3;
  const RateReport b = rate_experiment(g, c, Variant::kDetOutcome, iid({0.7, 0.3}), o);
  CHECK(a.slope == b.slope);
  CHECK(a.ci_low == b.ci_low);
  CHECK(a.ci_low <= a.slope);
  CHECK(a.slope <= a.ci_high);
  CHECK(a.target == -0.5);
}

TEST_CASE("non-learning control has a flat rate") {
  const GameSpec g = testing::load_test_game("full_monitoring_2x2.json");
  RateOptions o;
  o.horizons = {1000, 10000, 100000, 1000000};
  const MixedAction fixed(std::vector<double>{0.8, 0.2});
  const ForecasterFactory factory = [&](std::size_t) { return std::make_unique<FixedForecaster>(fixed); };
  const RateReport r = rate_experiment(g, factory, "fixed", 0.0, EnvironmentSpec::parse("best-response"), o);
  CHECK(std::abs(r.slope) <= 0.1);
}

TEST_CASE("least squares and median helpers") {
  CHECK(least_squares_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
  CHECK(median({3, 1, 2}) == 2.0);
  CHECK(median({4, 1, 2, 3}) == 2.5);
}

TEST_CASE("environment descriptions") {
  const GameSpec g = testing::load_test_game("stochastic_3x3.json");
  CHECK_THROWS_AS(EnvironmentSpec::parse("iid:0.5,0.5").instantiate(g, 10), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec::parse("cyclic:5").instantiate(g, 10), ConfigError);
  CHECK_THROWS_AS(EnvironmentSpec::parse("sometimes"), ConfigError);
  auto env = EnvironmentSpec::parse("switching:2").instantiate(g, 10);
  Rng rng(1);
  std::vector<std::size_t> seq;
  for (int t = 0; t < 6; ++t) seq.push_back(env->next_outcome(rng));
  CHECK(seq == std::vector<std::size_t>{0, 0, 1, 1, 2, 2});
  CHECK(EnvironmentSpec::parse("cyclic:2,0").to_string() == "cyclic:2,0");
}
