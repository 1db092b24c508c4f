#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pmf/constants.hpp"
#include "pmf/extension.hpp"
#include "pmf/rho.hpp"

using namespace pmf;

namespace {

SignalDistVector mass(const GameSpec& g, double a) {
  const std::vector<double> comp{a, 1.0 - a};
  return SignalDistVector::replicated(g.n_actions(), comp);
}

}  // namespace

TEST_CASE("example game: max rho follows the piecewise form") {
  for (const char* file : {"example1_eps05.json", "example1_eps01.json"}) {
    const GameSpec g = testing::load_test_game(file);
    const double eps = g.feedback().prob(0, 1, 1);
    for (int k = 0; k <= 40; ++k) {
      const double a = k / 40.0;
      const double expected = a <= 1.0 - eps / 2.0 ? 0.5 : 0.5 + (a - (1.0 - eps / 2.0)) / eps;
      CHECK(max_rho(g, mass(g, a)).value == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("example game: rho at p = (1, 0) rises with slope 1/eps") {
  const GameSpec g = testing::load_test_game("example1_eps05.json");
  const MixedAction p(std::vector<double>{1.0, 0.0});
  for (int k = 0; k <= 20; ++k) {
    const double a = k / 20.0;
    CHECK(rho(g, p, mass(g, a)) == doctest::Approx(std::max(0.0, (a - 0.5) / 0.5)).epsilon(1e-9));
  }
}

TEST_CASE("infeasible signal vectors are rejected") {
  const GameSpec g = testing::load_test_game("example1_eps05.json");
  const SignalDistVector d(2, 2, {1.0, 0.0, 0.0, 1.0});
  CHECK_FALSE(is_feasible(g, d));
  CHECK_THROWS_AS(rho(g, MixedAction::uniform(2), d), InfeasibleSignalError);
  CHECK_THROWS_AS(max_rho(g, d), InfeasibleSignalError);
}

TEST_CASE("rho matches vertex enumeration, its dual and a valid sub-gradient") {
  Rng rng(21);
  for (int game_k = 0; game_k < 30; ++game_k) {
    const GameSpec g = testing::random_game(rng, testing::random_shape(rng, game_k % 2 == 0));
    for (int pair = 0; pair < 10; ++pair) {
      const OutcomeDistribution q(testing::random_simplex(rng, g.n_outcomes()));
      const SignalDistVector d = signal_dist(g, q);
      const MixedAction p(testing::random_simplex(rng, g.n_actions()));
      const auto verts = testing::fiber_vertices(g, d.flat());
      const double v = rho(g, p, d);
      CHECK(v == doctest::Approx(testing::brute_rho(g, p.probs(), verts)).epsilon(1e-7));
      CHECK(rho_dual(g, p, d).objective == doctest::Approx(v).epsilon(1e-7));
      const Subgradient b = rho_subgradient(g, p, d);
      CHECK(b.sup_norm() <= 1.0 + 1e-9);
      // Concavity: rho(p') <= rho(p) + b.(p' - p).
      for (int k = 0; k < 5; ++k) {
        const MixedAction p2(testing::random_simplex(rng, g.n_actions()));
        double lin = v;
        for (std::size_t i = 0; i < g.n_actions(); ++i) lin += b.direction[i] * (p2[i] - p[i]);
        CHECK(rho(g, p2, d) <= lin + 1e-8);
      }
      const MaxRho mr = max_rho(g, d);
      CHECK(mr.value >= v - 1e-9);
      CHECK(rho(g, mr.argmax, d) == doctest::Approx(mr.value).epsilon(1e-7));
    }
  }
}

TEST_CASE("grouping evaluates vertices like the LP") {
  Rng rng(4);
  for (int game_k = 0; game_k < 20; ++game_k) {
    const GameSpec g = testing::random_game(rng, testing::random_shape(rng, true));
    const OutcomeGrouping grouping(g);
    std::size_t members = 0;
    for (const auto& c : grouping.classes()) members += c.size();
    CHECK(members == g.n_outcomes());
    const MixedAction p(testing::random_simplex(rng, g.n_actions()));
    for (std::size_t j = 0; j < g.n_outcomes(); ++j) {
      const VertexEvaluation e = evaluate_vertex(g, grouping, p.probs(), j);
      CHECK(e.value == doctest::Approx(rho(g, p, signal_column(g, j))).epsilon(1e-9));
      CHECK(grouping.class_of(e.representative) == grouping.class_of(j));
    }
  }
}

TEST_CASE("grouping rejects stochastic feedback") {
  CHECK_THROWS_AS(OutcomeGrouping(testing::load_test_game("stochastic_3x3.json")), ConfigError);
}

TEST_CASE("rho is convex but not linear when distinct columns are affinely dependent") {
  // h(1, .) = (a, a, b, b), h(2, .) = (a, b, a, b): outcomes 1 + 4 and 2 + 3
  // induce the same signal vector.
  const GameSpec g = parse_game(R"({"signals":["a","b"],"rewards":[[1,0,0,1],[0,1,1,0]],
    "feedback":{"type":"deterministic","table":[["a","a","b","b"],["a","b","a","b"]]}})");
  CHECK(has_distinct_columns(g));
  const MixedAction p(std::vector<double>{1.0, 0.0});
  const double r1 = rho(g, p, signal_column(g, 0));
  const double r4 = rho(g, p, signal_column(g, 3));
  const double mid = rho(g, p, signal_dist(g, OutcomeDistribution(std::vector<double>{0.5, 0, 0, 0.5})));
  CHECK(r1 == doctest::Approx(1.0));
  CHECK(r4 == doctest::Approx(1.0));
  CHECK(mid == doctest::Approx(0.0));
  CHECK_THROWS_AS(LinearExtension{g}, ConfigError);
  CHECK_FALSE(compute_constants(g).C_bound);
}

TEST_CASE("identifiability of outcome classes") {
  CHECK(signals_identify_classes(testing::load_test_game("full_monitoring_2x2.json")));
  CHECK(signals_identify_classes(testing::load_test_game("label_efficient_3x2.json")));
  CHECK_FALSE(signals_identify_classes(testing::load_test_game("stochastic_3x3.json")));
  const GameSpec pennies = parse_game(R"({"signals":["a","b"],"rewards":[[1,0,0,1],[0,1,1,0]],
    "feedback":{"type":"deterministic","table":[["a","a","b","b"],["a","b","a","b"]]}})");
  CHECK_FALSE(signals_identify_classes(pennies));
}
