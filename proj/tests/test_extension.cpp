#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pmf/extension.hpp"

using namespace pmf;

TEST_CASE("extension agrees with rho on the feasible set") {
  Rng rng(8);
  for (int k = 0; k < 25; ++k) {
    const GameSpec g = testing::random_game(rng, testing::random_shape(rng, true));
    const LinearExtension ext(g);
    for (int t = 0; t < 5; ++t) {
      const SignalDistVector d = signal_dist(g, OutcomeDistribution(testing::random_simplex(rng, g.n_outcomes())));
      const MixedAction p(testing::random_simplex(rng, g.n_actions()));
      CHECK(ext.value(p, d.flat()) == doctest::Approx(rho(g, p, d)).epsilon(1e-8));
      const Subgradient a = ext.subgradient(p, d.flat());
      const Subgradient b = ext.subgradient(p, d.flat(), true);
      for (std::size_t i = 0; i < g.n_actions(); ++i) {
        CHECK(a.direction[i] == doctest::Approx(b.direction[i]).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("extension is linear off the feasible set") {
  const GameSpec g = testing::load_test_game("label_efficient_3x2.json");
  const LinearExtension ext(g);
  Rng rng(2);
  const MixedAction p(testing::random_simplex(rng, 3));
  const std::size_t dim = g.n_actions() * g.n_signals();
  std::vector<double> x(dim), y(dim), z(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    x[k] = rng.uniform() * 4 - 2;
    y[k] = rng.uniform() * 4 - 2;
    z[k] = 0.3 * x[k] - 1.7 * y[k];
  }
  CHECK(ext.value(p, z) == doctest::Approx(0.3 * ext.value(p, x) - 1.7 * ext.value(p, y)));
  // Projection is idempotent.
  const auto px = ext.project(x);
  const auto ppx = ext.project(px);
  for (std::size_t k = 0; k < dim; ++k) CHECK(ppx[k] == doctest::Approx(px[k]));
}

TEST_CASE("indicator sub-gradient equals the sub-gradient at the scaled indicator") {
  const GameSpec g = testing::load_test_game("label_efficient_3x2.json");
  const LinearExtension ext(g);
  const MixedAction p(std::vector<double>{0.2, 0.3, 0.5});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t s = 0; s < 3; ++s) {
      std::vector<double> x(9, 0.0);
      x[i * 3 + s] = 1.0 / 0.25;
      const Subgradient a = ext.indicator_subgradient(p, i, s, 0.25);
      const Subgradient b = ext.subgradient(p, x);
      for (std::size_t k = 0; k < 3; ++k) CHECK(a.direction[k] == doctest::Approx(b.direction[k]));
    }
  }
}

TEST_CASE("C constants of the reference games") {
  const CConstants fm = c_constant(testing::load_test_game("full_monitoring_2x2.json"));
  CHECK(fm.value == doctest::Approx(0.5));
  CHECK(fm.l1 == doctest::Approx(0.5));
  const CConstants le = c_constant(testing::load_test_game("label_efficient_3x2.json"));
  CHECK(le.value == doctest::Approx(0.6));
  CHECK(le.magnitude >= le.value - 1e-12);
  CHECK(le.l1 >= le.magnitude - 1e-12);
  CHECK_THROWS_AS(c_constant(testing::load_test_game("stochastic_3x3.json")), ConfigError);
}
