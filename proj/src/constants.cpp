#include "pmf/constants.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pmf/extension.hpp"
#include "pmf/lp.hpp"
#include "pmf/rho.hpp"

namespace pmf {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kRankTolerance = 1e-10;
constexpr std::size_t kMaxBases = 2'000'000;
constexpr std::size_t kSpreadSamples = 64;

std::vector<unsigned> first_primes(std::size_t count) {
  std::vector<unsigned> primes;
  for (unsigned c = 2; primes.size() < count; ++c) {
    bool prime = true;
    for (unsigned p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        prime = false;
        break;
      }
    }
    if (prime) primes.push_back(c);
  }
  return primes;
}

double radical_inverse(std::size_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

Index numerical_rank(const VectorXd& sv) {
  const double cutoff = kRankTolerance * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index r = 0;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) ++r;
  }
  return r;
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  double v = 1.0;
  for (std::size_t a = 1; a <= k; ++a) v = v * static_cast<double>(n - k + a) / static_cast<double>(a);
  return static_cast<std::size_t>(std::llround(std::min(v, 1e18)));
}

}  // namespace

std::vector<std::vector<double>> simplex_samples(std::size_t dim, std::size_t count) {
  const std::vector<unsigned> primes = first_primes(dim);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    std::vector<double> v(dim);
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      v[d] = -std::log1p(-radical_inverse(k, primes[d]));
      s += v[d];
    }
    for (double& x : v) x /= s;
    out.push_back(std::move(v));
  }
  return out;
}

double lipschitz_bound(const GameSpec& game) {
  const std::size_t m = game.n_outcomes();
  const std::size_t d = game.n_actions() * game.n_signals();
  if (m < 2) return 0.0;

  MatrixXd a(static_cast<Index>(d + 1), static_cast<Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    const std::vector<double> col = game.feedback_column(j);
    for (std::size_t k = 0; k < d; ++k) a(static_cast<Index>(k), static_cast<Index>(j)) = col[k];
    a(static_cast<Index>(d), static_cast<Index>(j)) = 1.0;
  }

  // Orthonormal basis of the directions spanned by F.
  MatrixXd diff(static_cast<Index>(d), static_cast<Index>(m - 1));
  for (std::size_t j = 1; j < m; ++j) {
    diff.col(static_cast<Index>(j - 1)) = a.col(static_cast<Index>(j)).head(static_cast<Index>(d)) -
                                          a.col(0).head(static_cast<Index>(d));
  }
  Eigen::JacobiSVD<MatrixXd> dsvd(diff, Eigen::ComputeThinU);
  const Index dim_f = numerical_rank(dsvd.singularValues());
  if (dim_f == 0) return 0.0;
  const MatrixXd u = dsvd.matrixU().leftCols(dim_f);

  Eigen::JacobiSVD<MatrixXd> asvd(a);
  const auto r = static_cast<std::size_t>(numerical_rank(asvd.singularValues()));
  if (binomial(m, r) > kMaxBases) throw Error("lipschitz_bound: too many bases to enumerate");

  double best = 0.0;
  std::vector<bool> mask(m, false);
  std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(r), true);
  do {
    std::vector<std::size_t> basis;
    for (std::size_t j = 0; j < m; ++j) {
      if (mask[j]) basis.push_back(j);
    }
    MatrixXd ab(a.rows(), static_cast<Index>(r));
    for (std::size_t c = 0; c < r; ++c) ab.col(static_cast<Index>(c)) = a.col(static_cast<Index>(basis[c]));
    Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(ab);
    cod.setThreshold(kRankTolerance);
    if (static_cast<std::size_t>(cod.rank()) < r) continue;
    const MatrixXd pinv = cod.pseudoInverse();
    for (std::size_t i = 0; i < game.n_actions(); ++i) {
      VectorXd cb(static_cast<Index>(r));
      for (std::size_t c = 0; c < r; ++c) cb(static_cast<Index>(c)) = game.reward(i, basis[c]);
      const VectorXd y = pinv.transpose() * cb;
      best = std::max(best, (u.transpose() * y.head(static_cast<Index>(d))).norm());
    }
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return best;
}

double lipschitz_lp_value(const GameSpec& game) {
  const std::size_t n = game.n_actions();
  const std::size_t ns = game.n_signals();
  const std::size_t m = game.n_outcomes();
  const auto& kernel = game.feedback();
  std::vector<std::pair<std::size_t, std::size_t>> kept;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t s = 0; s < ns; ++s) {
      bool emitted = false;
      for (std::size_t j = 0; j < m && !emitted; ++j) emitted = kernel.prob(i, j, s) > 0.0;
      if (emitted) kept.emplace_back(i, s);
    }
  }
  const std::size_t nv = kept.size() + 1;
  LinearProgram lp(nv, LpDirection::kMaximize);
  std::fill(lp.objective.begin(), lp.objective.end(), 1.0);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> row(nv, 1.0);
    for (std::size_t k = 0; k < kept.size(); ++k) row[k] = kernel.prob(kept[k].first, j, kept[k].second);
    lp.add_constraint(std::move(row), ConstraintSense::kLessEqual, 1.0);
  }
  const LpSolution sol = solve_lp(lp);
  if (sol.status == LpStatus::kUnbounded) return kInfinity;
  return sol.objective;
}

double sampled_subgradient_spread(const GameSpec& game) {
  const std::size_t n = game.n_actions();
  const std::size_t m = game.n_outcomes();
  std::vector<MixedAction> ps;
  for (std::size_t i = 0; i < n; ++i) ps.push_back(MixedAction::point_mass(n, i));
  ps.push_back(MixedAction::uniform(n));
  for (auto& v : simplex_samples(n, kSpreadSamples)) ps.emplace_back(std::move(v));

  std::vector<SignalDistVector> deltas;
  for (std::size_t j = 0; j < m; ++j) deltas.push_back(signal_column(game, j));
  for (auto& v : simplex_samples(m, kSpreadSamples)) {
    deltas.push_back(signal_dist(game, OutcomeDistribution(std::move(v))));
  }

  double best = 0.0;
  for (const auto& delta : deltas) {
    for (const auto& p : ps) best = std::max(best, rho_subgradient(game, p, delta).spread());
  }
  return best;
}

double subgradient_bound(const GameSpec& game) {
  return std::min(1.0, sampled_subgradient_spread(game) + kSubgradientMargin);
}

GameConstants compute_constants(const GameSpec& game) {
  GameConstants c;
  c.K_sampled = sampled_subgradient_spread(game);
  c.K_bound = std::min(1.0, c.K_sampled + kSubgradientMargin);
  c.L_bound = lipschitz_bound(game);
  if (game.feedback().is_outcome_only()) {
    c.L_component = std::sqrt(static_cast<double>(game.n_actions())) * c.L_bound;
  }
  c.L_lp_value = lipschitz_lp_value(game);
  if (game.feedback().is_deterministic()) {
    // Undefined when rho(p, .) has no linear extension.
    try {
      const CConstants cc = c_constant(game);
      c.C_bound = cc.value;
      c.C_magnitude = cc.magnitude;
      c.C_l1 = cc.l1;
    } catch (const ConfigError&) {
    }
  }
  return c;
}

GameHandle::GameHandle(GameSpec game)
    : game_(std::make_shared<const GameSpec>(std::move(game))),
      constants_(compute_constants(*game_)) {}

}  // namespace pmf
