#include "pmf/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pmf/constants.hpp"
#include "pmf/lp.hpp"

namespace pmf {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kConsistencyTolerance = 1e-7;
constexpr double kWeightEpsilon = 1e-12;
constexpr std::size_t kMaxRepresentativeChoices = std::size_t{1} << 16;

MatrixXd column_matrix(const GameSpec& game) {
  const std::size_t d = game.n_actions() * game.n_signals();
  MatrixXd v(static_cast<Index>(d), static_cast<Index>(game.n_outcomes()));
  for (std::size_t j = 0; j < game.n_outcomes(); ++j) {
    const std::vector<double> col = game.feedback_column(j);
    for (std::size_t k = 0; k < d; ++k) v(static_cast<Index>(k), static_cast<Index>(j)) = col[k];
  }
  return v;
}

std::vector<MixedAction> check_points(std::size_t n) {
  std::vector<MixedAction> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(MixedAction::point_mass(n, i));
  pts.push_back(MixedAction::uniform(n));
  for (auto& s : simplex_samples(n, 16)) pts.emplace_back(std::move(s));
  return pts;
}

// max_p sum_k w_k min_{y in F_k} r(p, y).
double maximize_grouped(const GameSpec& game, const OutcomeGrouping& grouping,
                        const std::vector<double>& w) {
  const std::size_t n = game.n_actions();
  const auto& classes = grouping.classes();
  std::vector<std::size_t> pos, neg;
  for (std::size_t k = 0; k < classes.size(); ++k) {
    if (w[k] > kWeightEpsilon) pos.push_back(k);
    if (w[k] < -kWeightEpsilon) neg.push_back(k);
  }
  std::size_t choices = 1;
  for (std::size_t k : neg) {
    choices *= classes[k].size();
    if (choices > kMaxRepresentativeChoices) {
      throw Error("c_constant: too many representative combinations");
    }
  }

  double best = -kInfinity;
  std::vector<std::size_t> pick(neg.size(), 0);
  for (std::size_t combo = 0; combo < choices; ++combo) {
    std::size_t rest = combo;
    for (std::size_t a = 0; a < neg.size(); ++a) {
      pick[a] = rest % classes[neg[a]].size();
      rest /= classes[neg[a]].size();
    }
    // Variables: p (n), then one epigraph variable per positive class.
    const std::size_t nv = n + pos.size();
    LinearProgram lp(nv, LpDirection::kMaximize);
    std::vector<double> sum(nv, 0.0);
    std::fill(sum.begin(), sum.begin() + static_cast<std::ptrdiff_t>(n), 1.0);
    lp.add_constraint(std::move(sum), ConstraintSense::kEqual, 1.0);
    for (std::size_t a = 0; a < pos.size(); ++a) {
      const std::size_t k = pos[a];
      lp.objective[n + a] = w[k];
      lp.set_free(n + a);
      for (std::size_t y : classes[k]) {
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = -game.reward(i, y);
        row[n + a] = 1.0;
        lp.add_constraint(std::move(row), ConstraintSense::kLessEqual, 0.0);
      }
    }
    for (std::size_t a = 0; a < neg.size(); ++a) {
      const std::size_t k = neg[a];
      const std::size_t chosen = classes[k][pick[a]];
      for (std::size_t i = 0; i < n; ++i) lp.objective[i] += w[k] * game.reward(i, chosen);
      for (std::size_t y : classes[k]) {
        if (y == chosen) continue;
        std::vector<double> row(nv, 0.0);
        for (std::size_t i = 0; i < n; ++i) row[i] = game.reward(i, chosen) - game.reward(i, y);
        lp.add_constraint(std::move(row), ConstraintSense::kLessEqual, 0.0);
      }
    }
    const LpSolution sol = solve_lp(lp);
    if (sol.optimal()) best = std::max(best, sol.objective);
  }
  return best;
}

}  // namespace

LinearExtension::LinearExtension(const GameSpec& game)
    : game_(&game), grouping_(game), columns_(column_matrix(game)) {
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(columns_);
  pinv_ = cod.pseudoInverse();

  // Null space of the column matrix from the SVD.
  Eigen::JacobiSVD<MatrixXd> svd(columns_, Eigen::ComputeFullV);
  const VectorXd& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Index rank = 0;
  for (Index k = 0; k < sv.size(); ++k) {
    if (sv(k) > cutoff) ++rank;
  }
  const MatrixXd& vmat = svd.matrixV();
  const Index m = columns_.cols();
  if (rank < m) {
    for (const MixedAction& p : check_points(game.n_actions())) {
      VectorXd vertex(m);
      for (Index j = 0; j < m; ++j) {
        vertex(j) = rho(game, p, signal_column(game, static_cast<std::size_t>(j)));
      }
      for (Index k = rank; k < m; ++k) {
        const double r = std::abs(vmat.col(k).dot(vertex));
        consistency_residual_ = std::max(consistency_residual_, r);
      }
    }
    if (consistency_residual_ > kConsistencyTolerance) {
      std::ostringstream msg;
      msg << "rho(p, .) is not linear on the feasible set of this game: the feedback columns are"
          << " affinely dependent (null-space residual " << consistency_residual_ << ")";
      throw ConfigError(msg.str());
    }
  }
}

std::vector<double> LinearExtension::coordinates(std::span<const double> x) const {
  if (static_cast<Index>(x.size()) != columns_.rows()) {
    throw ValidationError("linear extension: dimension mismatch");
  }
  const Eigen::Map<const VectorXd> xv(x.data(), static_cast<Index>(x.size()));
  const VectorXd c = pinv_ * xv;
  return {c.data(), c.data() + c.size()};
}

std::vector<double> LinearExtension::project(std::span<const double> x) const {
  const std::vector<double> c = coordinates(x);
  const Eigen::Map<const VectorXd> cv(c.data(), static_cast<Index>(c.size()));
  const VectorXd px = columns_ * cv;
  return {px.data(), px.data() + px.size()};
}

double LinearExtension::value(const MixedAction& p, std::span<const double> x) const {
  const std::vector<double> c = coordinates(x);
  double v = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (c[j] == 0.0) continue;
    v += c[j] * evaluate_vertex(*game_, grouping_, p.probs(), j).value;
  }
  return v;
}

Subgradient LinearExtension::combine(const MixedAction& p, const VectorXd& c,
                                     bool use_lp) const {
  const std::size_t n = game_->n_actions();
  Subgradient g;
  g.direction.assign(n, 0.0);
  double l1 = 0.0;
  for (Index j = 0; j < c.size(); ++j) {
    const double cj = c(j);
    if (cj == 0.0) continue;
    l1 += std::abs(cj);
    if (use_lp) {
      const Subgradient gj = rho_subgradient(*game_, p, signal_column(*game_, static_cast<std::size_t>(j)));
      for (std::size_t i = 0; i < n; ++i) g.direction[i] += cj * gj.direction[i];
    } else {
      const std::size_t rep = evaluate_vertex(*game_, grouping_, p.probs(), static_cast<std::size_t>(j)).representative;
      for (std::size_t i = 0; i < n; ++i) g.direction[i] += cj * game_->reward(i, rep);
    }
  }
  g.bound = l1;
  for (double& b : g.direction) b = std::clamp(b, -l1, l1);
  return g;
}

Subgradient LinearExtension::subgradient(const MixedAction& p, std::span<const double> x,
                                         bool use_lp) const {
  const std::vector<double> c = coordinates(x);
  return combine(p, Eigen::Map<const VectorXd>(c.data(), static_cast<Index>(c.size())), use_lp);
}

Subgradient LinearExtension::indicator_subgradient(const MixedAction& p, std::size_t action,
                                                   std::size_t signal, double weight,
                                                   bool use_lp) const {
  const Index col = static_cast<Index>(action * game_->n_signals() + signal);
  const VectorXd c = pinv_.col(col) / weight;
  return combine(p, c, use_lp);
}

double linear_extension_rho(const GameSpec& game, const MixedAction& p,
                            std::span<const double> x) {
  return LinearExtension(game).value(p, x);
}

Subgradient linear_extension_subgradient(const GameSpec& game, const MixedAction& p,
                                         std::span<const double> x) {
  return LinearExtension(game).subgradient(p, x);
}

CConstants c_constant(const GameSpec& game) {
  const LinearExtension ext(game);
  const auto& grouping = ext.grouping();
  const auto& kernel = game.feedback();
  const std::size_t n = game.n_actions();
  const std::size_t ns = game.n_signals();
  CConstants out;
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<bool> emitted(ns, false);
    for (std::size_t j = 0; j < game.n_outcomes(); ++j) emitted[kernel.signal_of(i, j)] = true;
    for (std::size_t s = 0; s < ns; ++s) {
      if (!emitted[s]) continue;
      std::vector<double> x(n * ns, 0.0);
      x[i * ns + s] = 1.0;
      const std::vector<double> c = ext.coordinates(x);
      std::vector<double> w(grouping.num_classes(), 0.0);
      double l1 = 0.0;
      for (std::size_t j = 0; j < c.size(); ++j) {
        w[grouping.class_of(j)] += c[j];
        l1 += std::abs(c[j]);
      }
      std::vector<double> neg_w(w.size());
      for (std::size_t k = 0; k < w.size(); ++k) neg_w[k] = -w[k];
      const double hi = maximize_grouped(game, grouping, w);
      const double lo = -maximize_grouped(game, grouping, neg_w);
      if (!any) {
        out.value = hi;
        any = true;
      }
      out.value = std::max(out.value, hi);
      out.magnitude = std::max({out.magnitude, std::abs(hi), std::abs(lo)});
      out.l1 = std::max(out.l1, l1);
    }
  }
  return out;
}

}  // namespace pmf
