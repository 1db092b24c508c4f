#include "pmf/hull.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pmf {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// argmin ||W a|| subject to sum(a) = 1, over the columns in `corral`.
VectorXd affine_minimizer(const MatrixXd& w, const std::vector<std::size_t>& corral) {
  const Eigen::Index k = static_cast<Eigen::Index>(corral.size());
  MatrixXd kkt = MatrixXd::Zero(k + 1, k + 1);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b <= a; ++b) {
      const double g = w.col(static_cast<Eigen::Index>(corral[a]))
                           .dot(w.col(static_cast<Eigen::Index>(corral[b])));
      kkt(a, b) = g;
      kkt(b, a) = g;
    }
    kkt(a, k) = 1.0;
    kkt(k, a) = 1.0;
  }
  VectorXd rhs = VectorXd::Zero(k + 1);
  rhs(k) = 1.0;
  const VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);
  VectorXd alpha = sol.head(k);
  // Renormalise away rounding in the affine constraint.
  const double s = alpha.sum();
  if (std::abs(s) > 1e-300) alpha /= s;
  return alpha;
}

}  // namespace

HullProjection project_hull(std::span<const double> point,
                            const std::vector<std::vector<double>>& vertices,
                            double gap_tol) {
  if (vertices.empty()) throw std::invalid_argument("project_hull: no vertices");
  const std::size_t d = point.size();
  const std::size_t nv = vertices.size();
  MatrixXd w(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(nv));
  for (std::size_t j = 0; j < nv; ++j) {
    if (vertices[j].size() != d) {
      throw std::invalid_argument("project_hull: vertex dimension mismatch");
    }
    for (std::size_t k = 0; k < d; ++k) {
      w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = vertices[j][k] - point[k];
    }
  }

  constexpr double kDrop = 1e-14;
  std::size_t start = 0;
  for (std::size_t j = 1; j < nv; ++j) {
    if (w.col(static_cast<Eigen::Index>(j)).squaredNorm() <
        w.col(static_cast<Eigen::Index>(start)).squaredNorm()) {
      start = j;
    }
  }
  std::vector<std::size_t> corral{start};
  std::vector<double> lambda{1.0};

  auto current = [&]() {
    VectorXd z = VectorXd::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < corral.size(); ++a) {
      z += lambda[a] * w.col(static_cast<Eigen::Index>(corral[a]));
    }
    return z;
  };

  HullProjection out;
  VectorXd z = current();
  const std::size_t max_major = 1000 + 10 * nv;
  for (std::size_t major = 0; major < max_major; ++major) {
    out.iterations = major + 1;
    std::size_t best = 0;
    double best_dot = w.col(0).dot(z);
    for (std::size_t j = 1; j < nv; ++j) {
      const double v = w.col(static_cast<Eigen::Index>(j)).dot(z);
      if (v < best_dot) {
        best_dot = v;
        best = j;
      }
    }
    out.gap = z.squaredNorm() - best_dot;
    if (out.gap <= gap_tol) break;
    if (std::find(corral.begin(), corral.end(), best) != corral.end()) break;
    corral.push_back(best);
    lambda.push_back(0.0);

    // Minor cycle: move toward the affine minimiser until it is interior.
    for (std::size_t minor = 0; minor <= corral.size() + 1; ++minor) {
      const VectorXd alpha = affine_minimizer(w, corral);
      bool interior = true;
      for (Eigen::Index a = 0; a < alpha.size(); ++a) {
        if (alpha(a) <= kDrop) interior = false;
      }
      if (interior) {
        for (std::size_t a = 0; a < corral.size(); ++a) lambda[a] = alpha(static_cast<Eigen::Index>(a));
        break;
      }
      double theta = 1.0;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        const double al = alpha(static_cast<Eigen::Index>(a));
        if (al <= kDrop && lambda[a] - al > 0.0) {
          theta = std::min(theta, lambda[a] / (lambda[a] - al));
        }
      }
      for (std::size_t a = 0; a < corral.size(); ++a) {
        lambda[a] = (1.0 - theta) * lambda[a] + theta * alpha(static_cast<Eigen::Index>(a));
      }
      std::vector<std::size_t> kept;
      std::vector<double> kept_lambda;
      for (std::size_t a = 0; a < corral.size(); ++a) {
        if (lambda[a] > kDrop) {
          kept.push_back(corral[a]);
          kept_lambda.push_back(lambda[a]);
        }
      }
      if (kept.empty()) {
        kept.push_back(best);
        kept_lambda.push_back(1.0);
      }
      double s = 0.0;
      for (double v : kept_lambda) s += v;
      for (double& v : kept_lambda) v /= s;
      corral = std::move(kept);
      lambda = std::move(kept_lambda);
      if (corral.size() == 1) break;
    }
    z = current();
  }

  out.coefficients.assign(nv, 0.0);
  for (std::size_t a = 0; a < corral.size(); ++a) out.coefficients[corral[a]] = lambda[a];
  out.point.assign(d, 0.0);
  for (std::size_t j = 0; j < nv; ++j) {
    const double c = out.coefficients[j];
    if (c == 0.0) continue;
    for (std::size_t k = 0; k < d; ++k) out.point[k] += c * vertices[j][k];
  }
  double dist2 = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double e = out.point[k] - point[k];
    dist2 += e * e;
  }
  out.distance = std::sqrt(dist2);
  return out;
}

}  // namespace pmf
