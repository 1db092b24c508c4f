#pragma once

#include <span>
#include <vector>

namespace pmf {

struct HullProjection {
  // Weights over the vertex list (a simplex point). Only `point` is
  // contractual when vertices are duplicated or affinely dependent.
  std::vector<double> coefficients;
  std::vector<double> point;
  double distance = 0.0;
  // Frank-Wolfe gap at termination.
  double gap = 0.0;
  std::size_t iterations = 0;
};

// Euclidean projection of `point` onto conv(vertices), computed with Wolfe's
// minimum-norm-point active-set method (Frank-Wolfe major steps, exact affine
// minor steps). Terminates finitely once the Frank-Wolfe gap is <= gap_tol.
HullProjection project_hull(std::span<const double> point,
                            const std::vector<std::vector<double>>& vertices,
                            double gap_tol = 1e-10);

}  // namespace pmf
