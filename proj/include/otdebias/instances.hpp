#pragma once

// Deterministic instance builders: the three-point counterexample cost, point
// -cloud distance costs, seeded random instances (uniform points in [0,1]^d,
// Dirichlet(1) weights), and dyadic-rational debiasable matrices whose
// constructive inf-representation round-trips bitwise.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/measures.hpp"
#include "otdebias/rng.hpp"

namespace otd {

// Cost [[0,1,0],[1,0,0],[0,0,0]]: debiasable (zero diagonal, nonnegative) yet
// its Gibbs kernel is not psd, so the divergence between mu = (1/2, 1/2, 0)
// and nu = (0, 0, 1) goes negative.
inline CostMatrix counterexample_cost() {
  MatrixXd c(3, 3);
  c << 0, 1, 0, 1, 0, 0, 0, 0, 0;
  return CostMatrix::symmetric(std::move(c));
}
inline DiscreteMeasure counterexample_mu() {
  return DiscreteMeasure::probability((VectorXd(3) << 0.5, 0.5, 0.0).finished());
}
inline DiscreteMeasure counterexample_nu() {
  return DiscreteMeasure::probability((VectorXd(3) << 0.0, 0.0, 1.0).finished());
}

enum class PointCost { squared, absolute, cubed };

inline PointCost point_cost_from_string(const std::string& s) {
  if (s == "sqdist") return PointCost::squared;
  if (s == "absdist") return PointCost::absolute;
  if (s == "cubedist") return PointCost::cubed;
  throw std::invalid_argument("unknown point cost '" + s + "' (sqdist|absdist|cubedist)");
}

inline CostMatrix cost_from_points(const MatrixXd& points, PointCost kind) {
  Eigen::Index n = points.rows();
  MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double d = (points.row(i) - points.row(j)).norm();
      double v = 0.0;
      switch (kind) {
        case PointCost::squared: v = d * d; break;
        case PointCost::absolute: v = d; break;
        case PointCost::cubed: v = d * d * d; break;
      }
      c(i, j) = v;
      c(j, i) = v;
    }
  return CostMatrix::symmetric(std::move(c));
}

inline MatrixXd random_points(Rng& rng, Eigen::Index n, Eigen::Index dim) {
  MatrixXd p(n, dim);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index d = 0; d < dim; ++d) p(i, d) = rng.uniform01();
  return p;
}

inline VectorXd random_simplex(Rng& rng, Eigen::Index n) {
  std::vector<double> w = rng.dirichlet1(static_cast<std::size_t>(n));
  return Eigen::Map<const VectorXd>(w.data(), n);
}

// Debiasable matrix with all entries integer multiples of 2^-20:
// c = r + d_i/2 + d_j/2 with r symmetric, zero-diagonal, >= 0 and d >= 0 even
// at that scale, so every half in the debiasing algebra is exact and the
// constructive inf-representation reproduces c bitwise. A quarter of the
// off-diagonal r entries are zeroed to exercise the non-strict case.
inline CostMatrix dyadic_debiasable(Rng& rng, Eigen::Index n) {
  const double scale = std::ldexp(1.0, -20);
  MatrixXd c(n, n);
  std::vector<double> d(static_cast<std::size_t>(n));
  for (auto& x : d) x = double(2 * rng.uniform_int(1 << 19)) * scale;  // even integers
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      double r = 0.0;
      if (i != j && rng.uniform01() >= 0.25) r = double(1 + rng.uniform_int(1 << 20)) * scale;
      double v = r + d[static_cast<std::size_t>(i)] / 2.0 + d[static_cast<std::size_t>(j)] / 2.0;
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return CostMatrix::symmetric(std::move(c));
}

}  // namespace otd
