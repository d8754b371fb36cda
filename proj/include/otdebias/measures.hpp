#pragma once

// Discrete measures, KL divergence with its atom conventions, products,
// disintegration, gluing, and the triple-KL decomposition identities.

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otdebias/extreal.hpp"

namespace otd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct MarginalMismatchError : std::domain_error {
  MarginalMismatchError(const std::string& what, double l1)
      : std::domain_error(what + " (L1 discrepancy " + std::to_string(l1) + ")"), l1_discrepancy(l1) {}
  double l1_discrepancy;
};

// Weighted atoms on an indexed support; coordinates are an optional
// attachment so abstract finite spaces and Euclidean clouds share one type.
class DiscreteMeasure {
 public:
  DiscreteMeasure(VectorXd weights, std::optional<MatrixXd> coordinates = std::nullopt,
                  bool probability = false)
      : weights_(std::move(weights)), coords_(std::move(coordinates)), probability_(probability) {
    if (weights_.size() == 0) throw std::invalid_argument("DiscreteMeasure: empty support");
    for (Eigen::Index i = 0; i < weights_.size(); ++i) {
      if (!(weights_[i] >= 0.0) || !std::isfinite(weights_[i]))
        throw std::invalid_argument("DiscreteMeasure: weights must be finite and >= 0");
    }
    total_mass_ = weights_.sum();
    if (probability_ && std::abs(total_mass_ - 1.0) > 1e-12)
      throw std::invalid_argument("DiscreteMeasure: probability measure has total mass " +
                                  std::to_string(total_mass_));
    if (coords_ && coords_->rows() != weights_.size())
      throw std::invalid_argument("DiscreteMeasure: coordinate rows must match support size");
    if (coords_ && coords_->cols() < 1)
      throw std::invalid_argument("DiscreteMeasure: coordinate dimension must be >= 1");
  }

  static DiscreteMeasure probability(VectorXd w, std::optional<MatrixXd> coords = std::nullopt) {
    return DiscreteMeasure(std::move(w), std::move(coords), true);
  }
  static DiscreteMeasure masses(VectorXd w, std::optional<MatrixXd> coords = std::nullopt) {
    return DiscreteMeasure(std::move(w), std::move(coords), false);
  }
  static DiscreteMeasure dirac(std::size_t support_size, std::size_t atom,
                               std::optional<MatrixXd> coords = std::nullopt) {
    VectorXd w = VectorXd::Zero(static_cast<Eigen::Index>(support_size));
    w[static_cast<Eigen::Index>(atom)] = 1.0;
    return DiscreteMeasure(std::move(w), std::move(coords), true);
  }
  static DiscreteMeasure uniform(std::size_t n, std::optional<MatrixXd> coords = std::nullopt) {
    return DiscreteMeasure(VectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / double(n)),
                           std::move(coords), true);
  }

  Eigen::Index size() const { return weights_.size(); }
  const VectorXd& weights() const { return weights_; }
  double weight(Eigen::Index i) const { return weights_[i]; }
  double total_mass() const { return total_mass_; }
  bool is_probability_flagged() const { return probability_; }
  bool has_coordinates() const { return coords_.has_value(); }
  const MatrixXd& coordinates() const {
    if (!coords_) throw std::logic_error("DiscreteMeasure: no coordinates attached");
    return *coords_;
  }
  Eigen::Index dimension() const { return coordinates().cols(); }

 private:
  VectorXd weights_;
  std::optional<MatrixXd> coords_;
  bool probability_;
  double total_mass_;
};

// ---------------------------------------------------------------------------
// KL divergence with the conventions 0*log(0/b) = 0, 0*log(0/0) = 0, and an
// immediate +inf when a_i > 0 meets b_i = 0.

inline double kl_divergence(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > 0.0) {
      if (b[i] <= 0.0) return kInf;
      s += a[i] * std::log(a[i] / b[i]);
    }
  }
  return s;
}

inline double kl_divergence(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size()) throw std::invalid_argument("kl_divergence: support sizes differ");
  return kl_divergence(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

inline double kl_divergence(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return kl_divergence(a.weights(), b.weights());
}

inline double kl_divergence(const MatrixXd& a, const MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("kl_divergence: shapes differ");
  return kl_divergence(a.data(), b.data(), static_cast<std::size_t>(a.size()));
}

// ---------------------------------------------------------------------------
// Probability tensor on X x Y x Z.

class CouplingTensor {
 public:
  CouplingTensor(Eigen::Index nx, Eigen::Index ny, Eigen::Index nz)
      : nx_(nx), ny_(ny), nz_(nz), e_(static_cast<std::size_t>(nx * ny * nz), 0.0) {
    if (nx < 1 || ny < 1 || nz < 1) throw std::invalid_argument("CouplingTensor: empty axis");
  }

  double& at(Eigen::Index i, Eigen::Index j, Eigen::Index k) {
    return e_[static_cast<std::size_t>((i * ny_ + j) * nz_ + k)];
  }
  double at(Eigen::Index i, Eigen::Index j, Eigen::Index k) const {
    return e_[static_cast<std::size_t>((i * ny_ + j) * nz_ + k)];
  }

  Eigen::Index nx() const { return nx_; }
  Eigen::Index ny() const { return ny_; }
  Eigen::Index nz() const { return nz_; }
  const std::vector<double>& entries() const { return e_; }

  void validate() const {
    double s = 0.0;
    for (double v : e_) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw std::invalid_argument("CouplingTensor: entries must be finite and >= 0");
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12)
      throw std::invalid_argument("CouplingTensor: total mass " + std::to_string(s) + " != 1");
  }

  VectorXd marginal_x() const {
    VectorXd m = VectorXd::Zero(nx_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j)
        for (Eigen::Index k = 0; k < nz_; ++k) m[i] += at(i, j, k);
    return m;
  }
  VectorXd marginal_y() const {
    VectorXd m = VectorXd::Zero(ny_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j)
        for (Eigen::Index k = 0; k < nz_; ++k) m[j] += at(i, j, k);
    return m;
  }
  VectorXd marginal_z() const {
    VectorXd m = VectorXd::Zero(nz_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j)
        for (Eigen::Index k = 0; k < nz_; ++k) m[k] += at(i, j, k);
    return m;
  }

  // (p1,p3) and (p2,p3) pushforwards.
  MatrixXd marginal_xz() const {
    MatrixXd m = MatrixXd::Zero(nx_, nz_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j)
        for (Eigen::Index k = 0; k < nz_; ++k) m(i, k) += at(i, j, k);
    return m;
  }
  MatrixXd marginal_yz() const {
    MatrixXd m = MatrixXd::Zero(ny_, nz_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j)
        for (Eigen::Index k = 0; k < nz_; ++k) m(j, k) += at(i, j, k);
    return m;
  }

  // Conditional X x Y slice given z = k, or nullopt on a zero marginal.
  std::optional<MatrixXd> conditional_given_z(Eigen::Index k) const {
    double mass = 0.0;
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j) mass += at(i, j, k);
    if (mass <= 0.0) return std::nullopt;
    MatrixXd s(nx_, ny_);
    for (Eigen::Index i = 0; i < nx_; ++i)
      for (Eigen::Index j = 0; j < ny_; ++j) s(i, j) = at(i, j, k) / mass;
    return s;
  }

 private:
  Eigen::Index nx_, ny_, nz_;
  std::vector<double> e_;
};

inline double kl_divergence(const CouplingTensor& a, const CouplingTensor& b) {
  if (a.nx() != b.nx() || a.ny() != b.ny() || a.nz() != b.nz())
    throw std::invalid_argument("kl_divergence: tensor shapes differ");
  return kl_divergence(a.entries().data(), b.entries().data(), a.entries().size());
}

// ---------------------------------------------------------------------------

inline MatrixXd product_measure(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return a.weights() * b.weights().transpose();
}

inline CouplingTensor triple_product(const VectorXd& a, const VectorXd& b, const VectorXd& c) {
  CouplingTensor t(a.size(), b.size(), c.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (Eigen::Index j = 0; j < b.size(); ++j)
      for (Eigen::Index k = 0; k < c.size(); ++k) t.at(i, j, k) = a[i] * b[j] * c[k];
  return t;
}

// Disintegration of a 2-axis coupling along the given axis (0 = rows,
// 1 = columns): conditional distributions over the other axis plus the
// marginal. Zero-marginal slices stay nullopt ("undefined conditional").
struct Disintegration2 {
  std::vector<std::optional<VectorXd>> conditionals;
  VectorXd marginal;
};

inline Disintegration2 disintegrate(const MatrixXd& gamma, int axis) {
  if (axis != 0 && axis != 1) throw std::invalid_argument("disintegrate: axis must be 0 or 1");
  Disintegration2 d;
  Eigen::Index n = (axis == 0) ? gamma.rows() : gamma.cols();
  d.marginal = (axis == 0) ? VectorXd(gamma.rowwise().sum()) : VectorXd(gamma.colwise().sum());
  d.conditionals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (d.marginal[k] > 0.0) {
      VectorXd slice = (axis == 0) ? VectorXd(gamma.row(k)) : VectorXd(gamma.col(k));
      d.conditionals[static_cast<std::size_t>(k)] = slice / d.marginal[k];
    }
  }
  return d;
}

// Disintegration of a 3-axis tensor along one axis: for each index the
// normalized 2-axis conditional slice over the remaining axes.
struct Disintegration3 {
  std::vector<std::optional<MatrixXd>> conditionals;
  VectorXd marginal;
};

inline Disintegration3 disintegrate(const CouplingTensor& gamma, int axis) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("disintegrate: axis must be 0, 1 or 2");
  Disintegration3 d;
  Eigen::Index n = (axis == 0) ? gamma.nx() : (axis == 1) ? gamma.ny() : gamma.nz();
  d.marginal = (axis == 0) ? gamma.marginal_x() : (axis == 1) ? gamma.marginal_y() : gamma.marginal_z();
  d.conditionals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (d.marginal[k] <= 0.0) continue;
    Eigen::Index r = (axis == 0) ? gamma.ny() : gamma.nx();
    Eigen::Index c = (axis == 2) ? gamma.ny() : gamma.nz();
    MatrixXd slice(r, c);
    for (Eigen::Index a = 0; a < r; ++a)
      for (Eigen::Index b = 0; b < c; ++b) {
        double v = (axis == 0)   ? gamma.at(k, a, b)
                   : (axis == 1) ? gamma.at(a, k, b)
                                 : gamma.at(a, b, k);
        slice(a, b) = v / d.marginal[k];
      }
    d.conditionals[static_cast<std::size_t>(k)] = slice;
  }
  return d;
}

// Gluing of two transport plans along their common Z-marginal:
// gamma(i,j,k) = pi1(i|k) * pi2(j|k) * eta_k.
inline CouplingTensor glue(const MatrixXd& pi1, const MatrixXd& pi2, double marginal_tol = 1e-10) {
  if (pi1.cols() != pi2.cols()) throw std::invalid_argument("glue: Z-axis sizes differ");
  VectorXd eta1 = pi1.colwise().sum();
  VectorXd eta2 = pi2.colwise().sum();
  double l1 = (eta1 - eta2).cwiseAbs().sum();
  if (l1 > marginal_tol) throw MarginalMismatchError("glue: Z-marginals differ", l1);
  CouplingTensor g(pi1.rows(), pi2.rows(), pi1.cols());
  for (Eigen::Index k = 0; k < pi1.cols(); ++k) {
    if (eta1[k] <= 0.0) continue;
    for (Eigen::Index i = 0; i < pi1.rows(); ++i)
      for (Eigen::Index j = 0; j < pi2.rows(); ++j)
        g.at(i, j, k) = pi1(i, k) * pi2(j, k) / eta1[k];
  }
  return g;
}

// ---------------------------------------------------------------------------
// Appendix-style KL decomposition identities, verified from raw entries.

struct KlThreeDecomposition {
  double lhs;               // KL(gamma | mu (x) nu (x) eta)
  double kl_alpha;          // KL((p1,p3)#gamma | mu (x) eta)
  double kl_beta;           // KL((p2,p3)#gamma | nu (x) eta)
  double correlation_term;  // sum_k eta_k KL(gamma_k | gamma_k1 (x) gamma_k2)
};

inline KlThreeDecomposition kl_three_decomposition(const CouplingTensor& gamma,
                                                   const DiscreteMeasure& mu,
                                                   const DiscreteMeasure& nu,
                                                   const DiscreteMeasure& eta,
                                                   double marginal_tol = 1e-10) {
  double dx = (gamma.marginal_x() - mu.weights()).cwiseAbs().sum();
  double dy = (gamma.marginal_y() - nu.weights()).cwiseAbs().sum();
  double dz = (gamma.marginal_z() - eta.weights()).cwiseAbs().sum();
  if (dx > marginal_tol || dy > marginal_tol || dz > marginal_tol)
    throw MarginalMismatchError("kl_three_decomposition: marginals do not match", dx + dy + dz);

  KlThreeDecomposition r{};
  CouplingTensor prod = triple_product(mu.weights(), nu.weights(), eta.weights());
  r.lhs = kl_divergence(gamma, prod);
  r.kl_alpha = kl_divergence(MatrixXd(gamma.marginal_xz()),
                             MatrixXd(mu.weights() * eta.weights().transpose()));
  r.kl_beta = kl_divergence(MatrixXd(gamma.marginal_yz()),
                            MatrixXd(nu.weights() * eta.weights().transpose()));
  r.correlation_term = 0.0;
  for (Eigen::Index k = 0; k < gamma.nz(); ++k) {
    if (eta.weight(k) <= 0.0) continue;
    auto cond = gamma.conditional_given_z(k);
    if (!cond) continue;
    VectorXd m1 = cond->rowwise().sum();
    VectorXd m2 = cond->colwise().sum();
    r.correlation_term += eta.weight(k) * kl_divergence(*cond, MatrixXd(m1 * m2.transpose()));
  }
  return r;
}

struct KlChainCheck {
  double joint_kl;          // KL(alpha | beta)
  double conditional_part;  // sum_y nu1(y) KL(alpha_y | beta_y)
  double marginal_part;     // KL(nu1 | nu2)
};

// Chain rule over the second marginal: KL(a|b) = E_{nu1} KL(a_y|b_y) + KL(nu1|nu2).
inline KlChainCheck kl_chain_check(const MatrixXd& alpha, const MatrixXd& beta) {
  if (alpha.rows() != beta.rows() || alpha.cols() != beta.cols())
    throw std::invalid_argument("kl_chain_check: shapes differ");
  KlChainCheck r{};
  r.joint_kl = kl_divergence(alpha, beta);
  Disintegration2 da = disintegrate(alpha, 1);
  Disintegration2 db = disintegrate(beta, 1);
  r.marginal_part = kl_divergence(da.marginal, db.marginal);
  r.conditional_part = 0.0;
  for (Eigen::Index y = 0; y < alpha.cols(); ++y) {
    double w = da.marginal[y];
    if (w <= 0.0) continue;
    if (!db.conditionals[static_cast<std::size_t>(y)]) {
      r.conditional_part = kInf;
      break;
    }
    r.conditional_part += w * kl_divergence(*da.conditionals[static_cast<std::size_t>(y)],
                                            *db.conditionals[static_cast<std::size_t>(y)]);
  }
  return r;
}

struct KlDecomp2Check {
  double sum_side;    // KL(pi1|mu(x)eta) + KL(pi2|nu(x)eta) + KL(eta|lambda)
  double glued_side;  // KL(glue(pi1,pi2) | mu (x) nu (x) lambda)
};

inline KlDecomp2Check kl_decomp2_check(const MatrixXd& pi1, const MatrixXd& pi2,
                                       const DiscreteMeasure& lambda,
                                       double marginal_tol = 1e-10) {
  if (pi1.cols() != pi2.cols() || pi1.cols() != lambda.size())
    throw std::invalid_argument("kl_decomp2_check: Z-axis sizes differ");
  VectorXd mu = pi1.rowwise().sum();
  VectorXd nu = pi2.rowwise().sum();
  VectorXd eta = pi1.colwise().sum();
  double l1 = (eta - VectorXd(pi2.colwise().sum())).cwiseAbs().sum();
  if (l1 > marginal_tol) throw MarginalMismatchError("kl_decomp2_check: Z-marginals differ", l1);

  KlDecomp2Check r{};
  r.sum_side = kl_divergence(pi1, MatrixXd(mu * eta.transpose())) +
               kl_divergence(pi2, MatrixXd(nu * eta.transpose())) +
               kl_divergence(eta, lambda.weights());
  CouplingTensor g = glue(pi1, pi2, marginal_tol);
  CouplingTensor prod = triple_product(mu, nu, lambda.weights());
  r.glued_side = kl_divergence(g, prod);
  return r;
}

}  // namespace otd
