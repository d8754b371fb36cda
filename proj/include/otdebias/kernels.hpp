#pragma once

// Gibbs kernels, psd / negative-definiteness certification, Hilbert
// embeddings of negative definite costs, the Gaussian random-feature
// factorization, log-sum-exp costs, and mean-embedding Gram algebra.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/rng.hpp"

namespace otd {

class KernelMatrix {
 public:
  explicit KernelMatrix(MatrixXd entries, double epsilon = 0.0)
      : k_(std::move(entries)), epsilon_(epsilon) {
    if (k_.rows() != k_.cols() || k_.rows() < 1)
      throw std::invalid_argument("KernelMatrix: square matrix required");
    for (Eigen::Index i = 0; i < k_.rows(); ++i)
      for (Eigen::Index j = 0; j < k_.cols(); ++j) {
        double v = k_(i, j);
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("KernelMatrix: entries must be finite and >= 0");
        if (!(k_(i, j) == k_(j, i))) throw std::invalid_argument("KernelMatrix: not symmetric");
      }
  }

  Eigen::Index size() const { return k_.rows(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return k_(i, j); }
  const MatrixXd& matrix() const { return k_; }
  double epsilon() const { return epsilon_; }

 private:
  MatrixXd k_;
  double epsilon_;
};

inline KernelMatrix gibbs_kernel(const CostMatrix& c, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("gibbs_kernel: epsilon must be positive");
  c.require_symmetric("gibbs_kernel");
  MatrixXd k(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) k(i, j) = std::exp(-c(i, j) / epsilon);
  return KernelMatrix(std::move(k), epsilon);
}

struct PsdCertificate {
  bool verdict;
  double min_eigenvalue;
};

inline PsdCertificate is_psd(const KernelMatrix& k, double tol = 1e-9) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(k.matrix(), Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff();
  return {lo >= -tol, lo};
}

struct NegdefCertificate {
  bool verdict;
  VectorXd worst_vector;   // zero-sum by construction
  double quadratic_value;  // a^T C a at the worst vector
};

// Negative definite <=> a^T C a <= 0 on zero-sum a. The centered spectrum
// of P C P (P the centering projector) captures exactly that cone.
inline NegdefCertificate is_negative_definite(const CostMatrix& c, double tol = 1e-9) {
  c.require_symmetric("is_negative_definite");
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (!std::isfinite(c(i, j)))
        throw std::domain_error("is_negative_definite: entries must be finite");
  Eigen::Index n = c.rows();
  MatrixXd P = MatrixXd::Identity(n, n) - MatrixXd::Constant(n, n, 1.0 / double(n));
  MatrixXd M = P * c.matrix() * P;
  M = 0.5 * (M + M.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(M);
  Eigen::Index top;
  es.eigenvalues().maxCoeff(&top);
  VectorXd a = P * es.eigenvectors().col(top);  // re-center to kill rounding drift
  double q = a.dot(c.matrix() * a);
  return {es.eigenvalues()[top] <= tol, a, q};
}

// ---------------------------------------------------------------------------
// Hilbert embedding of a negative definite cost:
// c(i,j) = s_i + s_j + |phi_i - phi_j|^2.

struct Embedding {
  Eigen::Index points;
  Eigen::Index rank;
  MatrixXd features;    // points x rank
  VectorXd offsets;     // s_i = c(i,i)/2
  double psd_residual;  // most negative Gram eigenvalue clipped to zero

  double feature_sqdist(Eigen::Index i, Eigen::Index j) const {
    if (rank == 0) return 0.0;
    return (features.row(i) - features.row(j)).squaredNorm();
  }
  double reconstruct(Eigen::Index i, Eigen::Index j) const {
    return offsets[i] + offsets[j] + feature_sqdist(i, j);
  }
};

inline Embedding embed_negative_definite(const CostMatrix& c) {
  NegdefCertificate nd = is_negative_definite(c, 1e-9);
  if (!nd.verdict)
    throw std::domain_error("embed_negative_definite: cost is not negative definite (a^T C a = " +
                            std::to_string(nd.quadratic_value) + ")");
  Eigen::Index n = c.rows();
  Embedding e;
  e.points = n;
  e.offsets = VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) e.offsets[i] = 0.5 * c(i, i);
  // D = debiased cost = squared feature distances; Gram via base point 0.
  MatrixXd d(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) d(i, j) = c(i, j) - e.offsets[i] - e.offsets[j];
  MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) g(i, j) = 0.5 * (d(i, 0) + d(j, 0) - d(i, j));
  g = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(g);
  VectorXd ev = es.eigenvalues();
  double lo = ev.minCoeff(), hi = ev.maxCoeff();
  e.psd_residual = std::min(lo, 0.0);
  double scale = (hi > 0.0) ? hi : 1e-6;  // absolute fallback when the Gram is ~0
  if (e.psd_residual < -1e-6 * scale)
    throw std::domain_error("embed_negative_definite: not negative definite (Gram eigenvalue " +
                            std::to_string(lo) + ")");
  double keep = (hi > 0.0) ? hi * 1e-12 : kInf;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index t = 0; t < n; ++t)
    if (ev[t] > keep) cols.push_back(t);
  e.rank = static_cast<Eigen::Index>(cols.size());
  e.features = MatrixXd(n, e.rank);
  for (Eigen::Index t = 0; t < e.rank; ++t)
    e.features.col(t) = es.eigenvectors().col(cols[static_cast<std::size_t>(t)]) *
                        std::sqrt(ev[cols[static_cast<std::size_t>(t)]]);
  return e;
}

// ---------------------------------------------------------------------------
// Monte-Carlo Gaussian-feature factorization of exp(-c/eps):
// rho_eps(i,z) = exp(sqrt(2/eps)<phi_i,z> - (2/eps)|phi_i|^2 - s_i/eps),
// with z standard Gaussian, satisfies E[rho(i,z) rho(j,z)] = exp(-c(i,j)/eps).

struct McKernelEstimate {
  MatrixXd estimate;
  MatrixXd stderrs;  // per-entry standard error of the mean
  std::size_t n_samples;
  std::uint64_t seed;
};

inline McKernelEstimate gaussian_features_mc(const Embedding& e, double epsilon,
                                             std::size_t n_samples, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("gaussian_features_mc: epsilon must be positive");
  if (n_samples == 0) throw std::invalid_argument("gaussian_features_mc: n_samples must be positive");
  Eigen::Index n = e.points;
  MatrixXd sum = MatrixXd::Zero(n, n), sumsq = MatrixXd::Zero(n, n);
  Rng rng = Rng(seed).stream("gaussian_features_mc");
  VectorXd z(e.rank), rho(n);
  VectorXd base(n);
  for (Eigen::Index i = 0; i < n; ++i)
    base[i] = -(2.0 / epsilon) * e.features.row(i).squaredNorm() - e.offsets[i] / epsilon;
  double scale = std::sqrt(2.0 / epsilon);
  for (std::size_t t = 0; t < n_samples; ++t) {
    for (Eigen::Index d = 0; d < e.rank; ++d) z[d] = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i)
      rho[i] = std::exp(scale * (e.rank ? e.features.row(i).dot(z) : 0.0) + base[i]);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        double v = rho[i] * rho[j];
        sum(i, j) += v;
        sumsq(i, j) += v * v;
      }
  }
  McKernelEstimate out;
  out.n_samples = n_samples;
  out.seed = seed;
  out.estimate = sum / double(n_samples);
  out.stderrs = MatrixXd::Zero(n, n);
  if (n_samples > 1) {
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        double var = (sumsq(i, j) - sum(i, j) * sum(i, j) / double(n_samples)) /
                     (double(n_samples) - 1.0);
        out.stderrs(i, j) = std::sqrt(std::max(var, 0.0) / double(n_samples));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Log-sum-exp cost: c_{eps,lambda}(i,j) = -eps log sum_z lambda_z
// exp(-(psi(i,z)+psi(j,z))/eps), evaluated with a rowpair max shift.

namespace detail {
inline double lse_cost_entry(const MatrixXd& psi_a, Eigen::Index i, const MatrixXd& psi_b,
                             Eigen::Index j, const VectorXd& lambda, double epsilon) {
  double m = -kInf;
  for (Eigen::Index z = 0; z < lambda.size(); ++z) {
    if (lambda[z] <= 0.0) continue;
    double s = add_ext(psi_a(i, z), psi_b(j, z));
    if (s == kInf) continue;
    double a = -s / epsilon;
    if (a > m) m = a;
  }
  if (m == -kInf) return kInf;  // no effective mass for this pair
  double acc = 0.0;
  for (Eigen::Index z = 0; z < lambda.size(); ++z) {
    if (lambda[z] <= 0.0) continue;
    double s = add_ext(psi_a(i, z), psi_b(j, z));
    if (s == kInf) continue;
    acc += lambda[z] * std::exp(-s / epsilon - m);
  }
  return -epsilon * (m + std::log(acc));
}
}  // namespace detail

inline CostMatrix lse_cost(const InfRepresentation& psi, const VectorXd& lambda_weights,
                           double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("lse_cost: epsilon must be positive");
  if (lambda_weights.size() != psi.z_size())
    throw std::invalid_argument("lse_cost: lambda length must match Z");
  for (Eigen::Index z = 0; z < lambda_weights.size(); ++z)
    if (!(lambda_weights[z] >= 0.0) || !std::isfinite(lambda_weights[z]))
      throw std::invalid_argument("lse_cost: lambda weights must be finite and >= 0");
  Eigen::Index n = psi.x_size();
  MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double v = detail::lse_cost_entry(psi.table(), i, psi.table(), j, lambda_weights, epsilon);
      out(i, j) = v;
      out(j, i) = v;
    }
  return CostMatrix::symmetric(std::move(out));
}

// Rectangular variant for two side tables (barycentric decompositions with
// different endpoint costs); rows index psi_a's support, columns psi_b's.
inline CostMatrix lse_cost_pair(const MatrixXd& psi_a, const MatrixXd& psi_b,
                                const VectorXd& lambda_weights, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("lse_cost_pair: epsilon must be positive");
  if (psi_a.cols() != psi_b.cols() || psi_a.cols() != lambda_weights.size())
    throw std::invalid_argument("lse_cost_pair: Z-axis sizes differ");
  MatrixXd out(psi_a.rows(), psi_b.rows());
  for (Eigen::Index i = 0; i < psi_a.rows(); ++i)
    for (Eigen::Index j = 0; j < psi_b.rows(); ++j)
      out(i, j) = detail::lse_cost_entry(psi_a, i, psi_b, j, lambda_weights, epsilon);
  return CostMatrix::general(std::move(out));
}

// ---------------------------------------------------------------------------

struct MeanEmbeddingGrams {
  double norm2_a;
  double norm2_b;
  double inner_ab;
};

inline MeanEmbeddingGrams mean_embedding_grams(const KernelMatrix& k, const VectorXd& a,
                                               const VectorXd& b) {
  if (a.size() != k.size() || b.size() != k.size())
    throw std::invalid_argument("mean_embedding_grams: weight lengths must match the kernel");
  return {a.dot(k.matrix() * a), b.dot(k.matrix() * b), a.dot(k.matrix() * b)};
}

// ---------------------------------------------------------------------------
// Lemma-style check: c = -eps log k is debiasable iff
// k(i,i) k(j,j) >= k(i,j)^2; both sides evaluated independently.

struct LogKernelDebiasCheck {
  bool debiasable_verdict;  // via is_debiasable on -eps log k
  bool kernel_verdict;      // via the kernel inequality
  bool agree;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> witness;
};

inline LogKernelDebiasCheck log_kernel_debias_check(const KernelMatrix& k, double epsilon,
                                                    bool strict = false) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("log_kernel_debias_check: epsilon must be positive");
  Eigen::Index n = k.size();
  MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      c(i, j) = (k(i, j) == 0.0) ? kInf : -epsilon * std::log(k(i, j));
  // Exact symmetry of c from symmetric k.
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) c(j, i) = c(i, j);
  DebiasCertificate dc = is_debiasable(CostMatrix::symmetric(std::move(c)), strict, 1e-12);

  bool kv = true;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> witness;
  for (Eigen::Index i = 0; i < n && kv; ++i)
    for (Eigen::Index j = 0; j < n && kv; ++j) {
      double lhs = k(i, i) * k(j, j), rhs = k(i, j) * k(i, j);
      double slack = 1e-12 * std::max(1.0, std::max(lhs, rhs));
      bool bad = strict && i != j ? !(lhs > rhs + slack) : lhs < rhs - slack;
      if (bad) {
        kv = false;
        witness = {i, j};
      }
    }
  if (!dc.verdict && !witness) witness = dc.witness;
  return {dc.verdict, kv, dc.verdict == kv, witness};
}

}  // namespace otd
