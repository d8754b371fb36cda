#pragma once

// Cost matrices over (-inf, +inf], the debiasing transform, (strict)
// debiasability certificates, constructive inf-representations, and the
// debiasability-preserving combinators.

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

class CostMatrix {
 public:
  explicit CostMatrix(MatrixXd entries, bool symmetric = true)
      : m_(std::move(entries)), symmetric_(symmetric) {
    if (m_.rows() < 1 || m_.cols() < 1) throw std::invalid_argument("CostMatrix: empty matrix");
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      for (Eigen::Index j = 0; j < m_.cols(); ++j) check_extreal(m_(i, j), "CostMatrix");
    if (symmetric_) {
      if (m_.rows() != m_.cols())
        throw std::invalid_argument("CostMatrix: symmetric flag requires a square matrix");
      for (Eigen::Index i = 0; i < m_.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m_.cols(); ++j)
          if (!(m_(i, j) == m_(j, i)))
            throw std::invalid_argument("CostMatrix: symmetric flag but entries differ at (" +
                                        std::to_string(i) + "," + std::to_string(j) + ")");
    }
  }

  static CostMatrix symmetric(MatrixXd m) { return CostMatrix(std::move(m), true); }
  static CostMatrix general(MatrixXd m) { return CostMatrix(std::move(m), false); }

  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  const MatrixXd& matrix() const { return m_; }
  bool is_symmetric() const { return symmetric_; }

  void require_symmetric(const char* op) const {
    if (!symmetric_) throw std::invalid_argument(std::string(op) + ": cost must be symmetric");
  }

 private:
  MatrixXd m_;
  bool symmetric_;
};

// ---------------------------------------------------------------------------
// Debiasing. The normative rule inf - inf = +inf applies when c(i,j) = +inf;
// a finite entry whose diagonal partner is infinite would debias to -inf,
// which the extended-real domain forbids, so that case is rejected.

// c0(i,j) = c(i,j) - c(i,i)/2 - c(j,j)/2 as an extended real, without ever
// forming inf - inf.
inline double debiased_entry(const CostMatrix& c, Eigen::Index i, Eigen::Index j) {
  double cij = c(i, j);
  if (cij == kInf) return kInf;
  double di = c(i, i), dj = c(j, j);
  if (di == kInf || dj == kInf) return -kInf;  // flagged by callers, never stored
  // Group the self-costs first: addition commutes, so the entry is bitwise
  // identical for (i,j) and (j,i) and the symmetric invariant survives.
  return cij - (0.5 * di + 0.5 * dj);
}

inline CostMatrix debias(const CostMatrix& c) {
  c.require_symmetric("debias");
  MatrixXd out(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      double v = debiased_entry(c, i, j);
      if (v == -kInf)
        throw std::domain_error("debias: finite entry with infinite self-cost at (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
      out(i, j) = (i == j && v != kInf) ? 0.0 : v;
    }
  return CostMatrix::symmetric(std::move(out));
}

struct DebiasCertificate {
  bool verdict;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> witness;  // most negative c0, lex ties
  double worst_value;  // the witnessed c0 value (or the minimal off-diagonal c0 when strict)
};

// Debiasable  <=>  c0 >= -tol everywhere; strict additionally demands
// c0 > tol off the diagonal. Scans use the subtraction-free comparison so
// +inf diagonals never produce NaN.
inline DebiasCertificate is_debiasable(const CostMatrix& c, bool strict = false,
                                       double tol = 0.0) {
  c.require_symmetric("is_debiasable");
  DebiasCertificate cert{true, std::nullopt, kInf};
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      double v = debiased_entry(c, i, j);
      bool violating = (v < -tol) || (strict && i != j && !(v > tol));
      if (violating && v < cert.worst_value) {  // lex order wins ties via strict <
        cert.verdict = false;
        cert.worst_value = v;
        cert.witness = {i, j};
      }
    }
  if (cert.verdict) cert.worst_value = 0.0;
  return cert;
}

// ---------------------------------------------------------------------------
// Inf-representations: c(x,y) = min_z psi(x,z) + psi(y,z).

class InfRepresentation {
 public:
  explicit InfRepresentation(MatrixXd psi) : psi_(std::move(psi)) {
    if (psi_.rows() < 1 || psi_.cols() < 1)
      throw std::invalid_argument("InfRepresentation: empty table");
    for (Eigen::Index i = 0; i < psi_.rows(); ++i)
      for (Eigen::Index z = 0; z < psi_.cols(); ++z) check_extreal(psi_(i, z), "InfRepresentation");
  }

  Eigen::Index x_size() const { return psi_.rows(); }
  Eigen::Index z_size() const { return psi_.cols(); }
  double operator()(Eigen::Index x, Eigen::Index z) const { return psi_(x, z); }
  const MatrixXd& table() const { return psi_; }

 private:
  MatrixXd psi_;
};

inline CostMatrix eval_inf_rep(const InfRepresentation& rep) {
  Eigen::Index n = rep.x_size(), nz = rep.z_size();
  MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double best = kInf;
      for (Eigen::Index z = 0; z < nz; ++z) {
        double v = add_ext(rep(i, z), rep(j, z));
        if (v < best) best = v;
      }
      out(i, j) = best;
      out(j, i) = best;
    }
  return CostMatrix::symmetric(std::move(out));
}

// The constructive representation over Z = ordered pairs (u,v), indexed
// u*n+v: psi(x,(x,v)) = c(x,x)/2, psi(x,(u,x)) = c(x,u) - c(u,u)/2, else
// +inf. Both finite z-columns of a pair (x,y) sum to c(x,y) exactly.
inline InfRepresentation constructive_inf_rep(const CostMatrix& c) {
  c.require_symmetric("constructive_inf_rep");
  DebiasCertificate cert = is_debiasable(c);
  if (!cert.verdict)
    throw std::domain_error("constructive_inf_rep: cost is not debiasable; witness (" +
                            std::to_string(cert.witness->first) + "," +
                            std::to_string(cert.witness->second) + ") with debiased value " +
                            std::to_string(cert.worst_value));
  Eigen::Index n = c.rows();
  MatrixXd psi = MatrixXd::Constant(n, n * n, kInf);
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index v = 0; v < n; ++v)
      if (c(x, x) < kInf) psi(x, x * n + v) = 0.5 * c(x, x);
    for (Eigen::Index u = 0; u < n; ++u) {
      if (u == x) continue;  // the (x,x) column already holds c(x,x)/2
      // Debiasability forces c(x,u) = +inf whenever c(u,u) = +inf, so this
      // difference never reaches -inf.
      if (c(x, u) < kInf) psi(x, u * n + x) = c(x, u) - 0.5 * c(u, u);
    }
  }
  return InfRepresentation(std::move(psi));
}

struct StrictCertificate {
  bool verdict;
  std::optional<std::pair<Eigen::Index, Eigen::Index>> witness;  // (i,j) with intersecting argmins
};

// Strictness via minimizer sets: strict iff the diagonal argmin sets
// Z_{i,i} and Z_{j,j} are disjoint for every i != j.
inline StrictCertificate strict_via_minimizer_sets(const InfRepresentation& rep,
                                                   double tol = 1e-9) {
  Eigen::Index n = rep.x_size(), nz = rep.z_size();
  std::vector<std::vector<bool>> argmin(static_cast<std::size_t>(n),
                                        std::vector<bool>(static_cast<std::size_t>(nz), false));
  for (Eigen::Index i = 0; i < n; ++i) {
    double best = kInf;
    for (Eigen::Index z = 0; z < nz; ++z) {
      double v = add_ext(rep(i, z), rep(i, z));
      if (v < best) best = v;
    }
    if (best == kInf) continue;  // no attainment; the set stays empty
    for (Eigen::Index z = 0; z < nz; ++z) {
      double v = add_ext(rep(i, z), rep(i, z));
      if (v <= best + tol) argmin[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] = true;
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      for (Eigen::Index z = 0; z < nz; ++z)
        if (argmin[static_cast<std::size_t>(i)][static_cast<std::size_t>(z)] &&
            argmin[static_cast<std::size_t>(j)][static_cast<std::size_t>(z)])
          return {false, std::make_pair(i, j)};
  return {true, std::nullopt};
}

// ---------------------------------------------------------------------------
// Debiasability-preserving combinators.

inline void require_same_shape(const CostMatrix& a, const CostMatrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(op) + ": inputs must share one support");
}

inline CostMatrix sum_costs(const std::vector<CostMatrix>& cs,
                            const std::vector<double>& coefficients) {
  if (cs.empty()) throw std::invalid_argument("sum_costs: empty list");
  if (cs.size() != coefficients.size())
    throw std::invalid_argument("sum_costs: one coefficient per cost required");
  for (double a : coefficients)
    if (!(a >= 0.0) || !std::isfinite(a))
      throw std::invalid_argument("sum_costs: coefficients must be finite and >= 0");
  bool sym = true;
  for (const auto& c : cs) {
    require_same_shape(cs.front(), c, "sum_costs");
    sym = sym && c.is_symmetric();
  }
  MatrixXd out = MatrixXd::Zero(cs.front().rows(), cs.front().cols());
  for (std::size_t t = 0; t < cs.size(); ++t) {
    if (coefficients[t] == 0.0) continue;  // 0 * (+inf) contributes nothing
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        out(i, j) = add_ext(out(i, j), coefficients[t] * cs[t](i, j));
  }
  return CostMatrix(std::move(out), sym);
}

inline CostMatrix inf_costs(const std::vector<CostMatrix>& cs) {
  if (cs.empty()) throw std::invalid_argument("inf_costs: empty list (the index set is nonempty)");
  bool sym = true;
  for (const auto& c : cs) {
    require_same_shape(cs.front(), c, "inf_costs");
    sym = sym && c.is_symmetric();
  }
  MatrixXd out = cs.front().matrix();
  for (std::size_t t = 1; t < cs.size(); ++t)
    out = out.cwiseMin(cs[t].matrix());
  return CostMatrix(std::move(out), sym);
}

inline CostMatrix shift_by_g(const CostMatrix& c, const VectorXd& g) {
  if (g.size() != c.rows() || c.rows() != c.cols())
    throw std::invalid_argument("shift_by_g: g must match a square support");
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (!std::isfinite(g[i])) throw std::invalid_argument("shift_by_g: g must be finite");
  MatrixXd out(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) out(i, j) = add_ext(c(i, j), g[i] + g[j]);
  return CostMatrix(std::move(out), c.is_symmetric());
}

// result(i,j) = min_{u,v} f(u,i) + f(v,j) + c(u,v).
inline CostMatrix inf_convolve(const CostMatrix& c, const CostMatrix& f) {
  require_same_shape(c, f, "inf_convolve");
  if (c.rows() != c.cols()) throw std::invalid_argument("inf_convolve: square support required");
  Eigen::Index n = c.rows();
  MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double best = kInf;
      for (Eigen::Index u = 0; u < n; ++u)
        for (Eigen::Index v = 0; v < n; ++v) {
          double t = add_ext(add_ext(f(u, i), f(v, j)), c(u, v));
          if (t < best) best = t;
        }
      out(i, j) = best;
    }
  return CostMatrix(std::move(out), c.is_symmetric());
}

// tilde_c(i,j) = min_k c(i,k) + c(k,j) - c(k,k). A midpoint k with infinite
// self-cost is unusable, so such terms are +inf. This is exactly
// eval_inf_rep of psi(x,k) = c(x,k) - c(k,k)/2, hence always debiasable.
inline CostMatrix one_step_tilde(const CostMatrix& c) {
  c.require_symmetric("one_step_tilde");
  Eigen::Index n = c.rows();
  MatrixXd psi(n, n);
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index k = 0; k < n; ++k)
      psi(x, k) = (c(k, k) == kInf || c(x, k) == kInf) ? kInf : c(x, k) - 0.5 * c(k, k);
  return eval_inf_rep(InfRepresentation(std::move(psi)));
}

}  // namespace otd
