#pragma once

// Debiased quantities assembled from solver outputs: the entropic divergence
// raw(mu,nu) - self(mu,mu)/2 - self(nu,nu)/2, its unbalanced analogue, squared
// MMD with the feature-embedding cross-checks, and the equivalence between
// negative definiteness and nonnegative MMD.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/kernels.hpp"
#include "otdebias/measures.hpp"
#include "otdebias/rng.hpp"
#include "otdebias/solvers.hpp"

namespace otd {

enum class DivergenceKind { eps0, entropic, uot, mmd };

inline const char* to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::eps0: return "eps0";
    case DivergenceKind::entropic: return "entropic";
    case DivergenceKind::uot: return "uot";
    case DivergenceKind::mmd: return "mmd";
  }
  return "unknown";
}

struct DivergenceReport {
  double raw_xy = 0.0;
  double self_xx = 0.0;
  double self_yy = 0.0;
  double debiased = 0.0;  // always raw_xy - self_xx/2 - self_yy/2, exactly
  double epsilon = 0.0;   // extended-real; kInf for the mmd kind
  double rho = 0.0;       // only meaningful for the uot kind
  double tol = 0.0;
  DivergenceKind kind = DivergenceKind::entropic;
};

namespace detail {

inline DivergenceReport make_report(double raw, double sxx, double syy, double eps, double rho,
                                    double tol, DivergenceKind kind) {
  DivergenceReport r;
  r.raw_xy = raw;
  r.self_xx = sxx;
  r.self_yy = syy;
  r.debiased = raw - sxx / 2.0 - syy / 2.0;
  r.epsilon = eps;
  r.rho = rho;
  r.tol = tol;
  r.kind = kind;
  return r;
}

}  // namespace detail

// S_eps(mu, nu): the cross term from the plain solver, the self terms from the
// damped symmetric solver (deterministic f = g structure).
inline DivergenceReport sinkhorn_divergence(const CostMatrix& c, const DiscreteMeasure& mu,
                                            const DiscreteMeasure& nu, double epsilon,
                                            double tol = 1e-9, int max_iter = 50000) {
  c.require_symmetric("sinkhorn_divergence");
  double raw = sinkhorn(c, mu, nu, epsilon, tol, max_iter).primal_value;
  double sxx = sinkhorn_symmetric(c, mu, epsilon, tol, max_iter).primal_value;
  double syy = sinkhorn_symmetric(c, nu, epsilon, tol, max_iter).primal_value;
  return detail::make_report(raw, sxx, syy, epsilon, 0.0, tol, DivergenceKind::entropic);
}

// Same recipe over unbalanced values; measures may carry arbitrary positive masses.
inline DivergenceReport debiased_uot(const CostMatrix& c, const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, double epsilon, double rho,
                                     double tol = 1e-9, int max_iter = 50000) {
  c.require_symmetric("debiased_uot");
  double raw = unbalanced_sinkhorn(c, mu, nu, epsilon, rho, tol, max_iter).value;
  double sxx = unbalanced_sinkhorn(c, mu, mu, epsilon, rho, tol, max_iter).value;
  double syy = unbalanced_sinkhorn(c, nu, nu, epsilon, rho, tol, max_iter).value;
  return detail::make_report(raw, sxx, syy, epsilon, rho, tol, DivergenceKind::uot);
}

// eps = 0 divergence from the exact oracle (desk-scale instances only).
inline DivergenceReport exact_divergence(const CostMatrix& c, const DiscreteMeasure& mu,
                                         const DiscreteMeasure& nu) {
  c.require_symmetric("exact_divergence");
  double raw = exact_ot_bruteforce(c, mu, nu).value;
  double sxx = exact_ot_bruteforce(c, mu, mu).value;
  double syy = exact_ot_bruteforce(c, nu, nu).value;
  return detail::make_report(raw, sxx, syy, 0.0, 0.0, 0.0, DivergenceKind::eps0);
}

// Squared MMD with kernel -c: -1/2 (mu-nu)^T C (mu-nu), reported through the
// same raw/self decomposition so the internal identity is exact.
inline DivergenceReport mmd_squared(const CostMatrix& c, const DiscreteMeasure& mu,
                                    const DiscreteMeasure& nu) {
  c.require_symmetric("mmd_squared");
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      if (c(i, j) == kInf) throw std::domain_error("mmd_squared: finite cost required");
  double raw = ot_infinity(c, mu, nu);
  double sxx = ot_infinity(c, mu, mu);
  double syy = ot_infinity(c, nu, nu);
  return detail::make_report(raw, sxx, syy, kInf, 0.0, 0.0, DivergenceKind::mmd);
}

// ---------------------------------------------------------------------------
// Embedding cross-checks for negative definite costs.

struct MmdEmbeddingCheck {
  double mmd_value;          // from mmd_squared
  double embedding_value;    // |m_mu - m_nu|^2 over the features
  double psi_at_minimizer;   // Psi at z* = (m_mu + m_nu)/2
  double min_psi_perturbed;  // smallest Psi over the random perturbations
};

// For negative definite c: mmd_squared equals the squared feature-mean
// distance, and z* = (m_mu + m_nu)/2 minimizes
// Psi(z) = sum_x mu_x psi(x,z) + sum_y nu_y psi(y,z),  psi(x,z) = c(x,x)/2 + 2|phi(x)-z|^2.
inline MmdEmbeddingCheck mmd_embedding_check(const CostMatrix& c, const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu, std::uint64_t seed,
                                             int n_perturbations = 50) {
  if (mu.size() != c.rows() || nu.size() != c.rows())
    throw std::invalid_argument("mmd_embedding_check: measure sizes must match the cost matrix");
  Embedding e = embed_negative_definite(c);
  Eigen::Index r = e.rank;
  VectorXd m_mu = VectorXd::Zero(r), m_nu = VectorXd::Zero(r);
  for (Eigen::Index i = 0; i < mu.size(); ++i) m_mu += mu.weight(i) * e.features.row(i).transpose();
  for (Eigen::Index i = 0; i < nu.size(); ++i) m_nu += nu.weight(i) * e.features.row(i).transpose();

  auto psi_total = [&](const VectorXd& z) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      v += mu.weight(i) *
           (e.offsets[i] + 2.0 * (e.features.row(i).transpose() - z).squaredNorm());
    for (Eigen::Index i = 0; i < nu.size(); ++i)
      v += nu.weight(i) *
           (e.offsets[i] + 2.0 * (e.features.row(i).transpose() - z).squaredNorm());
    return v;
  };

  MmdEmbeddingCheck out;
  out.mmd_value = mmd_squared(c, mu, nu).debiased;
  out.embedding_value = (m_mu - m_nu).squaredNorm();
  VectorXd z_star = 0.5 * (m_mu + m_nu);
  out.psi_at_minimizer = psi_total(z_star);
  out.min_psi_perturbed = kInf;
  Rng rng = Rng(seed).stream("mmd_embedding_check");
  double scale = std::max(1.0, std::sqrt(z_star.squaredNorm()));
  for (int t = 0; t < n_perturbations; ++t) {
    VectorXd delta(r);
    for (Eigen::Index d = 0; d < r; ++d) delta[d] = rng.normal();
    double step = scale * std::pow(10.0, rng.uniform(-3.0, 0.0));  // spans small and large moves
    out.min_psi_perturbed = std::min(out.min_psi_perturbed, psi_total(z_star + step * delta));
  }
  if (r == 0) out.min_psi_perturbed = out.psi_at_minimizer;  // nothing to perturb
  return out;
}

// ---------------------------------------------------------------------------
// Negative definiteness <-> nonnegative MMD, both directions at desk scale.

struct NegdefMmdCertificate {
  NegdefCertificate negdef;
  bool forward_checked = false;   // negdef held: random trials all nonnegative
  double min_mmd = kInf;          // smallest debiased MMD over the trials
  bool witness_produced = false;  // negdef failed: explicit negative pair built
  VectorXd witness_mu, witness_nu;
  double witness_mmd = 0.0;
  bool consistent = false;
};

inline NegdefMmdCertificate negdef_iff_mmd_nonneg(const CostMatrix& c, int n_trials,
                                                  std::uint64_t seed) {
  c.require_symmetric("negdef_iff_mmd_nonneg");
  NegdefMmdCertificate out;
  out.negdef = is_negative_definite(c);
  Eigen::Index n = c.rows();
  if (out.negdef.verdict) {
    Rng rng = Rng(seed).stream("negdef_iff_mmd_nonneg");
    auto random_probability = [&]() {
      std::vector<double> w = rng.dirichlet1(static_cast<std::size_t>(n));
      return DiscreteMeasure::probability(
          Eigen::Map<const VectorXd>(w.data(), static_cast<Eigen::Index>(w.size())));
    };
    for (int t = 0; t < n_trials; ++t) {
      DiscreteMeasure a = random_probability();
      DiscreteMeasure b = random_probability();
      out.min_mmd = std::min(out.min_mmd, mmd_squared(c, a, b).debiased);
    }
    out.forward_checked = true;
    out.consistent = out.min_mmd >= -1e-10;
  } else {
    // Split the violating zero-sum vector by sign and normalize each part.
    const VectorXd& a = out.negdef.worst_vector;
    VectorXd pos = a.cwiseMax(0.0), neg = (-a).cwiseMax(0.0);
    double mp = pos.sum(), mn = neg.sum();
    if (mp <= 0.0 || mn <= 0.0)
      throw std::domain_error("negdef_iff_mmd_nonneg: degenerate spectral witness");
    out.witness_mu = pos / mp;
    out.witness_nu = neg / mn;
    out.witness_mmd = mmd_squared(c, DiscreteMeasure::probability(out.witness_mu),
                                  DiscreteMeasure::probability(out.witness_nu))
                          .debiased;
    out.witness_produced = true;
    out.consistent = out.witness_mmd < 0.0;
  }
  return out;
}

}  // namespace otd
