#pragma once

// Decomposition formulas for entropic OT over log-sum-exp costs: the
// barycentric alternating solver and its value identity, Gaussian/Euclidean
// closed-form checks, entropic displacement interpolation, the eps = 0
// inf-representation bound, the RKHS saddle-value identity, and the
// Monte-Carlo log-sum-exp roundtrip for negative definite costs.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/kernels.hpp"
#include "otdebias/measures.hpp"
#include "otdebias/rng.hpp"
#include "otdebias/solvers.hpp"

namespace otd {

struct BarycenterSolution {
  DiscreteMeasure eta;                  // barycentric measure on the Z grid
  double value;                         // side_values sum + kl_term
  std::pair<double, double> side_values;  // (OT_psi(mu, eta), OT_psi(nu, eta))
  double kl_term;                       // eps * KL(eta | lambda)
  int iterations;
  double fixed_point_residual;          // L1 gap between eta and its Gibbs update at exit
  double direct_value;                  // sinkhorn over the collapsed lse cost
  double value_gap;                     // |value - direct| / max(1, |direct|)
  bool identity_ok;                     // value_gap <= 1e-6
  std::vector<double> objective_trace;  // objective once per outer iteration
};

// Alternating solver for min_eta OT(mu,eta) + OT(nu,eta) + eps KL(eta|lambda)
// with possibly different side tables. Each outer step solves both inner
// problems, then moves eta toward the Gibbs target
//   log eta <- (1-theta) log eta + theta (log lambda - (v+u)/eps) - normalizer.
// Every theta > 0 has the same fixed points (the optimality condition
// d eta/d lambda ~ exp(-(v+u)/eps)); the full substitution theta = 1 can
// two-cycle, so theta backtracks whenever the objective fails to decrease.
// The iteration stops when eta is within tol (L1) of its own Gibbs target.
inline BarycenterSolution barycenter_decompose(const MatrixXd& psi_mu, const MatrixXd& psi_nu,
                                               const DiscreteMeasure& lambda,
                                               const DiscreteMeasure& mu,
                                               const DiscreteMeasure& nu, double epsilon,
                                               double tol = 1e-9, int max_iter = 2000) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("barycenter_decompose: epsilon must be positive");
  Eigen::Index k = lambda.size();
  if (psi_mu.cols() != k || psi_nu.cols() != k)
    throw std::invalid_argument("barycenter_decompose: side tables must share lambda's Z axis");
  if (psi_mu.rows() != mu.size() || psi_nu.rows() != nu.size())
    throw std::invalid_argument("barycenter_decompose: side tables must match the measures");
  detail::check_probability(lambda, "barycenter_decompose");
  detail::check_probability(mu, "barycenter_decompose");
  detail::check_probability(nu, "barycenter_decompose");
  CostMatrix ca = CostMatrix::general(psi_mu);
  CostMatrix cb = CostMatrix::general(psi_nu);
  for (Eigen::Index z = 0; z < k; ++z) {
    if (lambda.weight(z) <= 0.0) continue;
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      if (mu.weight(i) > 0.0 && ca(i, z) == kInf)
        throw std::domain_error("barycenter_decompose: side table infinite on the support");
    for (Eigen::Index i = 0; i < nu.size(); ++i)
      if (nu.weight(i) > 0.0 && cb(i, z) == kInf)
        throw std::domain_error("barycenter_decompose: side table infinite on the support");
  }

  VectorXd log_lambda = detail::log_weights(lambda.weights());
  VectorXd log_eta = log_lambda;  // start from eta = lambda
  double inner_tol = std::min(0.01 * tol, 1e-10);  // keep inner noise below the outer tol

  auto eta_measure = [&](const VectorXd& le) {
    VectorXd w(k);
    for (Eigen::Index z = 0; z < k; ++z) w[z] = le[z] == -kInf ? 0.0 : std::exp(le[z]);
    double s = w.sum();
    if (!(s > 0.0)) throw std::domain_error("barycenter_decompose: empty effective support");
    w /= s;
    return DiscreteMeasure::probability(
        std::move(w), lambda.has_coordinates() ? std::optional<MatrixXd>(lambda.coordinates())
                                               : std::nullopt);
  };

  // Normalized convex combination (1-theta) log_eta + theta log_target.
  auto mix_logs = [&](const VectorXd& le, const VectorXd& lt, double theta) {
    VectorXd out(k);
    for (Eigen::Index z = 0; z < k; ++z)
      out[z] = (le[z] == -kInf || lt[z] == -kInf)
                   ? -kInf  // eta << lambda structurally
                   : (1.0 - theta) * le[z] + theta * lt[z];
    std::vector<double> finite;
    for (Eigen::Index z = 0; z < k; ++z)
      if (out[z] != -kInf) finite.push_back(out[z]);
    double norm = logsumexp(finite);
    if (norm == -kInf)
      throw std::domain_error("barycenter_decompose: empty effective support");
    for (Eigen::Index z = 0; z < k; ++z)
      if (out[z] != -kInf) out[z] -= norm;
    return out;
  };

  // One objective/target evaluation at a given log eta.
  struct Probe {
    DiscreteMeasure eta;
    double side_a, side_b, kl_term, value;
    VectorXd log_target;  // normalized Gibbs target log lambda - (v+u)/eps
    double residual;      // L1 gap between eta and that target
  };
  auto probe = [&](const VectorXd& log_e) {
    Probe p{eta_measure(log_e), 0.0, 0.0, 0.0, 0.0, VectorXd(k), 0.0};
    SinkhornSolution sa = sinkhorn(ca, mu, p.eta, epsilon, inner_tol);
    SinkhornSolution sb = sinkhorn(cb, nu, p.eta, epsilon, inner_tol);
    p.side_a = sa.primal_value;
    p.side_b = sb.primal_value;
    p.kl_term = epsilon * kl_divergence(p.eta.weights(), lambda.weights());
    p.value = p.side_a + p.side_b + p.kl_term;
    for (Eigen::Index z = 0; z < k; ++z)
      p.log_target[z] =
          log_lambda[z] == -kInf ? -kInf : log_lambda[z] - (sa.g[z] + sb.g[z]) / epsilon;
    p.log_target = mix_logs(p.log_target, p.log_target, 1.0);  // normalize
    p.residual = (eta_measure(p.log_target).weights() - p.eta.weights()).cwiseAbs().sum();
    return p;
  };

  std::vector<double> trace;
  int iterations = 0;
  double residual = kInf;
  DiscreteMeasure eta = eta_measure(log_eta);
  double side_a = 0.0, side_b = 0.0, kl_term = 0.0;
  double theta = 0.5;
  double best_value = kInf;
  VectorXd best_log_eta = log_eta, best_target = log_eta;
  std::vector<VectorXd> hist;  // recent accepted iterates, for extrapolation
  int cooldown = 0;
  bool converged = false;
  for (int it = 1; it <= max_iter; ++it) {
    Probe p = probe(log_eta);
    iterations = it;
    residual = p.residual;

    if (it > 1 && p.value > best_value + 1e-12) {
      // Objective went up: retry from the best accepted eta with a smaller step.
      theta *= 0.5;
      if (theta < 1e-6)
        throw ConvergenceError("barycenter_decompose: step collapsed before convergence",
                               residual);
      log_eta = mix_logs(best_log_eta, best_target, theta);
      hist.clear();
      continue;
    }

    eta = p.eta;
    side_a = p.side_a;
    side_b = p.side_b;
    kl_term = p.kl_term;
    trace.push_back(p.value);
    if (residual <= tol) {  // eta sits on its own Gibbs update
      converged = true;
      break;
    }
    best_value = p.value;
    best_log_eta = log_eta;
    best_target = p.log_target;

    // Estimate the dominant contraction factor of the damped map from the
    // last three iterates (Rayleigh quotient of successive differences).
    hist.push_back(log_eta);
    if (hist.size() > 3) hist.erase(hist.begin());
    ++cooldown;
    double rhat = 0.0;
    if (hist.size() == 3) {
      double den = 0.0, num = 0.0;
      for (Eigen::Index z = 0; z < k; ++z) {
        if (log_lambda[z] == -kInf) continue;
        double d1 = hist[1][z] - hist[0][z];
        double d2 = hist[2][z] - hist[1][z];
        den += d1 * d1;
        num += d2 * d1;
      }
      rhat = den > 0.0 ? num / den : 0.0;
    }

    if (rhat < -0.5) {
      // Oscillatory (possibly unstable) mode: retune theta so the damped map
      // annihilates it.  The mode factor is 1 - theta + theta*J, so stepping
      // theta -> theta / (1 - rhat) maps it to zero exactly.
      theta = std::min(std::max(theta / (1.0 - rhat), 1e-4), 0.5);
      hist.clear();
      cooldown = 0;
    } else if (rhat > 0.2 && rhat < 0.99995 && cooldown >= 8) {
      // Slow positive mode: try the Aitken jump to the geometric-series limit.
      // The jump is kept only when it strictly shrinks the fixed-point
      // residual without raising the objective.
      cooldown = 0;
      double gain = rhat / (1.0 - rhat);
      VectorXd cand(k);
      for (Eigen::Index z = 0; z < k; ++z)
        cand[z] =
            log_lambda[z] == -kInf ? -kInf : hist[2][z] + gain * (hist[2][z] - hist[1][z]);
      cand = mix_logs(cand, cand, 1.0);
      Probe pc = probe(cand);
      if (pc.residual < residual && pc.value <= best_value + 1e-12) {
        log_eta = cand;
        best_value = pc.value;
        best_log_eta = cand;
        best_target = pc.log_target;
        hist.clear();
        continue;  // re-probe from the accelerated point
      }
    }

    log_eta = mix_logs(log_eta, p.log_target, theta);
  }
  if (!converged)
    throw ConvergenceError("barycenter_decompose: max_iter exceeded", residual);

  double value = side_a + side_b + kl_term;
  CostMatrix collapsed = lse_cost_pair(psi_mu, psi_nu, lambda.weights(), epsilon);
  double direct = sinkhorn(collapsed, mu, nu, epsilon, inner_tol).primal_value;
  double gap = std::abs(value - direct) / std::max(1.0, std::abs(direct));
  return {eta,    value,    {side_a, side_b},        kl_term, iterations,
          residual, direct, gap,     gap <= 1e-6, std::move(trace)};
}

// Single-table overload: the same psi on both sides (symmetric lse cost).
inline BarycenterSolution barycenter_decompose(const MatrixXd& psi, const DiscreteMeasure& lambda,
                                               const DiscreteMeasure& mu,
                                               const DiscreteMeasure& nu, double epsilon,
                                               double tol = 1e-9, int max_iter = 2000) {
  return barycenter_decompose(psi, psi, lambda, mu, nu, epsilon, tol, max_iter);
}

// ---------------------------------------------------------------------------
// Uniform tensor grids used for quadrature and for the Lebesgue-like lambda.

struct GridSpec {
  VectorXd lo, hi;               // per-axis bounds
  Eigen::Index points_per_axis;  // midpoint-rule nodes per axis
};

// Midpoint-rule nodes (rows) and the common cell volume.
inline std::pair<MatrixXd, double> tensor_grid(const GridSpec& g) {
  Eigen::Index d = g.lo.size();
  if (d < 1 || g.hi.size() != d) throw std::invalid_argument("tensor_grid: bad axis bounds");
  if (g.points_per_axis < 1)
    throw std::invalid_argument("tensor_grid: points_per_axis must be >= 1");
  VectorXd step(d);
  double volume = 1.0;
  for (Eigen::Index a = 0; a < d; ++a) {
    if (!(g.hi[a] > g.lo[a])) throw std::invalid_argument("tensor_grid: hi must exceed lo");
    step[a] = (g.hi[a] - g.lo[a]) / double(g.points_per_axis);
    volume *= step[a];
  }
  Eigen::Index n = 1;
  for (Eigen::Index a = 0; a < d; ++a) n *= g.points_per_axis;
  MatrixXd nodes(n, d);
  for (Eigen::Index idx = 0; idx < n; ++idx) {
    Eigen::Index rem = idx;
    for (Eigen::Index a = d - 1; a >= 0; --a) {
      Eigen::Index pos = rem % g.points_per_axis;
      rem /= g.points_per_axis;
      nodes(idx, a) = g.lo[a] + (double(pos) + 0.5) * step[a];
    }
  }
  return {std::move(nodes), volume};
}

struct GaussianIdentityCheck {
  double lhs;  // quadrature of exp(-(2|z-x|^2 + 2|z-y|^2)/eps) dz
  double rhs;  // exp(-|x-y|^2/eps) * (pi eps / 4)^{d/2}
  double relative_error;
  double quadrature_error_bound;
};

inline GaussianIdentityCheck gaussian_identity_check(const VectorXd& x, const VectorXd& y,
                                                     double epsilon, const GridSpec& grid) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("gaussian_identity_check: epsilon must be positive");
  Eigen::Index d = x.size();
  if (y.size() != d || grid.lo.size() != d)
    throw std::invalid_argument("gaussian_identity_check: dimension mismatch");
  double margin = 5.0 * std::sqrt(epsilon);
  for (Eigen::Index a = 0; a < d; ++a) {
    double lo = std::min(x[a], y[a]) - margin, hi = std::max(x[a], y[a]) + margin;
    if (grid.lo[a] > lo + 1e-12 || grid.hi[a] < hi - 1e-12)
      throw std::invalid_argument(
          "gaussian_identity_check: grid must cover 5 sqrt(eps) around both points");
  }
  auto [nodes, volume] = tensor_grid(grid);
  double lhs = 0.0;
  for (Eigen::Index t = 0; t < nodes.rows(); ++t) {
    VectorXd z = nodes.row(t).transpose();
    lhs += std::exp(-(2.0 * (z - x).squaredNorm() + 2.0 * (z - y).squaredNorm()) / epsilon);
  }
  lhs *= volume;
  double rhs =
      std::exp(-(x - y).squaredNorm() / epsilon) * std::pow(kPi * epsilon / 4.0, double(d) / 2.0);
  double max_step = 0.0;
  for (Eigen::Index a = 0; a < d; ++a)
    max_step = std::max(max_step, (grid.hi[a] - grid.lo[a]) / double(grid.points_per_axis));
  double fine = std::sqrt(epsilon) / 20.0;
  double bound = 1e-6 * std::max(1.0, (max_step / fine) * (max_step / fine));
  return {lhs, rhs, std::abs(lhs - rhs) / rhs, bound};
}

// ---------------------------------------------------------------------------
// Entropic displacement interpolation between Dirac endpoints: side costs
// |z-x|^2/t and |z-y|^2/(1-t); eta_t is Gaussian-like with mean (1-t)x + t y
// and per-axis sigma sqrt(eps t (1-t) / 2) up to grid error.

struct InterpolationRecord {
  double t;
  DiscreteMeasure eta;
  VectorXd mean, stddev;
  VectorXd mean_target;
  double std_target;
};

inline double interpolation_std_target(double epsilon, double t) {
  return std::sqrt(epsilon * t * (1.0 - t) / 2.0);
}

inline std::vector<InterpolationRecord> entropic_interpolation(
    const VectorXd& x, const VectorXd& y, double epsilon, const std::vector<double>& t_values,
    const GridSpec& grid, double tol = 1e-9, int max_iter = 2000) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("entropic_interpolation: epsilon must be positive");
  Eigen::Index d = x.size();
  if (y.size() != d || grid.lo.size() != d)
    throw std::invalid_argument("entropic_interpolation: dimension mismatch");
  auto [nodes, volume] = tensor_grid(grid);
  (void)volume;  // uniform probability lambda; Lebesgue scaling shifts KL by a constant
  DiscreteMeasure lambda =
      DiscreteMeasure::uniform(static_cast<std::size_t>(nodes.rows()), nodes);
  DiscreteMeasure mu = DiscreteMeasure::probability(VectorXd::Ones(1), MatrixXd(x.transpose()));
  DiscreteMeasure nu = DiscreteMeasure::probability(VectorXd::Ones(1), MatrixXd(y.transpose()));
  std::vector<InterpolationRecord> out;
  for (double t : t_values) {
    if (!(t > 0.0 && t < 1.0))
      throw std::invalid_argument("entropic_interpolation: t values must lie in (0,1)");
    MatrixXd psi_mu(1, nodes.rows()), psi_nu(1, nodes.rows());
    for (Eigen::Index z = 0; z < nodes.rows(); ++z) {
      psi_mu(0, z) = (nodes.row(z).transpose() - x).squaredNorm() / t;
      psi_nu(0, z) = (nodes.row(z).transpose() - y).squaredNorm() / (1.0 - t);
    }
    BarycenterSolution sol =
        barycenter_decompose(psi_mu, psi_nu, lambda, mu, nu, epsilon, tol, max_iter);
    VectorXd mean = VectorXd::Zero(d), var = VectorXd::Zero(d);
    for (Eigen::Index z = 0; z < nodes.rows(); ++z)
      mean += sol.eta.weight(z) * nodes.row(z).transpose();
    for (Eigen::Index z = 0; z < nodes.rows(); ++z)
      var += sol.eta.weight(z) *
             (nodes.row(z).transpose() - mean).cwiseAbs2();
    out.push_back({t, sol.eta, mean, var.cwiseSqrt(), (1.0 - t) * x + t * y,
                   interpolation_std_target(epsilon, t)});
  }
  return out;
}

// ---------------------------------------------------------------------------
// eps = 0: any eta gives an upper bound exact-OT(psi,mu,eta) + exact-OT(psi,nu,eta)
// on the exact OT cost; good candidates attain it.

struct OtInfrepCheck {
  double ot_value;
  double best_upper;
  double gap;  // best_upper - ot_value, >= -1e-10 always
  std::vector<double> candidate_uppers;
};

inline OtInfrepCheck ot_infrep_check(const CostMatrix& c, const MatrixXd& psi,
                                     const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                     const std::vector<DiscreteMeasure>& candidate_etas) {
  c.require_symmetric("ot_infrep_check");
  if (psi.rows() != c.rows())
    throw std::invalid_argument("ot_infrep_check: psi must cover the cost's support");
  if (candidate_etas.empty())
    throw std::invalid_argument("ot_infrep_check: at least one candidate eta required");
  // psi must actually inf-represent c.
  CostMatrix roundtrip = eval_inf_rep(InfRepresentation(psi));
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      double a = roundtrip(i, j), b = c(i, j);
      if (a == kInf && b == kInf) continue;
      if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
        throw std::domain_error("ot_infrep_check: psi is not an inf-representation of the cost");
    }
  OtInfrepCheck out;
  out.ot_value = exact_ot_bruteforce(c, mu, nu).value;
  out.best_upper = kInf;
  CostMatrix psi_cost = CostMatrix::general(psi);
  for (const DiscreteMeasure& eta : candidate_etas) {
    if (eta.size() != psi.cols())
      throw std::invalid_argument("ot_infrep_check: candidate eta must live on psi's Z axis");
    double upper = add_ext(exact_ot_bruteforce(psi_cost, mu, eta).value,
                           exact_ot_bruteforce(psi_cost, nu, eta).value);
    out.candidate_uppers.push_back(upper);
    out.best_upper = std::min(out.best_upper, upper);
  }
  out.gap = out.best_upper - out.ot_value;
  return out;
}

// ---------------------------------------------------------------------------
// RKHS saddle-value identity: with converged potentials, mu* = e^{f/eps} mu,
// nu* = e^{g/eps} nu and z* = (k_{mu*} + k_{nu*})/2 make the Lagrangian equal
// the entropic OT value; z* is represented by its weight vector through the
// Gram matrix.

struct SaddleCheck {
  double ot_value;
  double lagrangian_value;
  double stationarity_residual;  // Gram norm of 4 z* - 2 k_{mu*} - 2 k_{nu*}
  double m_bound;                // exp(max finite cost / eps), recorded only
};

inline SaddleCheck saddle_value_check(const CostMatrix& c, const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu, double epsilon,
                                      double tol = 1e-9, int max_iter = 50000) {
  c.require_symmetric("saddle_value_check");
  if (mu.size() != c.rows() || nu.size() != c.rows())
    throw std::invalid_argument("saddle_value_check: measures must share the cost's support");
  KernelMatrix k = gibbs_kernel(c, epsilon);
  PsdCertificate psd = is_psd(k, 1e-9);
  if (!psd.verdict)
    throw std::domain_error("saddle_value_check: Gibbs kernel is not psd (eigenvalue " +
                            std::to_string(psd.min_eigenvalue) + ")");
  SinkhornSolution s = sinkhorn(c, mu, nu, epsilon, tol, max_iter);
  Eigen::Index n = c.rows();
  VectorXd mu_star = VectorXd::Zero(n), nu_star = VectorXd::Zero(n);
  double dual_sum = 0.0;  // sum (f/eps) dmu + sum (g/eps) dnu over the support
  for (Eigen::Index i = 0; i < n; ++i) {
    if (mu.weight(i) > 0.0) {
      mu_star[i] = std::exp(s.f[i] / epsilon) * mu.weight(i);
      dual_sum += s.f[i] / epsilon * mu.weight(i);
    }
    if (nu.weight(i) > 0.0) {
      nu_star[i] = std::exp(s.g[i] / epsilon) * nu.weight(i);
      dual_sum += s.g[i] / epsilon * nu.weight(i);
    }
  }
  VectorXd w = 0.5 * (mu_star + nu_star);
  MeanEmbeddingGrams ga = mean_embedding_grams(k, w, mu_star);
  MeanEmbeddingGrams gb = mean_embedding_grams(k, w, nu_star);
  double dist_a = ga.norm2_a - 2.0 * ga.inner_ab + ga.norm2_b;  // |z* - k_{mu*}|^2
  double dist_b = gb.norm2_a - 2.0 * gb.inner_ab + gb.norm2_b;
  double lagrangian =
      epsilon * (dual_sum + dist_a + dist_b - 0.5 * ga.norm2_b - 0.5 * gb.norm2_b + 1.0);
  VectorXd r = 4.0 * w - 2.0 * mu_star - 2.0 * nu_star;  // identically zero by construction
  double residual = std::sqrt(std::max(r.dot(k.matrix() * r), 0.0));
  double cmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (c(i, j) < kInf) cmax = std::max(cmax, std::abs(c(i, j)));
  return {s.primal_value, lagrangian, residual, std::exp(cmax / epsilon)};
}

// ---------------------------------------------------------------------------
// Monte-Carlo roundtrip: the Gaussian-feature factorization of exp(-c/eps)
// yields tables psi~(i,t) = -eps log rho(i, z_t) whose lse cost under the
// uniform empirical lambda~ reproduces c as the sample count grows.

struct LseRoundtripRecord {
  double max_relative_error;  // |lse - c| / max(1, |c|), worst entry
  double max_abs_error;
  double max_stderr_units;    // |mean estimate - exp(-c/eps)| in MC stderr units
  std::size_t n_samples;
};

inline LseRoundtripRecord negdef_lse_roundtrip(const CostMatrix& c, double epsilon,
                                               std::size_t n_samples, std::uint64_t seed) {
  if (!(epsilon > 0.0))
    throw std::invalid_argument("negdef_lse_roundtrip: epsilon must be positive");
  if (n_samples == 0) throw std::invalid_argument("negdef_lse_roundtrip: n_samples must be >= 1");
  Embedding e = embed_negative_definite(c);
  Eigen::Index n = c.rows();
  Eigen::Index ns = static_cast<Eigen::Index>(n_samples);
  Rng rng = Rng(seed).stream("negdef_lse_roundtrip");
  double scale = std::sqrt(2.0 / epsilon);
  MatrixXd psi(n, ns);
  for (Eigen::Index t = 0; t < ns; ++t) {
    VectorXd z(e.rank);
    for (Eigen::Index a = 0; a < e.rank; ++a) z[a] = rng.normal();
    for (Eigen::Index i = 0; i < n; ++i) {
      double dot = e.rank > 0 ? e.features.row(i).dot(z.transpose()) : 0.0;
      psi(i, t) = -epsilon * scale * dot + 2.0 * e.features.row(i).squaredNorm() + e.offsets[i];
    }
  }
  VectorXd lambda = VectorXd::Constant(ns, 1.0 / double(ns));
  CostMatrix lse = lse_cost(InfRepresentation(psi), lambda, epsilon);
  LseRoundtripRecord out{0.0, 0.0, 0.0, n_samples};
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double diff = std::abs(lse(i, j) - c(i, j));
      out.max_abs_error = std::max(out.max_abs_error, diff);
      out.max_relative_error =
          std::max(out.max_relative_error, diff / std::max(1.0, std::abs(c(i, j))));
      // Per-entry MC dispersion of rho_i rho_j = exp(-(psi_i + psi_j)/eps).
      double sum = 0.0, sumsq = 0.0;
      for (Eigen::Index t = 0; t < ns; ++t) {
        double p = std::exp(-(psi(i, t) + psi(j, t)) / epsilon);
        sum += p;
        sumsq += p * p;
      }
      double mean = sum / double(ns);
      double var = ns > 1 ? std::max(sumsq - sum * sum / double(ns), 0.0) / double(ns - 1) : 0.0;
      double se = std::sqrt(var / double(ns));
      double target = std::exp(-c(i, j) / epsilon);
      if (se > 0.0)
        out.max_stderr_units = std::max(out.max_stderr_units, std::abs(mean - target) / se);
      else if (std::abs(mean - target) > 1e-12 * std::max(1.0, target))
        out.max_stderr_units = kInf;  // deterministic case must match exactly
    }
  return out;
}

}  // namespace otd
