#pragma once

// Entropic OT solvers: log-domain Sinkhorn (balanced, symmetric, unbalanced),
// exact OT oracles at eps = 0, the eps = infinity bilinear cost, and the 2x2
// scalar oracle. All soft-mins run in log domain with max shifts; there is no
// multiplicative-scaling variant.

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/measures.hpp"

namespace otd {

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        marginal_error(residual) {}
  double marginal_error;
};

struct SinkhornSolution {
  VectorXd f;           // dual potential on the first support (cost units)
  VectorXd g;           // dual potential on the second support
  MatrixXd plan;        // primal plan
  double primal_value;  // sum c*pi + eps KL(pi | mu (x) nu)
  double dual_value;    // sum f mu + sum g nu - eps (sum e^{(f+g-c)/eps} mu nu - 1)
  int iterations;
  double marginal_error;  // L1 marginal defect at exit
};

namespace detail {

inline void check_probability(const DiscreteMeasure& m, const char* who) {
  if (std::abs(m.total_mass() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(who) + ": probability measure required (mass " +
                                std::to_string(m.total_mass()) + ")");
}

// Feasibility: every supported row atom must see a supported column atom at
// finite cost (and symmetrically), otherwise no plan has finite objective.
inline void check_feasible(const CostMatrix& c, const VectorXd& mu, const VectorXd& nu,
                           const char* who) {
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] <= 0.0) continue;
    bool ok = false;
    for (Eigen::Index j = 0; j < nu.size() && !ok; ++j) ok = nu[j] > 0.0 && c(i, j) < kInf;
    if (!ok)
      throw std::domain_error(std::string(who) + ": infeasible support, atom " + std::to_string(i) +
                              " of the first marginal sees no finite cost");
  }
  for (Eigen::Index j = 0; j < nu.size(); ++j) {
    if (nu[j] <= 0.0) continue;
    bool ok = false;
    for (Eigen::Index i = 0; i < mu.size() && !ok; ++i) ok = mu[i] > 0.0 && c(i, j) < kInf;
    if (!ok)
      throw std::domain_error(std::string(who) + ": infeasible support, atom " + std::to_string(j) +
                              " of the second marginal sees no finite cost");
  }
}

inline VectorXd log_weights(const VectorXd& w) {
  VectorXd lw(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) lw[i] = w[i] > 0.0 ? std::log(w[i]) : -kInf;
  return lw;
}

// f_i = -eps LSE_j [ log nu_j + (g_j - c_ij)/eps ]; +inf when the row sees
// no supported finite-cost atom (only possible off the support of mu).
inline double soft_row_update(const CostMatrix& c, const VectorXd& lnu, const VectorXd& g,
                              double eps, Eigen::Index i) {
  double m = -kInf;
  for (Eigen::Index j = 0; j < lnu.size(); ++j) {
    if (lnu[j] == -kInf || c(i, j) == kInf) continue;
    double a = lnu[j] + (g[j] - c(i, j)) / eps;
    if (a > m) m = a;
  }
  if (m == -kInf) return kInf;
  double s = 0.0;
  for (Eigen::Index j = 0; j < lnu.size(); ++j) {
    if (lnu[j] == -kInf || c(i, j) == kInf) continue;
    s += std::exp(lnu[j] + (g[j] - c(i, j)) / eps - m);
  }
  return -eps * (m + std::log(s));
}

inline double soft_col_update(const CostMatrix& c, const VectorXd& lmu, const VectorXd& f,
                              double eps, Eigen::Index j) {
  double m = -kInf;
  for (Eigen::Index i = 0; i < lmu.size(); ++i) {
    if (lmu[i] == -kInf || c(i, j) == kInf) continue;
    double a = lmu[i] + (f[i] - c(i, j)) / eps;
    if (a > m) m = a;
  }
  if (m == -kInf) return kInf;
  double s = 0.0;
  for (Eigen::Index i = 0; i < lmu.size(); ++i) {
    if (lmu[i] == -kInf || c(i, j) == kInf) continue;
    s += std::exp(lmu[i] + (f[i] - c(i, j)) / eps - m);
  }
  return -eps * (m + std::log(s));
}

inline MatrixXd gibbs_plan(const CostMatrix& c, const VectorXd& mu, const VectorXd& nu,
                           const VectorXd& f, const VectorXd& g, double eps) {
  MatrixXd p(mu.size(), nu.size());
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      if (mu[i] <= 0.0 || nu[j] <= 0.0 || c(i, j) == kInf) {
        p(i, j) = 0.0;
      } else {
        p(i, j) = std::exp((f[i] + g[j] - c(i, j)) / eps) * mu[i] * nu[j];
      }
    }
  return p;
}

inline double marginal_defect(const MatrixXd& plan, const VectorXd& mu, const VectorXd& nu) {
  return (plan.rowwise().sum() - mu).cwiseAbs().sum() +
         (plan.colwise().sum().transpose() - nu).cwiseAbs().sum();
}

// sum c*pi with +inf * 0 = 0, plus eps KL(pi | mu (x) nu).
inline double primal_value(const CostMatrix& c, const MatrixXd& plan, const VectorXd& mu,
                           const VectorXd& nu, double eps) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      double p = plan(i, j);
      if (p > 0.0) v += c(i, j) * p + eps * p * std::log(p / (mu[i] * nu[j]));
    }
  return v;
}

inline double dual_value(const CostMatrix& c, const VectorXd& mu, const VectorXd& nu,
                         const VectorXd& f, const VectorXd& g, double eps) {
  double lin = 0.0, mass = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu[i] > 0.0) lin += f[i] * mu[i];
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (nu[j] > 0.0) lin += g[j] * nu[j];
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      if (mu[i] <= 0.0 || nu[j] <= 0.0 || c(i, j) == kInf) continue;
      mass += std::exp((f[i] + g[j] - c(i, j)) / eps) * mu[i] * nu[j];
    }
  return lin - eps * (mass - 1.0);
}

}  // namespace detail

inline SinkhornSolution sinkhorn(const CostMatrix& c, const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, double epsilon, double tol = 1e-9,
                                 int max_iter = 50000) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn: epsilon must be positive");
  if (mu.size() != c.rows() || nu.size() != c.cols())
    throw std::invalid_argument("sinkhorn: measure sizes must match the cost matrix");
  detail::check_probability(mu, "sinkhorn");
  detail::check_probability(nu, "sinkhorn");
  detail::check_feasible(c, mu.weights(), nu.weights(), "sinkhorn");

  VectorXd lmu = detail::log_weights(mu.weights());
  VectorXd lnu = detail::log_weights(nu.weights());
  VectorXd f = VectorXd::Zero(mu.size()), g = VectorXd::Zero(nu.size());
  SinkhornSolution sol;
  sol.marginal_error = kInf;
  sol.iterations = 0;
  for (int it = 1; it <= max_iter; ++it) {
    for (Eigen::Index i = 0; i < mu.size(); ++i)
      f[i] = detail::soft_row_update(c, lnu, g, epsilon, i);
    for (Eigen::Index j = 0; j < nu.size(); ++j)
      g[j] = detail::soft_col_update(c, lmu, f, epsilon, j);
    sol.plan = detail::gibbs_plan(c, mu.weights(), nu.weights(), f, g, epsilon);
    sol.marginal_error = detail::marginal_defect(sol.plan, mu.weights(), nu.weights());
    sol.iterations = it;
    if (sol.marginal_error <= tol) break;
    if (it == max_iter)
      throw ConvergenceError("sinkhorn: max_iter exceeded", sol.marginal_error);
  }
  // Symmetric shift so that sum f mu = sum g nu (zero-weight atoms excluded).
  double sf = 0.0, sg = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    if (mu.weight(i) > 0.0) sf += f[i] * mu.weight(i);
  for (Eigen::Index j = 0; j < nu.size(); ++j)
    if (nu.weight(j) > 0.0) sg += g[j] * nu.weight(j);
  double lambda = 0.5 * (sf - sg);
  for (Eigen::Index i = 0; i < f.size(); ++i) f[i] -= lambda;
  for (Eigen::Index j = 0; j < g.size(); ++j) g[j] += lambda;
  sol.f = f;
  sol.g = g;
  sol.primal_value = detail::primal_value(c, sol.plan, mu.weights(), nu.weights(), epsilon);
  sol.dual_value = detail::dual_value(c, mu.weights(), nu.weights(), f, g, epsilon);
  return sol;
}

// Symmetric self-transport solver with the damped fixed point
// f <- (f + T f)/2; the undamped iteration can two-cycle.
inline SinkhornSolution sinkhorn_symmetric(const CostMatrix& c, const DiscreteMeasure& mu,
                                           double epsilon, double tol = 1e-9,
                                           int max_iter = 50000) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("sinkhorn_symmetric: epsilon must be positive");
  c.require_symmetric("sinkhorn_symmetric");
  if (mu.size() != c.rows())
    throw std::invalid_argument("sinkhorn_symmetric: measure size must match the cost matrix");
  detail::check_probability(mu, "sinkhorn_symmetric");
  detail::check_feasible(c, mu.weights(), mu.weights(), "sinkhorn_symmetric");

  VectorXd lmu = detail::log_weights(mu.weights());
  VectorXd f = VectorXd::Zero(mu.size());
  SinkhornSolution sol;
  sol.marginal_error = kInf;
  sol.iterations = 0;
  for (int it = 1; it <= max_iter; ++it) {
    for (Eigen::Index i = 0; i < mu.size(); ++i) {
      double t = detail::soft_row_update(c, lmu, f, epsilon, i);
      f[i] = mu.weight(i) > 0.0 ? 0.5 * (f[i] + t) : t;  // zero atoms take the pointwise value
    }
    sol.plan = detail::gibbs_plan(c, mu.weights(), mu.weights(), f, f, epsilon);
    sol.marginal_error = detail::marginal_defect(sol.plan, mu.weights(), mu.weights());
    sol.iterations = it;
    if (sol.marginal_error <= tol) break;
    if (it == max_iter)
      throw ConvergenceError("sinkhorn_symmetric: max_iter exceeded", sol.marginal_error);
  }
  sol.f = f;
  sol.g = f;
  sol.primal_value = detail::primal_value(c, sol.plan, mu.weights(), mu.weights(), epsilon);
  sol.dual_value = detail::dual_value(c, mu.weights(), mu.weights(), f, f, epsilon);
  return sol;
}

// ---------------------------------------------------------------------------
// Unbalanced entropic OT over probability plans with F = rho KL on both
// marginals. Each half-step solves its dual block in closed form: the
// classical exponent scaling rho/(rho+eps) plus the mass shift that keeps the
// implied plan a probability measure.

struct UnbalancedSolution {
  VectorXd f, g;
  MatrixXd plan;
  double value;  // sum c pi + rho KL(pi1|mu) + rho KL(pi2|nu) + eps KL(pi|mu x nu)
  int iterations;
  double marginal_defect_mu;           // L1 distance of pi's first marginal from mu
  double marginal_defect_nu;           // L1 distance of pi's second marginal from nu
  double potential_change;             // sup-norm change of (f,g) at exit
  std::vector<double> value_trace;     // objective recorded once per full iteration
};

inline double unbalanced_objective(const CostMatrix& c, const MatrixXd& plan, const VectorXd& mu,
                                   const VectorXd& nu, double eps, double rho) {
  double v = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      double p = plan(i, j);
      if (p > 0.0) v += c(i, j) * p + eps * p * std::log(p / (mu[i] * nu[j]));
    }
  VectorXd p1 = plan.rowwise().sum(), p2 = plan.colwise().sum();
  v += rho * kl_divergence(p1, mu) + rho * kl_divergence(p2, nu);
  return v;
}

inline UnbalancedSolution unbalanced_sinkhorn(const CostMatrix& c, const DiscreteMeasure& mu,
                                              const DiscreteMeasure& nu, double epsilon,
                                              double rho, double tol = 1e-9,
                                              int max_iter = 50000) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("unbalanced_sinkhorn: epsilon must be positive");
  if (!(rho > 0.0)) throw std::invalid_argument("unbalanced_sinkhorn: rho must be positive");
  if (mu.size() != c.rows() || nu.size() != c.cols())
    throw std::invalid_argument("unbalanced_sinkhorn: measure sizes must match the cost matrix");
  bool feasible = false;
  for (Eigen::Index i = 0; i < mu.size() && !feasible; ++i)
    for (Eigen::Index j = 0; j < nu.size() && !feasible; ++j)
      feasible = mu.weight(i) > 0.0 && nu.weight(j) > 0.0 && c(i, j) < kInf;
  if (!feasible)
    throw std::domain_error("unbalanced_sinkhorn: no finite-cost pair with positive mass");

  VectorXd lmu = detail::log_weights(mu.weights());
  VectorXd lnu = detail::log_weights(nu.weights());
  double tau = rho / (rho + epsilon);
  VectorXd f = VectorXd::Zero(mu.size()), g = VectorXd::Zero(nu.size());
  UnbalancedSolution sol;
  sol.potential_change = kInf;
  sol.iterations = 0;

  auto half_step = [&](const CostMatrix& cost, const VectorXd& lother, const VectorXd& lown,
                       const VectorXd& other, bool row_side) {
    Eigen::Index n = row_side ? cost.rows() : cost.cols();
    VectorXd m(n);
    for (Eigen::Index i = 0; i < n; ++i)
      m[i] = row_side ? detail::soft_row_update(cost, lother, other, epsilon, i)
                      : detail::soft_col_update(cost, lother, other, epsilon, i);
    // delta = -eps log sum_i own_i exp(-m_i / (rho + eps)); keeps plan mass 1.
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lown[i] == -kInf || m[i] == kInf) continue;
      terms.push_back(lown[i] - m[i] / (rho + epsilon));
    }
    double delta = -epsilon * logsumexp(terms);
    VectorXd out(n);
    for (Eigen::Index i = 0; i < n; ++i) out[i] = (m[i] == kInf) ? kInf : tau * m[i] + delta;
    return out;
  };

  for (int it = 1; it <= max_iter; ++it) {
    VectorXd f_old = f, g_old = g;
    f = half_step(c, lnu, lmu, g, true);
    g = half_step(c, lmu, lnu, f, false);
    sol.plan = detail::gibbs_plan(c, mu.weights(), nu.weights(), f, g, epsilon);
    sol.value_trace.push_back(
        unbalanced_objective(c, sol.plan, mu.weights(), nu.weights(), epsilon, rho));
    double ch = 0.0;
    for (Eigen::Index i = 0; i < f.size(); ++i)
      if (std::isfinite(f[i]) || std::isfinite(f_old[i]))
        ch = std::max(ch, std::abs(f[i] - f_old[i]));
    for (Eigen::Index j = 0; j < g.size(); ++j)
      if (std::isfinite(g[j]) || std::isfinite(g_old[j]))
        ch = std::max(ch, std::abs(g[j] - g_old[j]));
    sol.potential_change = ch;
    sol.iterations = it;
    if (ch <= tol && it > 1) break;
    if (it == max_iter)
      throw ConvergenceError("unbalanced_sinkhorn: max_iter exceeded", ch);
  }
  sol.f = f;
  sol.g = g;
  sol.value = sol.value_trace.back();
  sol.marginal_defect_mu = (sol.plan.rowwise().sum() - mu.weights()).cwiseAbs().sum();
  sol.marginal_defect_nu =
      (sol.plan.colwise().sum().transpose() - nu.weights()).cwiseAbs().sum();
  return sol;
}

// ---------------------------------------------------------------------------
// Exact OT oracles at eps = 0.

struct ExactOtSolution {
  double value;
  MatrixXd plan;
};

namespace detail {

// Adjacent-submodularity (Monge) check on rows/columns sorted by coordinate;
// for totally ordered supports this implies the full Monge condition and
// makes the monotone (north-west corner) coupling optimal.
inline bool is_monge_sorted(const CostMatrix& c, const std::vector<Eigen::Index>& ri,
                            const std::vector<Eigen::Index>& cj) {
  for (std::size_t a = 0; a + 1 < ri.size(); ++a)
    for (std::size_t b = 0; b + 1 < cj.size(); ++b) {
      double lhs = add_ext(c(ri[a], cj[b]), c(ri[a + 1], cj[b + 1]));
      double rhs = add_ext(c(ri[a], cj[b + 1]), c(ri[a + 1], cj[b]));
      if (lhs == kInf && rhs == kInf) continue;
      if (!(lhs <= rhs + 1e-12 * std::max(1.0, std::abs(rhs)))) return false;
    }
  return true;
}

inline std::vector<Eigen::Index> sorted_by_coordinate(const DiscreteMeasure& m) {
  if (!m.has_coordinates() || m.dimension() != 1)
    throw std::domain_error("exact_ot_bruteforce: 1-D coordinates required for this route");
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return m.coordinates()(a, 0) < m.coordinates()(b, 0);
  });
  return idx;
}

}  // namespace detail

// Exact solver on desk-scale instances. Route (a): uniform weights with equal
// support sizes n <= 8, full permutation search. Route (b): 1-D coordinates
// with a Monge cost (e.g. convex functions of |x-y|), monotone rearrangement.
inline ExactOtSolution exact_ot_bruteforce(const CostMatrix& c, const DiscreteMeasure& mu,
                                           const DiscreteMeasure& nu) {
  if (mu.size() != c.rows() || nu.size() != c.cols())
    throw std::invalid_argument("exact_ot_bruteforce: measure sizes must match the cost matrix");
  detail::check_probability(mu, "exact_ot_bruteforce");
  detail::check_probability(nu, "exact_ot_bruteforce");

  Eigen::Index n = mu.size();
  bool uniform_square = (n == nu.size()) && n <= 8;
  if (uniform_square) {
    for (Eigen::Index i = 0; i < n; ++i)
      uniform_square = uniform_square && std::abs(mu.weight(i) - 1.0 / double(n)) <= 1e-14 &&
                       std::abs(nu.weight(i) - 1.0 / double(n)) <= 1e-14;
  }
  if (uniform_square) {
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    double best = kInf;
    std::vector<Eigen::Index> best_perm = perm;
    do {
      double v = 0.0;
      for (Eigen::Index i = 0; i < n && v < kInf; ++i)
        v = add_ext(v, c(i, perm[static_cast<std::size_t>(i)]));
      if (v < best) {
        best = v;
        best_perm = perm;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    ExactOtSolution sol;
    sol.value = best == kInf ? kInf : best / double(n);
    sol.plan = MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      sol.plan(i, best_perm[static_cast<std::size_t>(i)]) = 1.0 / double(n);
    return sol;
  }

  // Route (b): monotone rearrangement over sorted 1-D supports.
  std::vector<Eigen::Index> ri = detail::sorted_by_coordinate(mu);
  std::vector<Eigen::Index> cj = detail::sorted_by_coordinate(nu);
  if (!detail::is_monge_sorted(c, ri, cj))
    throw std::domain_error(
        "exact_ot_bruteforce: unsupported instance (not uniform-equal <= 8 and the sorted cost "
        "is not Monge)");
  MatrixXd plan = MatrixXd::Zero(mu.size(), nu.size());
  double value = 0.0;
  std::size_t a = 0, b = 0;
  double ra = mu.weight(ri[0]), rb = nu.weight(cj[0]);
  while (a < ri.size() && b < cj.size()) {
    double m = std::min(ra, rb);
    if (m > 0.0) {
      plan(ri[a], cj[b]) += m;
      value = add_ext(value, m > 0.0 && c(ri[a], cj[b]) == kInf ? kInf : m * c(ri[a], cj[b]));
    }
    ra -= m;
    rb -= m;
    if (ra <= 1e-15 && a + 1 < ri.size()) {
      ++a;
      ra = mu.weight(ri[a]);
    } else if (ra <= 1e-15) {
      break;
    }
    if (rb <= 1e-15 && b + 1 < cj.size()) {
      ++b;
      rb = nu.weight(cj[b]);
    } else if (rb <= 1e-15) {
      break;
    }
  }
  return {value, plan};
}

// eps = infinity cost: the bilinear form mu^T C nu with inf * 0 = 0.
inline double ot_infinity(const CostMatrix& c, const DiscreteMeasure& mu,
                          const DiscreteMeasure& nu) {
  if (mu.size() != c.rows() || nu.size() != c.cols())
    throw std::invalid_argument("ot_infinity: measure sizes must match the cost matrix");
  double v = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i)
    for (Eigen::Index j = 0; j < nu.size(); ++j) {
      double w = mu.weight(i) * nu.weight(j);
      if (w > 0.0) v = add_ext(v, c(i, j) == kInf ? kInf : c(i, j) * w);
    }
  return v;
}

// Independent 2x2 oracle: couplings in Pi(mu,nu) form a segment parameterized
// by t = pi(0,0); the objective is strictly convex, so golden-section search
// to an interval of width 1e-10 pins the optimum.
inline double eot_scalar_oracle(const CostMatrix& c, const DiscreteMeasure& mu,
                                const DiscreteMeasure& nu, double epsilon) {
  if (c.rows() != 2 || c.cols() != 2 || mu.size() != 2 || nu.size() != 2)
    throw std::invalid_argument("eot_scalar_oracle: 2x2 instance required");
  detail::check_probability(mu, "eot_scalar_oracle");
  detail::check_probability(nu, "eot_scalar_oracle");
  double m1 = mu.weight(0), n1 = nu.weight(0);
  double lo = std::max(0.0, m1 + n1 - 1.0), hi = std::min(m1, n1);
  auto objective = [&](double t) {
    double p[2][2] = {{t, m1 - t}, {n1 - t, 1.0 - m1 - n1 + t}};
    double v = 0.0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double pij = std::max(p[i][j], 0.0);
        if (pij > 0.0) {
          if (c(i, j) == kInf) return kInf;
          v += c(i, j) * pij +
               epsilon * pij * std::log(pij / (mu.weight(i) * nu.weight(j)));
        }
      }
    return v;
  };
  if (hi - lo <= 1e-15) return objective(lo);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = objective(x1), f2 = objective(x2);
  while (b - a > 1e-10) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = objective(x2);
    }
  }
  return std::min(f1, f2);
}

}  // namespace otd
