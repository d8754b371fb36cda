#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

#include "otdebias/costs.hpp"
#include "otdebias/divergences.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/instances.hpp"
#include "otdebias/measures.hpp"
#include "otdebias/rng.hpp"

namespace {

using otd::CostMatrix;
using otd::DiscreteMeasure;
using otd::DivergenceReport;
using otd::kInf;
using otd::MatrixXd;
using otd::Rng;
using otd::VectorXd;

VectorXd vec(std::initializer_list<double> xs) {
  VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

void expect_report_identity(const DivergenceReport& r) {
  EXPECT_EQ(r.debiased, r.raw_xy - r.self_xx / 2.0 - r.self_yy / 2.0);
}

// ---------------------------------------------------------------------------
// sinkhorn_divergence

TEST(SinkhornDivergence, CounterexampleGoesNegative) {
  // Zero-diagonal debiasable cost whose Gibbs kernel is not psd: the raw
  // transport term vanishes while the mu self-term stays positive, so the
  // divergence equals -self_xx/2 and is strictly negative.
  DivergenceReport r = otd::sinkhorn_divergence(otd::counterexample_cost(),
                                                otd::counterexample_mu(),
                                                otd::counterexample_nu(), 1.0, 1e-10);
  expect_report_identity(r);
  EXPECT_LE(std::abs(r.raw_xy), 1e-9);
  EXPECT_LE(std::abs(r.self_yy), 1e-12);
  EXPECT_NEAR(r.self_xx, 0.37988549304172253, 1e-9);
  EXPECT_NEAR(r.debiased, -0.18994274652086126, 1e-9);
  EXPECT_NEAR(r.debiased, -0.5 * r.self_xx, 1e-9);
  EXPECT_LT(r.debiased, -1e-3);
  EXPECT_EQ(r.kind, otd::DivergenceKind::entropic);
  EXPECT_EQ(std::string(otd::to_string(r.kind)), "entropic");
  EXPECT_EQ(r.epsilon, 1.0);
}

TEST(SinkhornDivergence, VanishesOnIdenticalMeasures) {
  Rng rng = Rng(211).stream("self");
  MatrixXd pts = otd::random_points(rng, 4, 2);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 4));
  DivergenceReport r = otd::sinkhorn_divergence(c, mu, mu, 0.5, 1e-10);
  EXPECT_LE(std::abs(r.debiased), 2e-9);
}

TEST(SinkhornDivergence, IsSymmetricInItsArguments) {
  Rng rng = Rng(223).stream("symm");
  MatrixXd pts = otd::random_points(rng, 4, 1);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 4));
  DiscreteMeasure nu = DiscreteMeasure::probability(otd::random_simplex(rng, 4));
  DivergenceReport ab = otd::sinkhorn_divergence(c, mu, nu, 0.5, 1e-10);
  DivergenceReport ba = otd::sinkhorn_divergence(c, nu, mu, 0.5, 1e-10);
  EXPECT_NEAR(ab.debiased, ba.debiased, 2e-9);
}

TEST(SinkhornDivergence, DiracPairReadsOffTheDebiasedCost) {
  // Between Diracs every term is forced, so S = c(x,y) - c(x,x)/2 - c(y,y)/2.
  Rng rng = Rng(227).stream("dirac");
  MatrixXd pts = otd::random_points(rng, 2, 2);
  VectorXd g = vec({0.8, 1.3});
  CostMatrix c = otd::shift_by_g(otd::cost_from_points(pts, otd::PointCost::squared), g);
  CostMatrix c0 = otd::debias(c);
  DivergenceReport r = otd::sinkhorn_divergence(c, DiscreteMeasure::dirac(2, 0),
                                                DiscreteMeasure::dirac(2, 1), 0.7, 1e-10);
  EXPECT_NEAR(r.debiased, c0(0, 1), 2e-9);
}

TEST(SinkhornDivergence, NonnegativeForNegativeDefiniteCosts) {
  Rng rng = Rng(229).stream("nonneg");
  for (double eps : {0.1, 1.0}) {
    MatrixXd pts = otd::random_points(rng, 5, 2);
    CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
    DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 5));
    DiscreteMeasure nu = DiscreteMeasure::probability(otd::random_simplex(rng, 5));
    DivergenceReport r = otd::sinkhorn_divergence(c, mu, nu, eps, 1e-10);
    expect_report_identity(r);
    EXPECT_GE(r.debiased, -1e-8) << "eps=" << eps;
  }
}

TEST(SinkhornDivergence, LargeEpsilonLimitsMatchBilinearAndMmd) {
  Rng rng = Rng(233).stream("limits");
  MatrixXd pts = otd::random_points(rng, 3, 1);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 3));
  DiscreteMeasure nu = DiscreteMeasure::probability(otd::random_simplex(rng, 3));
  DivergenceReport big = otd::sinkhorn_divergence(c, mu, nu, 1e4, 1e-10);
  EXPECT_NEAR(big.raw_xy, otd::ot_infinity(c, mu, nu), 1e-2);
  DivergenceReport mmd = otd::mmd_squared(c, mu, nu);
  EXPECT_NEAR(big.debiased, mmd.debiased, 3e-2);
}

TEST(SinkhornDivergence, RequiresSymmetricCost) {
  CostMatrix c = CostMatrix::general(MatrixXd::Zero(2, 2));
  DiscreteMeasure u2 = DiscreteMeasure::uniform(2);
  EXPECT_THROW(otd::sinkhorn_divergence(c, u2, u2, 1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// mmd_squared

TEST(MmdSquared, MatchesTheQuadraticForm) {
  Rng rng = Rng(239).stream("mmd-quad");
  for (int t = 0; t < 20; ++t) {
    MatrixXd pts = otd::random_points(rng, 5, 2);
    CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
    VectorXd a = otd::random_simplex(rng, 5), b = otd::random_simplex(rng, 5);
    DivergenceReport r = otd::mmd_squared(c, DiscreteMeasure::probability(a),
                                          DiscreteMeasure::probability(b));
    expect_report_identity(r);
    VectorXd d = a - b;
    EXPECT_NEAR(r.debiased, -0.5 * d.dot(c.matrix() * d), 1e-12);
    EXPECT_EQ(r.kind, otd::DivergenceKind::mmd);
    EXPECT_EQ(r.epsilon, kInf);
  }
}

TEST(MmdSquared, HandValues) {
  MatrixXd two(2, 2);
  two << 0.0, 2.0, 2.0, 0.0;
  CostMatrix c = CostMatrix::symmetric(std::move(two));
  DiscreteMeasure u2 = DiscreteMeasure::uniform(2);
  DiscreteMeasure d0 = DiscreteMeasure::dirac(2, 0), d1 = DiscreteMeasure::dirac(2, 1);
  EXPECT_DOUBLE_EQ(otd::mmd_squared(c, u2, d0).debiased, 0.5);
  // Zero diagonal: the Dirac pair reads off the cost entry.
  EXPECT_DOUBLE_EQ(otd::mmd_squared(c, d0, d1).debiased, 2.0);
  DivergenceReport same = otd::mmd_squared(c, u2, u2);
  EXPECT_EQ(same.debiased, 0.0);
}

TEST(MmdSquared, RejectsInfiniteCosts) {
  MatrixXd m(2, 2);
  m << 0.0, kInf, kInf, 0.0;
  CostMatrix c = CostMatrix::symmetric(std::move(m));
  DiscreteMeasure u2 = DiscreteMeasure::uniform(2);
  EXPECT_THROW(otd::mmd_squared(c, u2, u2), std::domain_error);
}

// ---------------------------------------------------------------------------
// mmd_embedding_check

TEST(MmdEmbeddingCheck, EmbeddingReproducesMmdAndMinimizer) {
  Rng rng = Rng(241).stream("embed-check");
  MatrixXd pts = otd::random_points(rng, 5, 2);
  VectorXd g = vec({0.6, 0.9, 1.2, 0.7, 1.0});
  CostMatrix c = otd::shift_by_g(otd::cost_from_points(pts, otd::PointCost::squared), g);
  DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 5));
  DiscreteMeasure nu = DiscreteMeasure::probability(otd::random_simplex(rng, 5));
  otd::MmdEmbeddingCheck chk = otd::mmd_embedding_check(c, mu, nu, 99);
  EXPECT_NEAR(chk.mmd_value, chk.embedding_value, 1e-9);
  EXPECT_GE(chk.embedding_value, 0.0);
  // The feature-mean midpoint minimizes the mixed potential.
  EXPECT_LE(chk.psi_at_minimizer, chk.min_psi_perturbed + 1e-12);
}

TEST(MmdEmbeddingCheck, RejectsSizeMismatchAndNonNegdef) {
  CostMatrix c = otd::cost_from_points(
      (MatrixXd(3, 1) << 0.0, 1.0, 2.0).finished(), otd::PointCost::squared);
  DiscreteMeasure u3 = DiscreteMeasure::uniform(3);
  EXPECT_THROW(otd::mmd_embedding_check(c, DiscreteMeasure::uniform(2), u3, 1),
               std::invalid_argument);
  EXPECT_THROW(otd::mmd_embedding_check(otd::counterexample_cost(), u3, u3, 1),
               std::domain_error);
}

// ---------------------------------------------------------------------------
// negdef_iff_mmd_nonneg

TEST(NegdefIffMmdNonneg, ForwardDirectionOnSquaredDistance) {
  Rng rng = Rng(251).stream("negdef-fwd");
  MatrixXd pts = otd::random_points(rng, 5, 2);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  otd::NegdefMmdCertificate cert = otd::negdef_iff_mmd_nonneg(c, 500, 1);
  EXPECT_TRUE(cert.negdef.verdict);
  EXPECT_TRUE(cert.forward_checked);
  EXPECT_FALSE(cert.witness_produced);
  EXPECT_GE(cert.min_mmd, -1e-10);
  EXPECT_LT(cert.min_mmd, kInf);
  EXPECT_TRUE(cert.consistent);
}

TEST(NegdefIffMmdNonneg, BackwardDirectionBuildsNegativeWitness) {
  MatrixXd pts(4, 1);
  pts << 0.0, 1.0, 2.0, 5.0;
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::cubed);
  otd::NegdefMmdCertificate cert = otd::negdef_iff_mmd_nonneg(c, 0, 1);
  EXPECT_FALSE(cert.negdef.verdict);
  EXPECT_TRUE(cert.witness_produced);
  EXPECT_LT(cert.witness_mmd, 0.0);
  EXPECT_TRUE(cert.consistent);
  // The witness pair is a valid pair of probability vectors.
  EXPECT_NEAR(cert.witness_mu.sum(), 1.0, 1e-12);
  EXPECT_NEAR(cert.witness_nu.sum(), 1.0, 1e-12);
  EXPECT_GE(cert.witness_mu.minCoeff(), 0.0);
  EXPECT_GE(cert.witness_nu.minCoeff(), 0.0);
}

TEST(NegdefIffMmdNonneg, CounterexampleCostYieldsWitness) {
  otd::NegdefMmdCertificate cert = otd::negdef_iff_mmd_nonneg(otd::counterexample_cost(), 0, 1);
  EXPECT_FALSE(cert.negdef.verdict);
  EXPECT_TRUE(cert.witness_produced);
  EXPECT_LT(cert.witness_mmd, 0.0);
  EXPECT_TRUE(cert.consistent);
}

// ---------------------------------------------------------------------------
// debiased_uot

TEST(DebiasedUot, VanishesOnIdenticalMeasures) {
  DiscreteMeasure mu = DiscreteMeasure::probability(vec({0.3, 0.7}));
  MatrixXd m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  DivergenceReport r =
      otd::debiased_uot(CostMatrix::symmetric(std::move(m)), mu, mu, 0.5, 1.0, 1e-10);
  expect_report_identity(r);
  EXPECT_LE(std::abs(r.debiased), 2e-9);
  EXPECT_EQ(r.kind, otd::DivergenceKind::uot);
  EXPECT_EQ(r.rho, 1.0);
}

TEST(DebiasedUot, NonnegativeForNegativeDefiniteCosts) {
  Rng rng = Rng(257).stream("uot-nonneg");
  for (int t = 0; t < 3; ++t) {
    MatrixXd pts = otd::random_points(rng, 4, 1);
    CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
    DiscreteMeasure mu = DiscreteMeasure::probability(otd::random_simplex(rng, 4));
    DiscreteMeasure nu = DiscreteMeasure::probability(otd::random_simplex(rng, 4));
    DivergenceReport r = otd::debiased_uot(c, mu, nu, 0.5, 1.0, 1e-10);
    expect_report_identity(r);
    EXPECT_GE(r.debiased, -1e-8) << "trial " << t;
  }
}

// ---------------------------------------------------------------------------
// exact_divergence

TEST(ExactDivergence, MongeInstanceIsNonnegativeWithFrozenRaw) {
  MatrixXd pts(3, 1);
  pts << 0.0, 0.3, 1.0;
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  DiscreteMeasure mu = DiscreteMeasure::probability(vec({0.2, 0.5, 0.3}), pts);
  DiscreteMeasure nu = DiscreteMeasure::probability(vec({0.5, 0.2, 0.3}), pts);
  DivergenceReport r = otd::exact_divergence(c, mu, nu);
  expect_report_identity(r);
  EXPECT_NEAR(r.raw_xy, 0.027, 1e-12);
  // Zero-diagonal cost: self transport is free, so S equals the raw value.
  EXPECT_LE(std::abs(r.self_xx), 1e-15);
  EXPECT_LE(std::abs(r.self_yy), 1e-15);
  EXPECT_NEAR(r.debiased, 0.027, 1e-12);
  EXPECT_GE(r.debiased, 0.0);
  EXPECT_EQ(r.kind, otd::DivergenceKind::eps0);
  EXPECT_EQ(r.epsilon, 0.0);
}

TEST(DivergenceKindNames, AllKindsHaveStableNames) {
  EXPECT_EQ(std::string(otd::to_string(otd::DivergenceKind::eps0)), "eps0");
  EXPECT_EQ(std::string(otd::to_string(otd::DivergenceKind::entropic)), "entropic");
  EXPECT_EQ(std::string(otd::to_string(otd::DivergenceKind::uot)), "uot");
  EXPECT_EQ(std::string(otd::to_string(otd::DivergenceKind::mmd)), "mmd");
}

}  // namespace
