#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "otdebias/costs.hpp"
#include "otdebias/extreal.hpp"
#include "otdebias/instances.hpp"
#include "otdebias/kernels.hpp"
#include "otdebias/rng.hpp"

namespace {

using otd::CostMatrix;
using otd::InfRepresentation;
using otd::KernelMatrix;
using otd::kInf;
using otd::MatrixXd;
using otd::Rng;
using otd::VectorXd;

MatrixXd colpoints(std::initializer_list<double> xs) {
  MatrixXd p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) p(i++, 0) = x;
  return p;
}

// ---------------------------------------------------------------------------
// KernelMatrix / gibbs_kernel

TEST(KernelMatrix, ValidatesEntries) {
  MatrixXd ok(2, 2);
  ok << 1.0, 0.5, 0.5, 1.0;
  EXPECT_NO_THROW(KernelMatrix{ok});

  MatrixXd neg = ok;
  neg(0, 1) = neg(1, 0) = -0.1;
  EXPECT_THROW(KernelMatrix{neg}, std::invalid_argument);

  MatrixXd asym = ok;
  asym(0, 1) = 0.4;
  EXPECT_THROW(KernelMatrix{asym}, std::invalid_argument);

  MatrixXd nan = ok;
  nan(1, 1) = std::nan("");
  EXPECT_THROW(KernelMatrix{nan}, std::invalid_argument);

  MatrixXd inf = ok;
  inf(0, 0) = kInf;
  EXPECT_THROW(KernelMatrix{inf}, std::invalid_argument);

  EXPECT_THROW(KernelMatrix(MatrixXd(0, 0)), std::invalid_argument);
  EXPECT_THROW(KernelMatrix(MatrixXd::Ones(2, 3)), std::invalid_argument);
}

TEST(GibbsKernel, EntriesAndEpsilon) {
  CostMatrix c = otd::counterexample_cost();
  KernelMatrix k = otd::gibbs_kernel(c, 2.5);
  EXPECT_EQ(k.epsilon(), 2.5);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(k(i, j), std::exp(-c(i, j) / 2.5));
}

TEST(GibbsKernel, InfiniteCostMapsToZero) {
  MatrixXd m(2, 2);
  m << 0.0, kInf, kInf, 0.0;
  KernelMatrix k = otd::gibbs_kernel(CostMatrix::symmetric(std::move(m)), 1.0);
  EXPECT_EQ(k(0, 1), 0.0);
  EXPECT_EQ(k(1, 0), 0.0);
  EXPECT_EQ(k(0, 0), 1.0);
}

TEST(GibbsKernel, RejectsNonpositiveEpsilon) {
  CostMatrix c = otd::counterexample_cost();
  EXPECT_THROW(otd::gibbs_kernel(c, 0.0), std::invalid_argument);
  EXPECT_THROW(otd::gibbs_kernel(c, -1.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// is_psd

TEST(IsPsd, GaussianKernelOnRandomPointsIsPsd) {
  Rng rng = Rng(11).stream("psd-gauss");
  for (int t = 0; t < 20; ++t) {
    MatrixXd pts = otd::random_points(rng, 6, 2);
    CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
    otd::PsdCertificate cert = otd::is_psd(otd::gibbs_kernel(c, 0.7));
    EXPECT_TRUE(cert.verdict);
    EXPECT_GE(cert.min_eigenvalue, -1e-9);
  }
}

TEST(IsPsd, CounterexampleGibbsKernelIsNotPsd) {
  // The zero-diagonal cost [[0,1,0],[1,0,0],[0,0,0]] is debiasable but its
  // Gibbs kernel at epsilon = 1 has a negative eigenvalue.
  KernelMatrix k = otd::gibbs_kernel(otd::counterexample_cost(), 1.0);
  otd::PsdCertificate cert = otd::is_psd(k);
  EXPECT_FALSE(cert.verdict);
  EXPECT_NEAR(cert.min_eigenvalue, -0.24218573701229573, 1e-9);
  // A loose tolerance flips the verdict without changing the spectrum.
  EXPECT_TRUE(otd::is_psd(k, 0.3).verdict);
  EXPECT_TRUE(otd::is_debiasable(otd::counterexample_cost()).verdict);
}

// ---------------------------------------------------------------------------
// is_negative_definite

TEST(IsNegativeDefinite, SquaredDistanceIsNegdef) {
  Rng rng = Rng(13).stream("negdef-sq");
  for (int t = 0; t < 20; ++t) {
    MatrixXd pts = otd::random_points(rng, 6, 3);
    CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
    otd::NegdefCertificate cert = otd::is_negative_definite(c);
    EXPECT_TRUE(cert.verdict);
    EXPECT_LE(std::abs(cert.worst_vector.sum()), 1e-9);
    EXPECT_LE(cert.quadratic_value, 1e-8);
  }
}

TEST(IsNegativeDefinite, MetricPowersUpToTwoAreNegdef) {
  // |x - y|^p is negative definite for p in (0, 2].
  Rng rng = Rng(17).stream("negdef-pow");
  for (int t = 0; t < 10; ++t) {
    MatrixXd pts = otd::random_points(rng, 5, 1);
    CostMatrix abs1 = otd::cost_from_points(pts, otd::PointCost::absolute);
    EXPECT_TRUE(otd::is_negative_definite(abs1).verdict);
    MatrixXd half(5, 5);
    for (Eigen::Index i = 0; i < 5; ++i)
      for (Eigen::Index j = 0; j < 5; ++j) half(i, j) = std::sqrt(std::abs(pts(i, 0) - pts(j, 0)));
    EXPECT_TRUE(otd::is_negative_definite(CostMatrix::symmetric(std::move(half))).verdict);
  }
}

TEST(IsNegativeDefinite, CubedDistanceFailsWithCertifiedWitness) {
  CostMatrix c = otd::cost_from_points(colpoints({0.0, 1.0, 2.0, 5.0}), otd::PointCost::cubed);
  otd::NegdefCertificate cert = otd::is_negative_definite(c);
  EXPECT_FALSE(cert.verdict);
  EXPECT_NEAR(cert.quadratic_value, 20.8584405120632, 1e-8);
  EXPECT_LE(std::abs(cert.worst_vector.sum()), 1e-9);
  // The witness is checkable by direct evaluation of the quadratic form.
  double direct = cert.worst_vector.dot(c.matrix() * cert.worst_vector);
  EXPECT_NEAR(direct, cert.quadratic_value, 1e-10);
  VectorXd expected(4);
  expected << -0.5675944599, 0.2461612336, 0.6924973559, -0.3710641296;
  VectorXd got = cert.worst_vector;
  if (got[2] < 0.0) got = -got;  // eigenvectors are defined up to sign
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(got[i], expected[i], 1e-6);
}

TEST(IsNegativeDefinite, ConstantCostIsNegdef) {
  CostMatrix c = CostMatrix::symmetric(MatrixXd::Constant(4, 4, 3.7));
  otd::NegdefCertificate cert = otd::is_negative_definite(c);
  EXPECT_TRUE(cert.verdict);
  EXPECT_LE(std::abs(cert.quadratic_value), 1e-10);
}

TEST(IsNegativeDefinite, CounterexampleCostIsNotNegdef) {
  // a = (1, 1, -2) gives a^T C a = 2 > 0 on the zero-sum cone.
  EXPECT_FALSE(otd::is_negative_definite(otd::counterexample_cost()).verdict);
}

TEST(IsNegativeDefinite, RejectsInfiniteEntries) {
  MatrixXd m(2, 2);
  m << 0.0, kInf, kInf, 0.0;
  EXPECT_THROW(otd::is_negative_definite(CostMatrix::symmetric(std::move(m))), std::domain_error);
}

TEST(IsNegativeDefinite, NegdefImpliesGibbsPsdAcrossEpsilon) {
  // Shifting c(i,j) + g_i + g_j preserves the zero-sum quadratic form, so the
  // shifted squared distance stays negative definite and its Gibbs kernel is
  // psd at every temperature.
  Rng rng = Rng(19).stream("negdef-bridge");
  for (int t = 0; t < 10; ++t) {
    MatrixXd pts = otd::random_points(rng, 5, 2);
    VectorXd g(5);
    for (Eigen::Index i = 0; i < 5; ++i) g[i] = rng.uniform(0.5, 1.5);
    CostMatrix c = otd::shift_by_g(otd::cost_from_points(pts, otd::PointCost::squared), g);
    ASSERT_TRUE(otd::is_negative_definite(c).verdict);
    for (double eps : {0.1, 1.0, 10.0})
      EXPECT_TRUE(otd::is_psd(otd::gibbs_kernel(c, eps)).verdict) << "eps=" << eps;
  }
}

// ---------------------------------------------------------------------------
// embed_negative_definite

TEST(Embedding, ReconstructsShiftedSquaredDistance) {
  Rng rng = Rng(23).stream("embed");
  for (int t = 0; t < 10; ++t) {
    MatrixXd pts = otd::random_points(rng, 6, 2);
    VectorXd g(6);
    for (Eigen::Index i = 0; i < 6; ++i) g[i] = rng.uniform(0.5, 1.5);
    CostMatrix c = otd::shift_by_g(otd::cost_from_points(pts, otd::PointCost::squared), g);
    otd::Embedding e = otd::embed_negative_definite(c);
    EXPECT_EQ(e.points, 6);
    EXPECT_GE(e.psd_residual, -1e-8);
    EXPECT_LE(e.psd_residual, 0.0);
    for (Eigen::Index i = 0; i < 6; ++i) {
      EXPECT_EQ(e.offsets[i], 0.5 * c(i, i));
      for (Eigen::Index j = 0; j < 6; ++j) EXPECT_NEAR(e.reconstruct(i, j), c(i, j), 1e-8);
    }
  }
}

TEST(Embedding, FeatureDistancesMatchPlanarPointCloud) {
  // Pure squared distances: offsets vanish and the feature geometry recovers
  // the pairwise squared distances with the ambient rank.
  Rng rng = Rng(29).stream("embed-plane");
  MatrixXd pts = otd::random_points(rng, 5, 2);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  otd::Embedding e = otd::embed_negative_definite(c);
  EXPECT_EQ(e.rank, 2);
  for (Eigen::Index i = 0; i < 5; ++i) {
    EXPECT_EQ(e.offsets[i], 0.0);
    for (Eigen::Index j = 0; j < 5; ++j)
      EXPECT_NEAR(e.feature_sqdist(i, j), (pts.row(i) - pts.row(j)).squaredNorm(), 1e-10);
  }
}

TEST(Embedding, SinglePointHasRankZero) {
  CostMatrix c = CostMatrix::symmetric(MatrixXd::Constant(1, 1, 1.4));
  otd::Embedding e = otd::embed_negative_definite(c);
  EXPECT_EQ(e.points, 1);
  EXPECT_EQ(e.rank, 0);
  EXPECT_EQ(e.offsets[0], 0.7);
  EXPECT_EQ(e.feature_sqdist(0, 0), 0.0);
  EXPECT_EQ(e.reconstruct(0, 0), 1.4);
}

TEST(Embedding, RejectsNonNegdefCost) {
  CostMatrix c = otd::cost_from_points(colpoints({0.0, 1.0, 2.0, 5.0}), otd::PointCost::cubed);
  EXPECT_THROW(otd::embed_negative_definite(c), std::domain_error);
  EXPECT_THROW(otd::embed_negative_definite(otd::counterexample_cost()), std::domain_error);
}

// ---------------------------------------------------------------------------
// gaussian_features_mc

TEST(GaussianFeaturesMc, RankZeroIsExact) {
  CostMatrix c = CostMatrix::symmetric(MatrixXd::Constant(1, 1, 1.4));
  otd::Embedding e = otd::embed_negative_definite(c);
  otd::McKernelEstimate mc = otd::gaussian_features_mc(e, 2.0, 64, 5);
  EXPECT_EQ(mc.n_samples, 64u);
  EXPECT_EQ(mc.seed, 5u);
  // With no feature directions the integrand is constant.
  EXPECT_NEAR(mc.estimate(0, 0), std::exp(-1.4 / 2.0), 1e-13);
  EXPECT_LE(mc.stderrs(0, 0), 1e-8 * mc.estimate(0, 0));
}

TEST(GaussianFeaturesMc, EstimateCoversGibbsKernel) {
  Rng rng = Rng(31).stream("mc-band");
  // Half-scale points keep the lognormal integrand light-tailed, so the
  // plug-in standard errors are trustworthy and a 5-sigma band is honest.
  MatrixXd pts = 0.5 * otd::random_points(rng, 4, 2);
  CostMatrix c = otd::cost_from_points(pts, otd::PointCost::squared);
  otd::Embedding e = otd::embed_negative_definite(c);
  double eps = 1.0;
  otd::McKernelEstimate mc = otd::gaussian_features_mc(e, eps, 20000, 7);
  for (Eigen::Index i = 0; i < 4; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) {
      EXPECT_EQ(mc.estimate(i, j), mc.estimate(j, i));
      double truth = std::exp(-c(i, j) / eps);
      EXPECT_NEAR(mc.estimate(i, j), truth, 5.0 * mc.stderrs(i, j) + 1e-9)
          << "entry (" << i << "," << j << ")";
      EXPECT_GE(mc.stderrs(i, j), 0.0);
      // The base point embeds at the origin, so only its self-kernel sample
      // is (numerically) constant; every other pair has genuine variance.
      if (i + j > 0) EXPECT_GT(mc.stderrs(i, j), 0.0) << i << "," << j;
    }
  EXPECT_LE(mc.stderrs(0, 0), 1e-9);
}

TEST(GaussianFeaturesMc, StderrHalvesPerQuadrupling) {
  Rng rng = Rng(37).stream("mc-rate");
  // Small spread -> mild lognormal integrand, so the sample sigma in the
  // stderr estimate concentrates and the 1/sqrt(n) law is visible.
  MatrixXd pts = 0.2 * otd::random_points(rng, 4, 2);
  otd::Embedding e =
      otd::embed_negative_definite(otd::cost_from_points(pts, otd::PointCost::squared));
  otd::McKernelEstimate lo = otd::gaussian_features_mc(e, 1.0, 4000, 123);
  otd::McKernelEstimate hi = otd::gaussian_features_mc(e, 1.0, 16000, 123);
  double ratio = hi.stderrs.norm() / lo.stderrs.norm();
  EXPECT_GE(ratio, 0.4);
  EXPECT_LE(ratio, 0.6);
}

TEST(GaussianFeaturesMc, RejectsBadArguments) {
  otd::Embedding e =
      otd::embed_negative_definite(CostMatrix::symmetric(MatrixXd::Constant(1, 1, 1.0)));
  EXPECT_THROW(otd::gaussian_features_mc(e, 0.0, 10, 1), std::invalid_argument);
  EXPECT_THROW(otd::gaussian_features_mc(e, -1.0, 10, 1), std::invalid_argument);
  EXPECT_THROW(otd::gaussian_features_mc(e, 1.0, 0, 1), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// lse_cost / lse_cost_pair

TEST(LseCost, SingleAtomCollapsesToSum) {
  // With lambda = delta_{z0} and epsilon = 1 the log-sum-exp shift arithmetic
  // cancels exactly: c(i,j) = psi(i,0) + psi(j,0) bitwise.
  MatrixXd psi(3, 1);
  psi << 0.3, 1.7, -0.4;
  CostMatrix c = otd::lse_cost(InfRepresentation(psi), VectorXd::Ones(1), 1.0);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(c(i, j), psi(i, 0) + psi(j, 0));
}

TEST(LseCost, ZeroWeightAtomsAreIgnored) {
  MatrixXd psi(2, 2);
  psi << 0.3, 1.0, -0.2, 2.0;
  VectorXd lambda(2);
  lambda << 0.0, 1.0;
  CostMatrix c = otd::lse_cost(InfRepresentation(psi), lambda, 1.0);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(c(i, j), psi(i, 1) + psi(j, 1));
}

TEST(LseCost, AllZeroLambdaGivesInfiniteCost) {
  MatrixXd psi = MatrixXd::Zero(2, 3);
  CostMatrix c = otd::lse_cost(InfRepresentation(psi), VectorXd::Zero(3), 1.0);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 2; ++j) EXPECT_EQ(c(i, j), kInf);
}

TEST(LseCost, DominatesHardMinimum) {
  // -eps log sum_z lambda_z e^{-s_z/eps} >= min_z s_z when lambda is a
  // probability vector (soft-min above hard-min).
  Rng rng = Rng(41).stream("lse-min");
  for (int t = 0; t < 100; ++t) {
    MatrixXd psi(4, 6);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index z = 0; z < 6; ++z)
        psi(i, z) = rng.uniform01() < 0.15 ? kInf : rng.uniform(0.0, 3.0);
    VectorXd lambda = otd::random_simplex(rng, 6);
    double eps = t % 2 == 0 ? 0.25 : 1.0;
    CostMatrix soft = otd::lse_cost(InfRepresentation(psi), lambda, eps);
    CostMatrix hard = otd::eval_inf_rep(InfRepresentation(psi));
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = 0; j < 4; ++j) EXPECT_GE(soft(i, j), hard(i, j) - 1e-12);
  }
}

TEST(LseCost, AlwaysDebiasable) {
  Rng rng = Rng(43).stream("lse-debias");
  for (int t = 0; t < 100; ++t) {
    MatrixXd psi(4, 6);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index z = 0; z < 6; ++z)
        psi(i, z) = rng.uniform01() < 0.15 ? kInf : rng.uniform(0.0, 3.0);
    VectorXd lambda = otd::random_simplex(rng, 6);
    double eps = t % 2 == 0 ? 0.25 : 1.0;
    CostMatrix soft = otd::lse_cost(InfRepresentation(psi), lambda, eps);
    EXPECT_TRUE(otd::is_debiasable(soft, false, 1e-10).verdict);
  }
}

TEST(LseCost, DebiasCancelsReferenceConstants) {
  // psi(x,z) = 2(x-z)^2 against a uniform fine grid: the Gaussian-mass
  // constant is independent of the midpoint, so debiasing the soft cost
  // recovers the squared distance.
  const double lo = -6.0, hi = 6.0;
  const Eigen::Index nz = 240;
  const double step = (hi - lo) / double(nz);
  std::vector<double> xs = {-1.3, 0.2, 1.7};
  MatrixXd psi(3, nz);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index z = 0; z < nz; ++z) {
      double zz = lo + (double(z) + 0.5) * step;
      psi(i, z) = 2.0 * (xs[static_cast<std::size_t>(i)] - zz) * (xs[static_cast<std::size_t>(i)] - zz);
    }
  VectorXd lambda = VectorXd::Constant(nz, 1.0 / double(nz));
  CostMatrix c0 = otd::debias(otd::lse_cost(InfRepresentation(psi), lambda, 1.0));
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) {
      double d = xs[static_cast<std::size_t>(i)] - xs[static_cast<std::size_t>(j)];
      EXPECT_NEAR(c0(i, j), d * d, 1e-9);
    }
}

TEST(LseCost, RejectsBadArguments) {
  MatrixXd psi = MatrixXd::Zero(2, 3);
  InfRepresentation rep(psi);
  EXPECT_THROW(otd::lse_cost(rep, VectorXd::Ones(3), 0.0), std::invalid_argument);
  EXPECT_THROW(otd::lse_cost(rep, VectorXd::Ones(2), 1.0), std::invalid_argument);
  VectorXd neg(3);
  neg << 0.5, -0.1, 0.6;
  EXPECT_THROW(otd::lse_cost(rep, neg, 1.0), std::invalid_argument);
  VectorXd infw(3);
  infw << 0.5, kInf, 0.5;
  EXPECT_THROW(otd::lse_cost(rep, infw, 1.0), std::invalid_argument);
}

TEST(LseCostPair, MatchesSquareCaseAndShapes) {
  Rng rng = Rng(47).stream("lse-pair");
  MatrixXd psi(3, 4);
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index z = 0; z < 4; ++z) psi(i, z) = rng.uniform(0.0, 2.0);
  VectorXd lambda = otd::random_simplex(rng, 4);
  CostMatrix square = otd::lse_cost(InfRepresentation(psi), lambda, 0.5);
  CostMatrix pair = otd::lse_cost_pair(psi, psi, lambda, 0.5);
  EXPECT_FALSE(pair.is_symmetric());
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(pair(i, j), square(i, j));

  MatrixXd psi_b(5, 4);
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index z = 0; z < 4; ++z) psi_b(i, z) = rng.uniform(0.0, 2.0);
  CostMatrix rect = otd::lse_cost_pair(psi, psi_b, lambda, 0.5);
  EXPECT_EQ(rect.rows(), 3);
  EXPECT_EQ(rect.cols(), 5);
  EXPECT_THROW(otd::lse_cost_pair(psi, psi_b, VectorXd::Ones(3), 0.5), std::invalid_argument);
  EXPECT_THROW(otd::lse_cost_pair(psi, psi_b, lambda, 0.0), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// mean_embedding_grams

TEST(MeanEmbeddingGrams, DiracWeightsReadOffKernelEntries) {
  KernelMatrix k = otd::gibbs_kernel(otd::counterexample_cost(), 1.0);
  VectorXd e0 = VectorXd::Unit(3, 0), e1 = VectorXd::Unit(3, 1);
  otd::MeanEmbeddingGrams g = otd::mean_embedding_grams(k, e0, e1);
  EXPECT_EQ(g.norm2_a, k(0, 0));
  EXPECT_EQ(g.norm2_b, k(1, 1));
  EXPECT_EQ(g.inner_ab, k(0, 1));
}

TEST(MeanEmbeddingGrams, CauchySchwarzOnPsdKernel) {
  Rng rng = Rng(53).stream("gram-cs");
  MatrixXd pts = otd::random_points(rng, 5, 2);
  KernelMatrix k = otd::gibbs_kernel(otd::cost_from_points(pts, otd::PointCost::squared), 1.0);
  for (int t = 0; t < 100; ++t) {
    VectorXd a = otd::random_simplex(rng, 5), b = otd::random_simplex(rng, 5);
    otd::MeanEmbeddingGrams g = otd::mean_embedding_grams(k, a, b);
    EXPECT_LE(g.inner_ab * g.inner_ab, g.norm2_a * g.norm2_b + 1e-12);
    otd::MeanEmbeddingGrams same = otd::mean_embedding_grams(k, a, a);
    EXPECT_EQ(same.norm2_a, same.norm2_b);
    EXPECT_EQ(same.norm2_a, same.inner_ab);
  }
}

TEST(MeanEmbeddingGrams, RejectsSizeMismatch) {
  KernelMatrix k = otd::gibbs_kernel(otd::counterexample_cost(), 1.0);
  EXPECT_THROW(otd::mean_embedding_grams(k, VectorXd::Ones(2), VectorXd::Ones(3)),
               std::invalid_argument);
  EXPECT_THROW(otd::mean_embedding_grams(k, VectorXd::Ones(3), VectorXd::Ones(4)),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// log_kernel_debias_check

TEST(LogKernelDebiasCheck, GaussianKernelAgreesDebiasable) {
  CostMatrix c = otd::cost_from_points(colpoints({0.0, 0.7, 1.5}), otd::PointCost::squared);
  KernelMatrix k = otd::gibbs_kernel(c, 1.0);
  otd::LogKernelDebiasCheck lax = otd::log_kernel_debias_check(k, 1.0, false);
  EXPECT_TRUE(lax.debiasable_verdict);
  EXPECT_TRUE(lax.kernel_verdict);
  EXPECT_TRUE(lax.agree);
  EXPECT_FALSE(lax.witness.has_value());
  // Distinct points make the inequality strict on both sides.
  otd::LogKernelDebiasCheck strict = otd::log_kernel_debias_check(k, 1.0, true);
  EXPECT_TRUE(strict.debiasable_verdict);
  EXPECT_TRUE(strict.kernel_verdict);
  EXPECT_TRUE(strict.agree);
}

TEST(LogKernelDebiasCheck, InjectedViolationIsWitnessed) {
  // k(0,1)^2 = 1.44 > 1 = k(0,0) k(1,1): both routes must reject at (0,1).
  MatrixXd m(2, 2);
  m << 1.0, 1.2, 1.2, 1.0;
  otd::LogKernelDebiasCheck chk = otd::log_kernel_debias_check(KernelMatrix(m), 1.0);
  EXPECT_FALSE(chk.debiasable_verdict);
  EXPECT_FALSE(chk.kernel_verdict);
  EXPECT_TRUE(chk.agree);
  ASSERT_TRUE(chk.witness.has_value());
  EXPECT_EQ(chk.witness->first, 0);
  EXPECT_EQ(chk.witness->second, 1);
}

TEST(LogKernelDebiasCheck, ZeroKernelEntriesMeanInfiniteCost) {
  otd::LogKernelDebiasCheck chk =
      otd::log_kernel_debias_check(KernelMatrix(MatrixXd::Identity(2, 2)), 1.0, true);
  EXPECT_TRUE(chk.debiasable_verdict);
  EXPECT_TRUE(chk.kernel_verdict);
  EXPECT_TRUE(chk.agree);
}

TEST(LogKernelDebiasCheck, VerdictsAgreeOnRandomKernels) {
  // The debiasability of -eps log k and the Gram inequality
  // k(i,i) k(j,j) >= k(i,j)^2 are equivalent; both evaluations are
  // independent, so they must agree on arbitrary positive kernels.
  Rng rng = Rng(59).stream("logk");
  int rejected = 0;
  for (int t = 0; t < 200; ++t) {
    MatrixXd m(4, 4);
    for (Eigen::Index i = 0; i < 4; ++i)
      for (Eigen::Index j = i; j < 4; ++j) {
        double v = std::exp(rng.uniform(-1.0, 1.0));
        m(i, j) = v;
        m(j, i) = v;
      }
    KernelMatrix k(m);
    double eps = t % 2 == 0 ? 0.5 : 2.0;
    otd::LogKernelDebiasCheck lax = otd::log_kernel_debias_check(k, eps, false);
    EXPECT_TRUE(lax.agree) << "trial " << t;
    if (!lax.kernel_verdict) {
      ++rejected;
      EXPECT_TRUE(lax.witness.has_value());
    }
    otd::LogKernelDebiasCheck strict = otd::log_kernel_debias_check(k, eps, true);
    EXPECT_TRUE(strict.agree) << "trial " << t;
  }
  // Random kernels hit both branches.
  EXPECT_GT(rejected, 0);
  EXPECT_LT(rejected, 200);
}

TEST(LogKernelDebiasCheck, RejectsNonpositiveEpsilon) {
  KernelMatrix k(MatrixXd::Identity(2, 2));
  EXPECT_THROW(otd::log_kernel_debias_check(k, 0.0), std::invalid_argument);
}

}  // namespace
