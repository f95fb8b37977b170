#include <gtest/gtest.h>

#include <cmath>

#include "banditlab/confidence.hpp"

using namespace banditlab;

TEST(ArmBand, UnsampledArmIsFullInterval) {
  ArmStatistics stats(3);
  stats.record(1, 0.5);
  const auto band = arm_band(stats, 10);
  EXPECT_EQ(band.lower[0], 0.0);
  EXPECT_EQ(band.upper[0], 1.0);
}

TEST(ArmBand, HorizonOneExample) {
  ArmStatistics stats(1);
  for (int i = 0; i < 8; ++i) stats.record(0, i % 2 ? 1.0 : 0.0);
  ASSERT_DOUBLE_EQ(stats.mean(0), 0.5);
  const auto band = arm_band(stats, 1);
  EXPECT_DOUBLE_EQ(band.upper[0], 1.0);
  EXPECT_DOUBLE_EQ(band.lower[0], 0.0);
}

TEST(ArmBand, InteriorValuesAndShrinkage) {
  const double num = 2.0 + 6.0 * std::log(100.0);
  double prev = 2.0;
  for (int n : {40, 80, 160, 320, 640}) {
    ArmStatistics stats(1);
    for (int i = 0; i < n; ++i) stats.record(0, 0.5);
    const auto band = arm_band(stats, 100);
    const double r = std::sqrt(num / n);
    EXPECT_DOUBLE_EQ(band.upper[0], std::min(0.5 + r, 1.0));
    EXPECT_DOUBLE_EQ(band.lower[0], std::max(0.5 - r, 0.0));
    const double w = band.upper[0] - band.lower[0];
    EXPECT_LE(w, prev);
    EXPECT_LE(0.0, band.lower[0]);
    EXPECT_LE(band.lower[0], band.upper[0]);
    prev = w;
  }
}

TEST(ArmStatistics, RunningMean) {
  ArmStatistics s(2);
  s.record(0, 0.4);
  EXPECT_DOUBLE_EQ(s.mean(0), 0.4);
  EXPECT_EQ(s.count(0), 1u);
  ArmStatistics t(1);
  t.record(0, 1.0);
  t.record(0, 0.0);
  EXPECT_DOUBLE_EQ(t.mean(0), 0.5);
  EXPECT_EQ(t.total(), 2u);
}

TEST(EmpiricalNorm, Examples) {
  FiniteFunctionClass fc;
  fc.table = Eigen::MatrixXd::Zero(2, 5);
  fc.table.row(1).setConstant(0.3);
  fc.prior = Eigen::Vector2d(0.5, 0.5);
  const std::vector<ActionId> four{0, 1, 2, 4};
  EXPECT_NEAR(empirical_norm(fc, 0, 1, four), 0.6, 1e-15);
  EXPECT_EQ(empirical_norm(fc, 1, 1, four), 0.0);
  EXPECT_EQ(empirical_norm(fc, 0, 1, {}), 0.0);
}

TEST(SquaredLoss, Examples) {
  FiniteFunctionClass fc;
  fc.table = Eigen::Matrix2d{{0.2, 0.6}, {0.9, 0.1}};
  fc.prior = Eigen::Vector2d(0.5, 0.5);
  History h;
  EXPECT_EQ(squared_loss(fc, 0, h), 0.0);
  h.append({0, 1}, 0, 0.5);
  EXPECT_NEAR(squared_loss(fc, 0, h), 0.09, 1e-15);
  History exact;
  exact.append({0, 1}, 0, 0.9);
  exact.append({0, 1}, 1, 0.1);
  EXPECT_EQ(squared_loss(fc, 1, exact), 0.0);
}

TEST(BetaStar, FiniteClassValues) {
  EXPECT_NEAR(beta_star_finite(2, 1.0, 1.0), 8.0 * std::log(2.0), 1e-12);
  EXPECT_NEAR(beta_star_finite(2, 1.0, 1.0), 5.545177444479562, 1e-12);
  EXPECT_NEAR(beta_star_finite(16, 0.05, 0.5), 2.0 * std::log(16.0 / 0.05), 1e-12);
  EXPECT_DOUBLE_EQ(beta_star(std::log(7.0), 0.1, 0.0, 30.0, 1.0, 2.0), 32.0 * std::log(70.0));
}

TEST(BetaStar, CoverTermIsNondecreasingInT) {
  double prev = 0.0;
  for (double t = 1; t <= 100; t += 1) {
    const double b = beta_star(std::log(10.0), 0.1, 0.01, t, 1.0, 1.0);
    EXPECT_GE(b, prev);
    prev = b;
  }
  const double expected = 8.0 * std::log(100.0) + 2 * 0.01 * 5 * (8.0 + std::sqrt(8.0 * std::log(4 * 25 / 0.1)));
  EXPECT_NEAR(beta_star(std::log(10.0), 0.1, 0.01, 5.0, 1.0, 1.0), expected, 1e-12);
  EXPECT_THROW(beta_star(1.0, 0.0, 0.0, 1.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(beta_star(1.0, 0.5, -1.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST(LeastSquaresSet, EmptyHistoryKeepsEverything) {
  Rng rng(5);
  const auto fc = make_random_class(6, 4, 0.0, 1.0, rng);
  const auto set = build_ls_set(fc, History{}, 0.0);
  EXPECT_EQ(set.size(), 6u);
  for (ActionId a = 0; a < 4; ++a)
    EXPECT_DOUBLE_EQ(width(set, a), fc.table.col(Eigen::Index(a)).maxCoeff() - fc.table.col(Eigen::Index(a)).minCoeff());
}

TEST(LeastSquaresSet, ZeroRadiusIsTheCenter) {
  Rng rng(6);
  const auto fc = make_random_class(5, 3, 0.0, 1.0, rng);
  History h;
  for (int t = 0; t < 30; ++t) h.append({0, 1, 2}, ActionId(t % 3), fc.table(2, t % 3) + 0.1 * rng.normal());
  const auto set = build_ls_set(fc, h, 0.0);
  EXPECT_EQ(set.size(), 1u);
  EXPECT_TRUE(set.contains(set.center));
  for (ActionId a = 0; a < 3; ++a) EXPECT_EQ(width(set, a), 0.0);
}

TEST(LeastSquaresSet, CenterMinimizesLoss) {
  Rng rng(7);
  for (int c = 0; c < 20; ++c) {
    const auto fc = make_random_class(8, 4, 0.0, 1.0, rng);
    History h;
    for (int t = 0; t < 15; ++t) {
      const ActionId a = rng.index(4);
      h.append({0, 1, 2, 3}, a, rng.uniform());
    }
    const auto set = build_ls_set(fc, h, 0.5);
    for (ParamId rho = 0; rho < 8; ++rho) EXPECT_GE(squared_loss(fc, rho, h), squared_loss(fc, set.center, h));
  }
}

TEST(LeastSquaresTracker, AgreesWithBatchConstruction) {
  Rng rng(8);
  const auto fc = make_random_class(10, 5, 0.0, 1.0, rng);
  LeastSquaresTracker tracker(fc);
  History h;
  for (int t = 0; t < 60; ++t) {
    const ActionId a = rng.index(5);
    const double r = fc.table(3, Eigen::Index(a)) + 0.3 * rng.normal();
    tracker.observe(a, r);
    h.append({0, 1, 2, 3, 4}, a, r);
    const double beta = 0.2 + 0.05 * t;
    const auto set = build_ls_set(fc, h, beta);
    ASSERT_EQ(tracker.center(), set.center);
    for (ActionId b = 0; b < 5; ++b) ASSERT_NEAR(tracker.width(b, beta), width(set, b), 1e-12);
  }
}

TEST(LeastSquares, LemmaThreeSurrogate) {
  // P(exists t <= T: L_t(f) < L_t(f_theta) + 0.5 ||f - f_theta||^2 - 4 sigma^2 log(1/delta)) <= delta
  // for a fixed f and a fixed action sequence.
  FiniteFunctionClass fc;
  fc.table = Eigen::Matrix2d{{0.2, 0.5}, {0.35, 0.45}};
  fc.prior = Eigen::Vector2d(0.5, 0.5);
  const double sigma = 0.5, delta = 0.1;
  const std::size_t horizon = 50;
  const std::vector<ActionId> seq = [&] {
    std::vector<ActionId> s;
    for (std::size_t t = 0; t < horizon; ++t) s.push_back(t < 10 ? 1 : (t % 3 == 0));
    return s;
  }();
  Rng rng(31);
  const int runs = 20000;
  int bad = 0;
  for (int i = 0; i < runs; ++i) {
    double lf = 0.0, lt = 0.0, dist = 0.0;
    bool hit = false;
    for (ActionId a : seq) {
      const double truth = fc.table(0, Eigen::Index(a)), other = fc.table(1, Eigen::Index(a));
      const double r = truth + sigma * rng.normal();
      lf += (other - r) * (other - r);
      lt += (truth - r) * (truth - r);
      dist += (other - truth) * (other - truth);
      if (lf < lt + 0.5 * dist - 4.0 * sigma * sigma * std::log(1.0 / delta)) hit = true;
    }
    bad += hit;
  }
  const double freq = bad / double(runs);
  EXPECT_LE(freq, delta + 3.0 * std::sqrt(delta * (1 - delta) / runs));
}

TEST(Ellipsoid, ScalarRidgeExample) {
  const auto set = build_ellipsoid({Eigen::VectorXd::Ones(1)}, {1.0}, 1, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(set.center[0], 0.5);
  EXPECT_DOUBLE_EQ(set.gram(0, 0), 2.0);
  EXPECT_NEAR(ellipsoid_ucb(set, Eigen::VectorXd::Ones(1)), 1.2071067811865475, 1e-12);
}

TEST(Ellipsoid, DegenerateCases) {
  Rng rng(2);
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> rs;
  for (int i = 0; i < 5; ++i) {
    xs.push_back(rng.normal_vector(3));
    rs.push_back(rng.normal());
  }
  const auto point = build_ellipsoid(xs, rs, 3, 0.5, 0.0);
  const Eigen::Vector3d phi(0.1, -0.4, 0.8);
  EXPECT_DOUBLE_EQ(ellipsoid_ucb(point, phi), phi.dot(point.center));
  EXPECT_EQ(ellipsoid_ucb(point, Eigen::Vector3d::Zero()), 0.0);
  const auto wide = build_ellipsoid(xs, rs, 3, 0.5, 4.0);
  EXPECT_GE(ellipsoid_ucb(wide, phi), phi.dot(wide.center));
  EXPECT_LE(ellipsoid_ucb(wide, phi, 0.01), 0.01);
  EXPECT_THROW(build_ellipsoid(xs, rs, 3, 0.0, 1.0), ConfigError);
}

TEST(Ellipsoid, GramDominatesRegularizer) {
  Rng rng(3);
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> rs;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(rng.normal_vector(4));
    rs.push_back(rng.normal());
  }
  const double lambda = 0.025;
  const auto set = build_ellipsoid(xs, rs, 4, lambda, 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(set.gram - lambda * Eigen::MatrixXd::Identity(4, 4));
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  EXPECT_GE(std::log(set.gram.determinant()), 4 * std::log(lambda));
}

TEST(RidgeTracker, AgreesWithBatchEllipsoid) {
  Rng rng(4);
  RidgeTracker ridge(3, 0.7);
  std::vector<Eigen::VectorXd> xs;
  std::vector<double> rs;
  for (int i = 0; i < 200; ++i) {
    Eigen::VectorXd phi = rng.normal_vector(3);
    const double r = rng.normal();
    ridge.observe(phi, r);
    xs.push_back(phi);
    rs.push_back(r);
  }
  const auto batch = build_ellipsoid(xs, rs, 3, 0.7, 1.0);
  EXPECT_LT((ridge.center() - batch.center).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(ridge.log_det(), std::log(batch.gram.determinant()), 1e-9);
  EXPECT_LT((ridge.gram_inverse() * ridge.gram() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(EllipsoidRadius, Formulas) {
  const double det = ellipsoid_radius_determinant(3.0 * std::log(2.0), 3, 1.0, 1.0, 1.0, 2.0);
  EXPECT_NEAR(det, std::sqrt(3.0 * std::log(2.0)) + 2.0, 1e-12);
  const double cf = ellipsoid_radius_closed_form(10, 2, 0.5, 1.0, 0.1, 1.0, 1.0);
  EXPECT_NEAR(cf, std::sqrt(2.0 * std::log(21.0 / 0.1)) + std::sqrt(0.5), 1e-12);
}
