#include <gtest/gtest.h>

#include <cmath>

#include "banditlab/audits.hpp"
#include "banditlab/complexity.hpp"
#include "oracles.hpp"

using namespace banditlab;

namespace {

FiniteFunctionClass from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  FiniteFunctionClass fc;
  const auto n = Eigen::Index(rows.size());
  const auto m = Eigen::Index(rows.begin()->size());
  fc.table.resize(n, m);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) fc.table(i, j++) = v;
    ++i;
  }
  fc.prior = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  return fc;
}

/// Random class whose entries sit on a coarse lattice, so ties and exact
/// boundary cases occur often.
FiniteFunctionClass lattice_class(std::size_t params, std::size_t actions, Rng& rng) {
  FiniteFunctionClass fc = make_random_class(params, actions, 0.0, 1.0, rng);
  fc.table = (fc.table * 4.0).array().round() / 4.0;
  return fc;
}

}  // namespace

TEST(EluderExact, MatchesSequenceOracleOnRandomClasses) {
  Rng rng(2024);
  for (int c = 0; c < 60; ++c) {
    const std::size_t params = 2 + rng.index(5), actions = 1 + rng.index(6);
    const FiniteFunctionClass fc = c % 2 ? lattice_class(params, actions, rng)
                                         : make_random_class(params, actions, 0.0, 1.0, rng);
    for (double eps : {0.0, 0.1, 0.25, 0.5, 0.9}) {
      ASSERT_EQ(eluder_dimension(fc, eps, EluderMode::kExact), oracle::eluder_dimension(fc, eps))
          << "class " << c << " eps " << eps;
    }
  }
}

TEST(EluderExact, WitnessIsAValidSequence) {
  Rng rng(7);
  for (int c = 0; c < 20; ++c) {
    const FiniteFunctionClass fc = make_random_class(5, 5, 0.0, 1.0, rng);
    const EluderResult r = eluder_dimension_detail(fc, 0.2, EluderMode::kExact);
    ASSERT_EQ(r.witness.size(), r.dimension);
    EXPECT_GE(r.eps_prime, 0.2);
    for (std::size_t k = 0; k < r.witness.size(); ++k) {
      const std::span<const ActionId> prefix(r.witness.data(), k);
      EXPECT_FALSE(is_eps_dependent(fc, r.witness[k], prefix, r.eps_prime));
    }
  }
}

TEST(EluderExact, IndicatorClassGivesOneLessThanN) {
  // f_rho(a) = 1(rho == a). Along a sequence of distinct actions a_1..a_k,
  // a_k is eps'-independent (eps' < 1) of the prefix only through the pair
  // (f_{a_k}, f_b) with b outside {a_1..a_k}: both vanish on the prefix and
  // differ by 1 at a_k. At k = n no such b exists, so the longest sequence
  // has n - 1 elements.
  for (std::size_t n = 2; n <= 7; ++n) {
    const FiniteFunctionClass fc = make_indicator_class(n);
    EXPECT_EQ(eluder_dimension(fc, 0.5, EluderMode::kExact), n - 1) << n;
    EXPECT_EQ(oracle::eluder_dimension(fc, 0.5), n - 1) << n;
    EXPECT_EQ(eluder_dimension(fc, 1.0, EluderMode::kExact), 0u) << n;
  }
}

TEST(EluderExact, EdgeCases) {
  const FiniteFunctionClass single = from_rows({{0.3, 0.9, 0.1}});
  EXPECT_EQ(eluder_dimension(single, 0.0, EluderMode::kExact), 0u);
  EXPECT_EQ(eluder_dimension(single, 0.0, EluderMode::kGreedy), 0u);
  Rng rng(1);
  EXPECT_THROW(eluder_dimension(make_random_class(3, 12, 0.0, 1.0, rng), 0.1, EluderMode::kExact), SizeError);
  EXPECT_NO_THROW(eluder_dimension(make_random_class(3, 12, 0.0, 1.0, rng), 0.1, EluderMode::kGreedy));
  EXPECT_THROW(eluder_dimension(single, -0.1, EluderMode::kExact), ConfigError);
  EXPECT_THROW(eluder_dimension(FiniteFunctionClass{}, 0.1, EluderMode::kExact), ConfigError);
}

TEST(EluderExact, NonincreasingInEpsAndGreedyIsALowerBound) {
  Rng rng(99);
  for (int c = 0; c < 25; ++c) {
    const FiniteFunctionClass fc = make_random_class(6, 6, 0.0, 1.0, rng);
    std::size_t prev = std::numeric_limits<std::size_t>::max();
    for (double eps : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8, 1.0}) {
      const std::size_t exact = eluder_dimension(fc, eps, EluderMode::kExact);
      EXPECT_LE(exact, prev);
      EXPECT_LE(eluder_dimension(fc, eps, EluderMode::kGreedy, 3), exact);
      prev = exact;
    }
    EXPECT_LE(eluder_dimension(fc, 0.0, EluderMode::kExact), fc.num_actions());
  }
}

TEST(EpsDependence, Examples) {
  const FiniteFunctionClass fc = from_rows({{0.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}});
  const std::vector<ActionId> none;
  const std::vector<ActionId> first{0};
  // Without data every pair is close, and rows 0,1 differ by 1 at action 1.
  EXPECT_FALSE(is_eps_dependent(fc, 1, none, 0.5));
  EXPECT_TRUE(is_eps_dependent(fc, 1, none, 1.0));
  // After observing action 0 rows 0 and 1 remain close, so still independent.
  EXPECT_FALSE(is_eps_dependent(fc, 1, first, 0.5));
  const FiniteFunctionClass fc2 = from_rows({{0.0, 0.0}, {1.0, 1.0}});
  EXPECT_TRUE(is_eps_dependent(fc2, 1, first, 0.5));
  EXPECT_THROW(is_eps_dependent(fc2, 5, first, 0.5), LookupError);
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const FiniteFunctionClass r = lattice_class(4, 4, rng);
    std::vector<ActionId> sub;
    for (ActionId b = 0; b < 4; ++b)
      if (rng.uniform() < 0.5) sub.push_back(b);
    const ActionId a = rng.index(4);
    const double eps = 0.25 * double(rng.index(5));
    ASSERT_EQ(is_eps_dependent(r, a, sub, eps), oracle::is_dependent(r, a, sub, eps));
  }
}

TEST(EluderBounds, LinearBoundDominatesInducedClasses) {
  Rng rng(11);
  for (int c = 0; c < 30; ++c) {
    GlmSpec glm;
    glm.features.resize(6, 2);
    for (Eigen::Index i = 0; i < 6; ++i) glm.features.row(i) = rng.normal_vector(2).transpose();
    glm.grid.resize(5, 2);
    for (Eigen::Index i = 0; i < 5; ++i) glm.grid.row(i) = rng.normal_vector(2).transpose();
    glm.prior = Eigen::VectorXd::Constant(5, 0.2);
    const FiniteFunctionClass fc = glm.induced_class();
    const double s = glm.grid.rowwise().norm().maxCoeff();
    const double gamma = glm.features.rowwise().norm().maxCoeff();
    for (double eps : {0.05, 0.2, 0.5, 1.0}) {
      const double bound = eluder_bound_linear(2, s, gamma, eps);
      EXPECT_GE(bound, double(eluder_dimension(fc, eps, EluderMode::kExact))) << c << " " << eps;
    }
  }
}

TEST(EluderBounds, FormulaValues) {
  EXPECT_NEAR(eluder_bound_linear(2, 1, 1, 0.1), 68.32171846255339, 1e-9);
  EXPECT_NEAR(eluder_bound_glm(2, 2, 1, 1, 0.1), 322.92092316595665, 1e-9);
  // r = 1 reduces the GLM form to the linear form evaluated at alpha0.
  EXPECT_NEAR(eluder_bound_glm(3, 1, 2, 0.5, 0.2), eluder_bound_linear(3, 2, 0.5, 0.2), 1e-9);
  EXPECT_LT(eluder_bound_linear(2, 1, 1, 0.2), eluder_bound_linear(2, 1, 1, 0.1));
  EXPECT_LT(eluder_bound_glm(2, 2, 1, 1, 0.1), eluder_bound_glm(2, 3, 1, 1, 0.1));
  EXPECT_THROW(eluder_bound_linear(2, 1, 1, 0.0), ConfigError);
  EXPECT_THROW(eluder_bound_glm(2, 0.5, 1, 1, 0.1), ConfigError);
}

TEST(Covering, SmallExamples) {
  const FiniteFunctionClass line = from_rows({{0.0}, {1.0}, {2.0}});
  EXPECT_EQ(covering_number(line, 0.4), 3u);
  EXPECT_EQ(covering_number(line, 1.0), 1u);
  EXPECT_EQ(covering_number(line, 0.0), 3u);
  const FiniteFunctionClass dup = from_rows({{0.5, 0.5}, {0.5, 0.5}, {0.0, 1.0}});
  EXPECT_EQ(covering_number(dup, 0.0), 2u);
  EXPECT_EQ(covering_number(make_indicator_class(5), 0.5), 5u);
  EXPECT_EQ(covering_number(make_indicator_class(5), 1.0), 1u);
  EXPECT_THROW(covering_number(line, -1.0), ConfigError);
}

TEST(Covering, ExactNeverExceedsGreedyAndIsMonotone) {
  Rng rng(4);
  for (int c = 0; c < 30; ++c) {
    const FiniteFunctionClass fc = make_random_class(12, 3, 0.0, 1.0, rng);
    std::size_t prev = fc.num_params();
    for (double alpha : {0.0, 0.1, 0.2, 0.3, 0.5, 1.0}) {
      const CoverResult r = covering_number_detail(fc, alpha);
      EXPECT_TRUE(r.exact);
      EXPECT_LE(r.size, covering_number_greedy(fc, alpha));
      EXPECT_LE(r.size, prev);
      prev = r.size;
      const Eigen::MatrixXd dist = sup_distances(fc);
      for (Eigen::Index j = 0; j < dist.rows(); ++j) {
        bool covered = false;
        for (ParamId center : r.centers) covered = covered || dist(Eigen::Index(center), j) <= alpha;
        ASSERT_TRUE(covered);
      }
    }
  }
}

TEST(Kolmogorov, SlopeAndErrors) {
  EXPECT_NEAR(fit_log_log_slope({{0.1, 10}, {0.01, 100}, {0.001, 1000}}), 1.0, 1e-12);
  EXPECT_THROW(fit_log_log_slope({{0.1, 10}}), ConfigError);
  EXPECT_THROW(fit_log_log_slope({{0.1, 10}, {0.1, 12}}), ConfigError);
  EXPECT_THROW(fit_log_log_slope({{0.0, 10}, {0.1, 12}}), ConfigError);
  const KolmogorovEstimate est = kolmogorov_estimate(make_indicator_class(4), {0.25, 0.5, 1.0});
  EXPECT_TRUE(est.finite_class_caveat);
  EXPECT_EQ(est.points.size(), 3u);
}

TEST(Vc, DimensionsAndErrors) {
  EXPECT_EQ(vc_dimension(make_indicator_class(5)), 1u);
  for (std::size_t k = 1; k <= 4; ++k) EXPECT_EQ(vc_dimension(make_binary_cube(k)), k);
  Rng rng(1);
  EXPECT_THROW(vc_dimension(make_random_class(3, 3, 0.0, 1.0, rng)), TypeError);
  EXPECT_THROW(vc_dimension(make_indicator_class(17)), SizeError);
}

TEST(Vc, IndependenceAndStrongDependence) {
  const FiniteFunctionClass cube = make_binary_cube(3);
  const std::vector<ActionId> others{1, 2};
  EXPECT_TRUE(vc_independent(cube, 0, others));
  EXPECT_FALSE(strongly_dependent(cube, 0, others));
  const FiniteFunctionClass ind = make_indicator_class(3);
  // On {1, 2} the all-zero pattern only occurs for row 0, which has f(0) = 1.
  EXPECT_FALSE(vc_independent(ind, 0, others));
  EXPECT_TRUE(strongly_dependent(ind, 0, others));
  const FiniteFunctionClass copy = from_rows({{0, 0}, {1, 1}});
  const std::vector<ActionId> first{0};
  EXPECT_TRUE(strongly_dependent(copy, 1, first));
  EXPECT_THROW(strongly_dependent(copy, 2, first), LookupError);
}

TEST(InformationGain, SumFormEqualsLogDet) {
  Rng rng(8);
  for (int c = 0; c < 40; ++c) {
    const std::size_t n = 2 + rng.index(19), t = 1 + rng.index(20);
    const GpModel gp = make_rbf_gp(n, 0.2 + rng.uniform(), 0.1 + rng.uniform(), rng);
    std::vector<ActionId> picks(t);
    for (auto& p : picks) p = rng.index(n);
    const double sum_form = information_gain(posterior_variance_sequence(gp, picks), gp.noise_var);
    ASSERT_NEAR(sum_form, information_gain_logdet(gp, picks), 1e-9);
    ASSERT_NEAR(sum_form, oracle::half_log_det_gain(gp.kernel, picks, gp.noise_var), 1e-9);
  }
}

TEST(InformationGain, KnownValues) {
  GpModel gp;
  gp.kernel = Eigen::MatrixXd::Identity(3, 3);
  gp.noise_var = 1.0;
  const std::vector<ActionId> one{0};
  EXPECT_NEAR(information_gain_logdet(gp, one), 0.34657359027997264, 1e-15);
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_EQ(information_gain(zeros, 1.0), 0.0);
  EXPECT_THROW(information_gain(zeros, 0.0), ConfigError);
  // Greedy picks each independent arm once before repeating.
  EXPECT_NEAR(greedy_information_gain(gp, 3), 3 * 0.5 * std::log(2.0), 1e-12);
}

TEST(VarianceBounds, PrintedFormFailsConcaveHolds) {
  // sigma^2 = 1, s^2 = 1: printed right side is ln 2 / 2 < 1.
  EXPECT_NEAR(variance_bound_as_printed(1.0, 1.0), 0.34657359027997264, 1e-15);
  EXPECT_NEAR(variance_bound_concave(1.0, 1.0), 1.0, 1e-15);
  std::vector<double> vars;
  for (int i = 1; i <= 100; ++i) vars.push_back(i / 100.0);
  const VarianceBoundCheck c = check_variance_bounds(vars, 1.0);
  EXPECT_EQ(c.terms, 100u);
  EXPECT_EQ(c.concave_failures, 0u);
  EXPECT_EQ(c.printed_failures, 100u);
  EXPECT_GT(c.worst_printed_ratio, 2.0);
}

TEST(Report, IndicatorClass) {
  ComplexityRequest req;
  req.eps_list = {0.5, 0.0};
  req.linear = LinearBoundParams{5, 1, 1};
  const ComplexityReport rep = complexity_report(make_indicator_class(5), req);
  ASSERT_EQ(rep.eluder.size(), 2u);
  EXPECT_EQ(rep.eluder[0].eps, 0.0);
  EXPECT_EQ(rep.eluder[1].value, 4u);
  ASSERT_TRUE(rep.vc_dim.has_value());
  EXPECT_EQ(*rep.vc_dim, 1u);
  ASSERT_EQ(rep.covering.size(), 4u);
  EXPECT_EQ(rep.covering.back().value, 1u);
  ASSERT_TRUE(rep.kolmogorov.has_value());
  std::size_t linear_rows = 0;
  for (const auto& [name, eps, value] : rep.analytic_bounds) linear_rows += name == "linear";
  EXPECT_EQ(linear_rows, 1u);  // eps = 0 has no linear bound
}
