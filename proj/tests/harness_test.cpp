#include <gtest/gtest.h>

#include "speedup/harness.hpp"

namespace speedup::harness {
namespace {

ExperimentConfig small(DomainKind d) {
  auto c = ExperimentConfig::defaults(d);
  c.trials = 3;
  c.test_set_size = 20;
  c.train_max = d == DomainKind::integration ? 6 : 20;
  c.eval_every = 2;
  return c;
}

TEST(Csv, HeaderAndRows) {
  EXPECT_EQ(csv_string({}), "num_examples,mean_accuracy,stddev\n");
  EXPECT_EQ(csv_string({{2, 0.5, 0.1}}), "num_examples,mean_accuracy,stddev\n2,0.5,0.1\n");
  EXPECT_EQ(format_number(1.0), "1");
  EXPECT_EQ(format_number(0.0006), "0.0006");
  EXPECT_EQ(format_number(-0.0), "0");
}

TEST(Stats, SampleStandardDeviation) {
  const auto [m, s] = mean_stddev({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m, 2.5);
  EXPECT_NEAR(s, std::sqrt(5.0 / 3.0), 1e-12);
  EXPECT_EQ(mean_stddev({0.7}).second, 0.0);
}

TEST(Config, DefaultsAndValidation) {
  EXPECT_EQ(ExperimentConfig::defaults(DomainKind::integration).eval_points().size(), 30u);
  EXPECT_EQ(ExperimentConfig::defaults(DomainKind::eightpuzzle).eval_points().size(), 20u);
  auto c = ExperimentConfig::defaults(DomainKind::eightpuzzle);
  c.trials = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = ExperimentConfig::defaults(DomainKind::integration);
  c.eval_every = 31;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_THROW(parse_domain("chess"), ParameterError);
  EXPECT_EQ(parse_domain("eightpuzzle"), DomainKind::eightpuzzle);
}

TEST(Interpolation, LinearBetweenPoints) {
  const std::vector<CurvePoint> pts{{10, 0.2, 0}, {20, 0.6, 0}};
  EXPECT_DOUBLE_EQ(mean_at(pts, 15), 0.4);
  EXPECT_DOUBLE_EQ(mean_at(pts, 5), 0.2);
  EXPECT_DOUBLE_EQ(mean_at(pts, 25), 0.6);
}

TEST(Curve, SameSeedSameBytes) {
  for (auto d : {DomainKind::eightpuzzle, DomainKind::integration}) {
    auto c = small(d);
    const auto one = csv_string(run_curve(c));
    c.threads = 2;
    EXPECT_EQ(csv_string(run_curve(c)), one) << to_string(d);
    c.seed = 2;
    EXPECT_NE(csv_string(run_curve(c)), one) << to_string(d);
  }
}

TEST(Curve, EightPuzzleCoverageGrows) {
  const auto r = run_curve_detailed(small(DomainKind::eightpuzzle));
  ASSERT_EQ(r.points.size(), 10u);
  for (const auto& t : r.trials) {
    for (std::size_t e = 1; e < t.coverage.size(); ++e) EXPECT_GE(t.coverage[e], t.coverage[e - 1]);
    EXPECT_GE(t.accuracy.back(), t.accuracy.front());
  }
  for (const auto& p : r.points) {
    EXPECT_GE(p.mean_accuracy, 0.0);
    EXPECT_LE(p.mean_accuracy, 1.0);
  }
}

TEST(Curve, EmptyLearnerScoresNothing) {
  // With no examples the rule set is all EMPTY and solves no test problem
  // (every test problem contains an integral).
  const RuleSet empty(integration::operator_count());
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto p = integration::generate_problem(rng);
    EXPECT_NE(rule_solve(empty, integration::domain(), p), integration::teacher_solve(p));
  }
  auto t = eight_puzzle::empty_table();
  std::mt19937_64 r2(1);
  for (int i = 0; i < 50; ++i)
    EXPECT_TRUE(is_bottom(macro_solve(t, eight_puzzle::domain(), eight_puzzle::random_solvable(r2))));
}

}  // namespace
}  // namespace speedup::harness
