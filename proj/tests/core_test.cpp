#include <gtest/gtest.h>

#include <cmath>

#include "speedup/core.hpp"

namespace speedup {
namespace {

// Counter domain: state is an int, op 1 adds one, op 2 doubles (only below
// 50). The goal is 10.
DomainSpec<int> counter() {
  DomainSpec<int> d;
  d.goal_test = [](int x) { return x == 10; };
  d.operators.push_back({"inc", [](int x, const std::optional<Location>&) -> std::optional<int> { return x + 1; }});
  d.operators.push_back({"dbl", [](int x, const std::optional<Location>&) -> std::optional<int> {
                           if (x >= 50) return std::nullopt;
                           return 2 * x;
                         }});
  return d;
}

Path ops(std::initializer_list<int> ids) {
  Path p;
  for (int id : ids) p.push_back(Step{id, std::nullopt});
  return p;
}

TEST(SampleSize, MatchesClosedForm) {
  auto oracle = [](double eps, double delta, double dim) {
    return static_cast<std::uint64_t>(std::ceil((dim * std::log(2.0) + std::log(1.0 / delta)) / eps));
  };
  EXPECT_EQ(sample_size(0.1, 0.1, 81), 585u);
  EXPECT_EQ(sample_size(0.1, 0.1, 35), 266u);
  EXPECT_EQ(sample_size(1.0, 1.0, 0), 0u);
  for (double dim : {0.0, 1.0, 7.0, 100.0, 1234.0})
    for (double eps : {0.05, 0.2, 0.5})
      EXPECT_EQ(sample_size(eps, 0.05, dim), oracle(eps, 0.05, dim));
}

TEST(SampleSize, RejectsBadParameters) {
  EXPECT_THROW(sample_size(0.0, 0.1, 1), ParameterError);
  EXPECT_THROW(sample_size(1.5, 0.1, 1), ParameterError);
  EXPECT_THROW(sample_size(0.1, 0.0, 1), ParameterError);
  EXPECT_THROW(sample_size(0.1, 0.1, -1), ParameterError);
  EXPECT_THROW(sample_size(0.1, 0.1, std::nan("")), ParameterError);
}

TEST(LearnParams, Validate) {
  LearnParams p;
  EXPECT_NO_THROW(p.validate());
  p.max_solution_length = 0;
  EXPECT_THROW(p.validate(), ParameterError);
}

TEST(Solution, TextRoundTrip) {
  Path p{{3, Location{}}, {6, Location{0}}, {16, Location{1, 0, 1}}, {2, std::nullopt}};
  const auto text = solution_to_string(p);
  EXPECT_EQ(text, "3@,6@0,16@1.0.1,2");
  EXPECT_EQ(solution_from_string(text), Solution(p));
  EXPECT_EQ(solution_to_string(Bottom{}), "⊥");
  EXPECT_TRUE(is_bottom(solution_from_string("⊥")));
  EXPECT_EQ(solution_from_string(""), Solution(Path{}));
  EXPECT_THROW(solution_from_string("x@1"), ParameterError);
}

TEST(Replay, TrajectoryAndErrors) {
  const auto d = counter();
  const auto xs = replay(d, 3, ops({1, 2, 2}));
  EXPECT_EQ(xs, (std::vector<int>{3, 4, 8, 16}));
  try {
    replay(d, 30, ops({1, 2, 2}));
    FAIL() << "expected a replay error";
  } catch (const ReplayError& e) {
    EXPECT_EQ(e.step(), 2u);
  }
  EXPECT_THROW(replay(d, 0, ops({3})), ReplayError);
}

TEST(Oracle, SolvedProblemChecksTheTeacher) {
  const auto d = counter();
  OracleConfig<int> good{[](std::mt19937_64& rng) { return static_cast<int>(rng() % 5); },
                         [](int x) -> Solution {
                           Path p;
                           for (int i = x; i < 10; ++i) p.push_back(Step{1, std::nullopt});
                           return p;
                         },
                         7};
  Oracle<int> o(good);
  for (int i = 0; i < 20; ++i) {
    const auto ex = solved_problem(o, d);
    EXPECT_EQ(path_of(ex.solution).size(), static_cast<std::size_t>(10 - ex.problem));
  }

  auto wrong = good;
  wrong.teacher = [](int) -> Solution { return ops({1}); };
  Oracle<int> bad(wrong);
  EXPECT_THROW(solved_problem(bad, d), OracleIntegrityError);

  Oracle<int> short_limit(good, 3);
  EXPECT_THROW(
      {
        for (int i = 0; i < 20; ++i) solved_problem(short_limit, d);
      },
      OracleIntegrityError);

  auto none = good;
  none.teacher = [](int) -> Solution { return Bottom{}; };
  Oracle<int> bottom(none);
  EXPECT_TRUE(is_bottom(solved_problem(bottom, d).solution));
}

TEST(Oracle, SameSeedSameProblems) {
  OracleConfig<int> c{[](std::mt19937_64& rng) { return static_cast<int>(rng() % 1000); },
                      [](int) -> Solution { return Bottom{}; }, 42};
  Oracle<int> a(c), b(c);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(a.draw_problem(), b.draw_problem());
}

TEST(Consistency, ComparesExactSolutions) {
  std::vector<Example<int>> sample{{1, ops({1, 1})}, {2, Bottom{}}};
  auto same = [](int) -> Solution { return ops({1, 1}); };
  auto other = [](int) -> Solution { return ops({1}); };
  auto throws = [](int) -> Solution { throw Error("boom"); };
  EXPECT_TRUE(is_consistent<int>(same, sample));
  EXPECT_FALSE(is_consistent<int>(other, sample));
  EXPECT_FALSE(is_consistent<int>(throws, sample));
  EXPECT_TRUE(is_consistent<int>(other, std::vector<Example<int>>{{3, Bottom{}}}));
}

TEST(Seeds, DerivedStreamsDiffer) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 3, 0));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(1, 2, 1));
  EXPECT_NE(derive_seed(1, 2, 0), derive_seed(2, 2, 0));
}

}  // namespace
}  // namespace speedup
