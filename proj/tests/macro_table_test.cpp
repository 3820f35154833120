#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "speedup/eight_puzzle.hpp"
#include "speedup/macro_table.hpp"

namespace speedup {
namespace {

namespace ep = eight_puzzle;

const std::vector<FeatureState>& boards() {
  static const auto all = ep::reachable_boards();
  return all;
}

const MacroTable& exhaustive() {
  static const auto t = ep::build_exhaustive_table(boards());
  return t;
}

Example<FeatureState> example(const FeatureState& b, MacroTable& teacher) {
  return {b, ep::integrated_teacher(b, teacher)};
}

TEST(MacroTable, CellsStartUnfilled) {
  auto t = ep::empty_table();
  EXPECT_EQ(t.filled_count(), 0u);
  EXPECT_FALSE(t.filled(3, 2));
  EXPECT_TRUE(t.insert(3, 2, ep::parse_moves("rd")));
  EXPECT_FALSE(t.insert(3, 2, ep::parse_moves("lu")));
  EXPECT_EQ(ep::moves_to_string(*t.cell(3, 2)), "rd");
  EXPECT_TRUE(t.insert(2, 2, {}));
  EXPECT_EQ(t.filled_count(), 2u);
  EXPECT_EQ(t.nonempty_count(), 1u);
  EXPECT_THROW(t.cell(9, 1), ParameterError);
  EXPECT_THROW(t.cell(0, 0), ParameterError);
  EXPECT_THROW(t.insert(0, 1, Macro(33, 1)), ParameterError);
}

TEST(MacroTable, RejectsBadConstruction) {
  EXPECT_THROW(MacroTable(3, 3, {0, 1, 2}, {0, 1, 1}), ParameterError);
  EXPECT_THROW(MacroTable(3, 3, {0, 1}, {0, 1, 2}), ParameterError);
  EXPECT_THROW(MacroTable(3, 3, {0, 1, 5}, {0, 1, 2}), ParameterError);
}

TEST(MacroTable, DumpMatchesGoldenFile) {
  std::ifstream f(std::string(SPEEDUP_TEST_DATA) + "/exhaustive_table.txt");
  ASSERT_TRUE(f) << "missing golden file";
  std::stringstream golden;
  golden << f.rdbuf();
  EXPECT_EQ(exhaustive().dump(operator_names(ep::domain())), golden.str());
}

TEST(MacroSolve, GoalNeedsNothing) {
  EXPECT_EQ(macro_solve(exhaustive(), ep::domain(), ep::goal_board()), Solution(Path{}));
}

TEST(MacroSolve, SolvesEveryBoardWithTheFullTable) {
  const auto d = ep::domain();
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    const auto b = ep::random_solvable(rng);
    const auto s = macro_solve(exhaustive(), d, b);
    ASSERT_FALSE(is_bottom(s));
    EXPECT_EQ(replay(d, b, path_of(s)).back(), ep::goal_board());
    EXPECT_LE(path_of(s).size(), 9 * exhaustive().max_filled_length());
  }
}

TEST(MacroSolve, UnfilledCellGivesBottomAndReportsIt) {
  auto t = ep::empty_table();
  const auto b = ep::apply_moves(ep::goal_board(), "dr");
  const auto r = macro_solve_detailed(t, ep::domain(), b);
  EXPECT_TRUE(is_bottom(r.solution));
  ASSERT_TRUE(r.missing);
  EXPECT_EQ(r.missing->first, b[0]);
  EXPECT_EQ(r.missing->second, 1u);
}

TEST(MacroSolve, InapplicableMoveMeansCorruption) {
  auto t = ep::empty_table();
  // Blank on position 1 (top-left) cannot take a tile from its left.
  t.set(1, 1, ep::parse_moves("r"));
  EXPECT_THROW(macro_solve(t, ep::domain(), ep::apply_moves(ep::goal_board(), "dr")), TableCorruptionError);
}

TEST(SerialParse, BottomOnlySampleLeavesTableEmpty) {
  const std::vector<Example<FeatureState>> sample{{ep::goal_board(), Bottom{}}, {ep::goal_board(), Bottom{}}};
  const auto t = serial_parse(sample, ep::domain(), 9, 9, ep::goal_board(), ep::blank_first());
  EXPECT_EQ(t.filled_count(), 0u);
}

TEST(SerialParse, SplitsAtEarliestGoalPrefixes) {
  // Board (a): blank on 5, tile 1 on 2; "dr" then "rdlu" solves it.
  const auto a = ep::apply_moves(ep::goal_board(), "drullu");
  const auto d = ep::domain();
  const Example<FeatureState> ex{a, macro_path(ep::parse_moves("drrdlu"))};
  const auto t = serial_parse({ex}, d, 9, 9, ep::goal_board(), ep::blank_first());
  EXPECT_EQ(ep::moves_to_string(*t.cell(5, 1)), "dr");
  EXPECT_EQ(ep::moves_to_string(*t.cell(2, 2)), "rdlu");
  // Tiles 2..8 were already home: null macros fill the rest of the columns.
  for (std::size_t i = 3; i <= 9; ++i) {
    ASSERT_TRUE(t.filled(static_cast<int>(i - 1), i));
    EXPECT_TRUE(t.cell(static_cast<int>(i - 1), i)->empty());
  }
  EXPECT_EQ(t.filled_count(), 9u);
  EXPECT_EQ(macro_solve(t, d, a), ex.solution);
}

TEST(SerialParse, FirstSeenMacroIsKept) {
  const auto d = ep::domain();
  auto teacher = ep::empty_table();
  std::mt19937_64 rng(12);
  std::vector<Example<FeatureState>> sample;
  for (int i = 0; i < 25; ++i) sample.push_back(example(ep::random_solvable(rng), teacher));
  auto t = serial_parse(sample, d, 9, 9, ep::goal_board(), ep::blank_first());
  EXPECT_TRUE(is_consistent<FeatureState>([&](const FeatureState& s) { return macro_solve(t, d, s); }, sample));

  // A different (longer but valid) solution for an already covered cell
  // does not overwrite it.
  const auto before = t;
  const auto b = ep::apply_moves(ep::goal_board(), "dr");
  if (t.filled(b[0], 1)) {
    const Example<FeatureState> alt{b, macro_path(ep::parse_moves("lrlu"))};
    serial_parse_into(t, d, {alt});
    EXPECT_EQ(t, before);
  }
}

TEST(SerialParse, MalformedSolutions) {
  const auto d = ep::domain();
  auto t = ep::empty_table();
  const auto b = ep::apply_moves(ep::goal_board(), "dr");
  EXPECT_THROW(serial_parse_example(t, d, {b, macro_path(ep::parse_moves("l"))}), MalformedSolutionError);
  EXPECT_THROW(serial_parse_example(t, d, {b, macro_path(ep::parse_moves("ludu"))}), MalformedSolutionError);
  auto shortest = MacroTable(9, 9, ep::goal_board(), ep::blank_first(), 1);
  EXPECT_THROW(serial_parse_example(shortest, d, {b, macro_path(ep::parse_moves("lu"))}), MalformedSolutionError);
}

TEST(SerialParse, CoverageNeverShrinks) {
  const auto d = ep::domain();
  auto teacher = ep::empty_table();
  auto learner = ep::empty_table();
  std::mt19937_64 rng(77);
  std::size_t last = 0;
  for (int i = 0; i < 40; ++i) {
    const auto before = learner;
    serial_parse_example(learner, d, example(ep::random_solvable(rng), teacher));
    for (int j = 0; j < 9; ++j)
      for (std::size_t c = 1; c <= 9; ++c) {
        if (before.filled(j, c)) {
          EXPECT_EQ(before.cell(j, c), learner.cell(j, c));
        }
      }
    EXPECT_GE(learner.filled_count(), last);
    last = learner.filled_count();
  }
  // Every learned macro is a genuine, nonredundant table macro.
  EXPECT_TRUE(verify_table(learner, d, boards()).ok);
}

TEST(Decomposability, BlankFirstHoldsBlankLastFails) {
  const auto d = ep::domain();
  EXPECT_TRUE(check_serial_decomposability(d, ep::blank_first(), 9, boards()).ok);
  const auto r = check_serial_decomposability(d, ep::blank_last(), 9, boards());
  ASSERT_FALSE(r.ok);
  const auto& w = *r.witness;
  // The two witness states agree on the first `position` ordered features
  // but the operator moves feature `position` differently.
  for (std::size_t q = 0; q < w.position; ++q) {
    const auto f = static_cast<std::size_t>(ep::blank_last()[q]);
    EXPECT_EQ(w.first[f], w.second[f]);
  }
  EXPECT_NE(w.first_outcome, w.second_outcome);
}

TEST(Decomposability, SingleFeatureIsTrivial) {
  DomainSpec<FeatureState> d;
  d.goal_test = [](const FeatureState& s) { return s[0] == 0; };
  d.operators.push_back({"inc", [](const FeatureState& s, const std::optional<Location>&) -> std::optional<FeatureState> {
                           return FeatureState{(s[0] + 1) % 3};
                         }});
  EXPECT_TRUE(check_serial_decomposability(d, {0}, 3, {{0}, {1}, {2}}).ok);
}

TEST(VerifyTable, AcceptsTheExhaustiveTable) {
  const auto r = verify_table(exhaustive(), ep::domain(), boards());
  EXPECT_TRUE(r.ok) << (r.witness ? r.witness->reason : "");
}

TEST(VerifyTable, TruncatedMacroFails) {
  auto t = exhaustive();
  auto m = *t.cell(4, 2);
  ASSERT_GT(m.size(), 1u);
  m.pop_back();
  t.set(4, 2, m);
  const auto r = verify_table(t, ep::domain(), boards());
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.witness->value, 4);
  EXPECT_EQ(r.witness->position, 2u);
}

TEST(VerifyTable, RedundantMacroFails) {
  auto t = ep::empty_table();
  // "lr" returns to the start: its empty prefix already satisfies column 1.
  t.set(0, 1, ep::parse_moves("lr"));
  const auto r = verify_table(t, ep::domain(), boards());
  ASSERT_FALSE(r.ok);
  EXPECT_EQ(r.witness->value, 0);
}

TEST(VerifyTable, NullMacroOnSatisfiedCellPasses) {
  auto t = ep::empty_table();
  t.set(0, 1, Macro{});
  t.set(1, 2, Macro{});
  EXPECT_TRUE(verify_table(t, ep::domain(), boards()).ok);
}

}  // namespace
}  // namespace speedup
