#pragma once

// The Eight Puzzle as a feature-vector domain: feature t is tile t (0 = the
// blank), its value the position the tile occupies. Positions ring the board
//
//   1 2 3
//   8 0 4
//   7 6 5
//
// and the goal puts tile t on position t. Moves name the direction a tile
// slides into the blank.

#include <algorithm>
#include <array>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "speedup/core.hpp"
#include "speedup/macro_table.hpp"

namespace speedup::eight_puzzle {

inline constexpr int kTiles = 9;

enum class Move : int { r = 1, l = 2, u = 3, d = 4 };

inline constexpr std::array<char, 4> kMoveLetters{'r', 'l', 'u', 'd'};

struct Cell {
  int row, col;
};

inline constexpr std::array<Cell, kTiles> kCoord{{{1, 1}, {0, 0}, {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}}};

inline constexpr int position_at(int row, int col) {
  constexpr int grid[3][3] = {{1, 2, 3}, {8, 0, 4}, {7, 6, 5}};
  return grid[row][col];
}

inline constexpr int manhattan(int p, int q) {
  const int dr = kCoord[p].row - kCoord[q].row, dc = kCoord[p].col - kCoord[q].col;
  return (dr < 0 ? -dr : dr) + (dc < 0 ? -dc : dc);
}

/// Position of the tile that slides into a blank at `blank`, or -1.
inline constexpr int source_of(int blank, Move m) {
  auto [row, col] = kCoord[blank];
  switch (m) {
    case Move::r: col -= 1; break;  // tile left of the blank moves right
    case Move::l: col += 1; break;
    case Move::u: row += 1; break;  // tile below the blank moves up
    case Move::d: row -= 1; break;
  }
  if (row < 0 || row > 2 || col < 0 || col > 2) return -1;
  return position_at(row, col);
}

inline constexpr Move inverse(Move m) {
  switch (m) {
    case Move::r: return Move::l;
    case Move::l: return Move::r;
    case Move::u: return Move::d;
    case Move::d: return Move::u;
  }
  return m;
}

inline FeatureState goal_board() {
  FeatureState b(kTiles);
  for (int t = 0; t < kTiles; ++t) b[static_cast<std::size_t>(t)] = t;
  return b;
}

inline FeatureOrdering blank_first() { return identity_ordering(kTiles); }

inline FeatureOrdering blank_last() {
  FeatureOrdering o;
  for (int t = 1; t < kTiles; ++t) o.push_back(t);
  o.push_back(0);
  return o;
}

inline bool is_valid(const FeatureState& b) {
  if (b.size() != kTiles) return false;
  unsigned seen = 0;
  for (int p : b) {
    if (p < 0 || p >= kTiles || (seen >> p & 1u)) return false;
    seen |= 1u << p;
  }
  return true;
}

inline void require_valid(const FeatureState& b) {
  if (!is_valid(b)) throw ParameterError("board is not a permutation of positions 0..8");
}

/// tile_at[p] for every position.
inline std::array<int, kTiles> tiles_by_position(const FeatureState& b) {
  std::array<int, kTiles> at{};
  for (int t = 0; t < kTiles; ++t) at[static_cast<std::size_t>(b[static_cast<std::size_t>(t)])] = t;
  return at;
}

/// Nine digits; digit p is the tile on position p.
inline std::string to_string(const FeatureState& b) {
  require_valid(b);
  std::string s;
  for (int t : tiles_by_position(b)) s += static_cast<char>('0' + t);
  return s;
}

inline FeatureState from_string(std::string_view text) {
  if (text.size() != kTiles) throw ParameterError("board text must have 9 digits");
  FeatureState b(kTiles, -1);
  for (int p = 0; p < kTiles; ++p) {
    const char c = text[static_cast<std::size_t>(p)];
    if (c < '0' || c > '8') throw ParameterError("board text must use digits 0..8");
    auto& slot = b[static_cast<std::size_t>(c - '0')];
    if (slot != -1) throw ParameterError("board text repeats a tile");
    slot = p;
  }
  return b;
}

/// Row-major picture, blank shown as '.'.
inline std::string render(const FeatureState& b) {
  const auto at = tiles_by_position(b);
  std::string out;
  for (int row = 0; row < 3; ++row) {
    for (int col = 0; col < 3; ++col) {
      const int t = at[static_cast<std::size_t>(position_at(row, col))];
      if (col) out += ' ';
      out += t == 0 ? '.' : static_cast<char>('0' + t);
    }
    out += '\n';
  }
  return out;
}

inline std::optional<FeatureState> try_move(const FeatureState& b, Move m) {
  const int blank = b[0];
  const int src = source_of(blank, m);
  if (src < 0) return std::nullopt;
  FeatureState next = b;
  for (int t = 1; t < kTiles; ++t) {
    if (b[static_cast<std::size_t>(t)] == src) {
      next[static_cast<std::size_t>(t)] = blank;
      break;
    }
  }
  next[0] = src;
  return next;
}

inline FeatureState apply_move(const FeatureState& b, Move m) {
  require_valid(b);
  auto next = try_move(b, m);
  if (!next)
    throw MoveError(std::string("move '") + kMoveLetters[static_cast<std::size_t>(m) - 1] +
                    "' is not applicable with the blank at position " + std::to_string(b[0]));
  return *next;
}

inline Macro parse_moves(std::string_view letters) {
  Macro m;
  for (char c : letters) {
    auto it = std::find(kMoveLetters.begin(), kMoveLetters.end(), c);
    if (it == kMoveLetters.end()) throw ParameterError(std::string("unknown move letter '") + c + "'");
    m.push_back(static_cast<int>(it - kMoveLetters.begin()) + 1);
  }
  return m;
}

inline std::string moves_to_string(const Macro& m) {
  std::string s;
  for (int op : m) {
    if (op < 1 || op > 4) throw ParameterError("move index out of range");
    s += kMoveLetters[static_cast<std::size_t>(op - 1)];
  }
  return s;
}

inline std::string moves_to_string(const Solution& s) {
  if (is_bottom(s)) return "⊥";
  Macro m;
  for (const auto& step : path_of(s)) m.push_back(step.op);
  return moves_to_string(m);
}

inline FeatureState apply_moves(FeatureState b, std::string_view letters) {
  for (int op : parse_moves(letters)) b = apply_move(b, static_cast<Move>(op));
  return b;
}

inline DomainSpec<FeatureState> domain() {
  DomainSpec<FeatureState> d;
  d.state_size = kTiles;
  d.goal_test = [](const FeatureState& b) { return b == goal_board(); };
  for (int op = 1; op <= 4; ++op) {
    const Move m = static_cast<Move>(op);
    d.operators.push_back({std::string(1, kMoveLetters[static_cast<std::size_t>(op - 1)]),
                           [m](const FeatureState& b, const std::optional<Location>&) -> std::optional<FeatureState> {
                             if (b.size() != kTiles) throw ParameterError("board must have 9 features");
                             return try_move(b, m);
                           }});
  }
  return d;
}

/// Inversions among the non-blank tiles read row by row.
inline int inversions(const FeatureState& b) {
  std::vector<int> seq;
  const auto at = tiles_by_position(b);
  for (int row = 0; row < 3; ++row)
    for (int col = 0; col < 3; ++col)
      if (int t = at[static_cast<std::size_t>(position_at(row, col))]; t != 0) seq.push_back(t);
  int inv = 0;
  for (std::size_t a = 0; a < seq.size(); ++a)
    for (std::size_t c = a + 1; c < seq.size(); ++c) inv += seq[a] > seq[c];
  return inv;
}

/// On a board three wide, moves preserve inversion parity, and parity is the
/// only invariant: reachable from the goal iff parity matches the goal's.
inline bool is_solvable(const FeatureState& b) {
  require_valid(b);
  static const int goal_parity = inversions(goal_board()) & 1;
  return (inversions(b) & 1) == goal_parity;
}

inline FeatureState random_solvable(std::mt19937_64& rng) {
  FeatureState b = goal_board();
  do {
    std::shuffle(b.begin(), b.end(), rng);
  } while (!is_solvable(b));
  return b;
}

/// Lehmer rank of the tile-by-position permutation, in [0, 9!).
inline std::uint32_t rank(const FeatureState& b) {
  const auto at = tiles_by_position(b);
  std::uint32_t r = 0;
  for (int p = 0; p < kTiles; ++p) {
    int smaller = 0;
    for (int q = p + 1; q < kTiles; ++q) smaller += at[static_cast<std::size_t>(q)] < at[static_cast<std::size_t>(p)];
    r = r * static_cast<std::uint32_t>(kTiles - p) + static_cast<std::uint32_t>(smaller);
  }
  return r;
}

inline constexpr std::uint32_t kPermutations = 362880;

/// Breadth-first enumeration of every board reachable from the goal.
inline std::vector<FeatureState> reachable_boards() {
  std::vector<char> seen(kPermutations, 0);
  std::vector<FeatureState> order;
  order.reserve(kPermutations / 2);
  order.push_back(goal_board());
  seen[rank(order.back())] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (int op = 1; op <= 4; ++op) {
      auto next = try_move(order[head], static_cast<Move>(op));
      if (!next) continue;
      auto& s = seen[rank(*next)];
      if (s) continue;
      s = 1;
      order.push_back(std::move(*next));
    }
  }
  return order;
}

namespace detail {

struct Search {
  std::array<int, kTiles> pos{};  // tile -> position
  std::array<int, kTiles> at{};   // position -> tile
  std::array<int, kTiles> target{};
  std::array<bool, kTiles> in_subgoal{};
  Macro path;
  std::uint64_t nodes = 0;

  bool satisfied() const {
    for (int t = 0; t < kTiles; ++t)
      if (in_subgoal[t] && pos[t] != target[t]) return false;
    return true;
  }

  int heuristic() const {
    int h = 0;
    for (int t = 1; t < kTiles; ++t)
      if (in_subgoal[t]) h += manhattan(pos[t], target[t]);
    return h;
  }

  // Returns -1 when found, else the least f that exceeded `bound`.
  int dfs(int g, int h, int bound, int last) {
    ++nodes;
    const int f = g + h;
    if (f > bound) return f;
    if (satisfied()) return -1;
    int next_bound = std::numeric_limits<int>::max();
    for (int op = 1; op <= 4; ++op) {
      const Move m = static_cast<Move>(op);
      if (last != 0 && static_cast<int>(inverse(static_cast<Move>(last))) == op) continue;
      const int blank = pos[0];
      const int src = source_of(blank, m);
      if (src < 0) continue;
      const int tile = at[src];
      int h2 = h;
      if (in_subgoal[tile]) h2 += manhattan(blank, target[tile]) - manhattan(src, target[tile]);
      pos[tile] = blank, at[blank] = tile, pos[0] = src, at[src] = 0;
      path.push_back(op);
      const int r = dfs(g + 1, h2, bound, op);
      if (r == -1) return -1;
      path.pop_back();
      pos[tile] = src, at[src] = tile, pos[0] = blank, at[blank] = 0;
      next_bound = std::min(next_bound, r);
    }
    return next_bound;
  }
};

inline Search make_search(const FeatureState& b, std::size_t i, const FeatureOrdering& ordering,
                          const FeatureState& goal) {
  require_valid(b);
  require_valid(goal);
  validate_ordering(ordering, kTiles);
  if (i < 1 || i > kTiles) throw ParameterError("subgoal position must lie in 1..9");
  Search s;
  for (int t = 0; t < kTiles; ++t) {
    s.pos[t] = b[static_cast<std::size_t>(t)];
    s.at[static_cast<std::size_t>(s.pos[t])] = t;
    s.target[t] = goal[static_cast<std::size_t>(t)];
  }
  for (std::size_t q = 0; q < i; ++q) s.in_subgoal[static_cast<std::size_t>(ordering[q])] = true;
  return s;
}

inline bool same_parity_as(const FeatureState& b, const FeatureState& goal) {
  return (inversions(b) & 1) == (inversions(goal) & 1);
}

}  // namespace detail

/// Admissible estimate for the subgoal: Manhattan distance of each non-blank
/// tile among ordered features 1..i.
inline int subgoal_heuristic(const FeatureState& b, std::size_t i, const FeatureOrdering& ordering,
                             const FeatureState& goal) {
  return detail::make_search(b, i, ordering, goal).heuristic();
}

/// Shortest move sequence bringing ordered features 1..i to their goal
/// positions, by IDA*. Children are tried in r, l, u, d order, so the result
/// is the first shortest sequence in that order.
inline Macro ida_star_subgoal(const FeatureState& b, std::size_t i, const FeatureOrdering& ordering,
                              const FeatureState& goal) {
  auto s = detail::make_search(b, i, ordering, goal);
  if (!detail::same_parity_as(b, goal)) throw ParameterError("board cannot reach the goal");
  MacroTable probe(kTiles, kTiles, goal, ordering);
  if (!probe.prefix_at_goal(b, i - 1)) throw ParameterError("earlier subgoals are not satisfied");
  const int h = s.heuristic();
  int bound = h;
  for (;;) {
    const int r = s.dfs(0, h, bound, 0);
    if (r == -1) return s.path;
    bound = r;
  }
}

/// Breadth-first length of the shortest sequence satisfying the subgoal.
inline std::size_t subgoal_distance_bfs(const FeatureState& b, std::size_t i, const FeatureOrdering& ordering,
                                        const FeatureState& goal) {
  require_valid(b);
  MacroTable probe(kTiles, kTiles, goal, ordering);
  std::vector<char> seen(kPermutations, 0);
  std::deque<std::pair<FeatureState, std::size_t>> queue{{b, 0}};
  seen[rank(b)] = 1;
  while (!queue.empty()) {
    auto [x, dist] = std::move(queue.front());
    queue.pop_front();
    if (probe.prefix_at_goal(x, i)) return dist;
    for (int op = 1; op <= 4; ++op) {
      auto next = try_move(x, static_cast<Move>(op));
      if (!next) continue;
      auto& s = seen[rank(*next)];
      if (s) continue;
      s = 1;
      queue.emplace_back(std::move(*next), dist + 1);
    }
  }
  throw ParameterError("subgoal unreachable from this board");
}

inline MacroTable empty_table(const FeatureOrdering& ordering = blank_first()) {
  return MacroTable(kTiles, kTiles, goal_board(), ordering);
}

/// The search-based teacher: walks the columns, applying the stored macro
/// where one exists and otherwise searching for one and storing it. Satisfied
/// subgoals cost nothing and leave their cells untouched.
inline Solution integrated_teacher(const FeatureState& b, MacroTable& table) {
  if (!is_solvable(b)) return Bottom{};
  Path path;
  FeatureState x = b;
  for (std::size_t i = 1; i <= table.n(); ++i) {
    const int j = table.value_at(x, i);
    std::optional<Macro> m = table.cell(j, i);
    if (!m) {
      if (j == table.goal_at(i)) continue;
      m = ida_star_subgoal(x, i, table.ordering(), table.goal());
      table.insert(j, i, *m);
    }
    for (int op : *m) {
      auto next = try_move(x, static_cast<Move>(op));
      if (!next) throw TableCorruptionError("stored macro applies an inapplicable move");
      x = std::move(*next);
      path.push_back(Step{op, std::nullopt});
    }
  }
  return path;
}

/// Fills every reachable cell by searching from one representative state per
/// cell: null macros where the subgoal already holds, IDA* macros elsewhere.
/// Cells no solvable board can reach stay UNFILLED.
inline MacroTable build_exhaustive_table(const std::vector<FeatureState>& boards,
                                         const FeatureOrdering& ordering = blank_first()) {
  MacroTable table = empty_table(ordering);
  std::vector<std::optional<std::size_t>> rep(kTiles * kTiles);
  for (std::size_t si = 0; si < boards.size(); ++si) {
    for (std::size_t i = 1; i <= kTiles; ++i) {
      if (!table.prefix_at_goal(boards[si], i - 1)) break;
      auto& r = rep[static_cast<std::size_t>(table.value_at(boards[si], i)) * kTiles + (i - 1)];
      if (!r) r = si;
    }
  }
  for (int j = 0; j < kTiles; ++j) {
    for (std::size_t i = 1; i <= kTiles; ++i) {
      const auto& r = rep[static_cast<std::size_t>(j) * kTiles + (i - 1)];
      if (!r) continue;
      table.insert(j, i, ida_star_subgoal(boards[*r], i, ordering, table.goal()));
    }
  }
  return table;
}

inline OracleConfig<FeatureState> oracle_config(std::uint64_t seed, MacroTable& teacher_table) {
  OracleConfig<FeatureState> c;
  c.problem_generator = [](std::mt19937_64& rng) { return random_solvable(rng); };
  c.teacher = [&teacher_table](const FeatureState& b) { return integrated_teacher(b, teacher_table); };
  c.seed = seed;
  return c;
}

}  // namespace speedup::eight_puzzle
