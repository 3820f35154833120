#pragma once

// Macro tables over feature-vector states: the macro problem solver, serial
// parsing of example solutions into macros, and exhaustive checks of serial
// decomposability and of the macro-table property.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "speedup/core.hpp"

namespace speedup {

/// values[f] is the value (0..v-1) of feature f.
using FeatureState = std::vector<int>;

/// Ω: ordering[i-1] is the feature solved at ordered position i.
using FeatureOrdering = std::vector<int>;

/// Operator indices (1-based). Empty = the null macro.
using Macro = std::vector<int>;

inline void validate_ordering(const FeatureOrdering& ordering, std::size_t n) {
  if (ordering.size() != n) throw ParameterError("ordering must list every feature once");
  std::vector<char> seen(n, 0);
  for (int f : ordering) {
    if (f < 0 || static_cast<std::size_t>(f) >= n || seen[static_cast<std::size_t>(f)])
      throw ParameterError("ordering is not a permutation of the features");
    seen[static_cast<std::size_t>(f)] = 1;
  }
}

inline FeatureOrdering identity_ordering(std::size_t n) {
  FeatureOrdering o(n);
  for (std::size_t i = 0; i < n; ++i) o[i] = static_cast<int>(i);
  return o;
}

inline Path macro_path(const Macro& m) {
  Path p;
  p.reserve(m.size());
  for (int op : m) p.push_back(Step{op, std::nullopt});
  return p;
}

/// Grid of macros M[j][i]: row j = feature value, column i = ordered feature
/// position 1..n. A cell is UNFILLED (nullopt), null (empty) or a macro.
class MacroTable {
 public:
  MacroTable(std::size_t n, std::size_t v, FeatureState goal, FeatureOrdering ordering,
             std::size_t max_macro_length = 32)
      : n_(n), v_(v), goal_(std::move(goal)), ordering_(std::move(ordering)), max_len_(max_macro_length),
        cells_(n * v) {
    if (n == 0 || v == 0) throw ParameterError("table dimensions must be positive");
    if (goal_.size() != n) throw ParameterError("goal must have n features");
    for (int g : goal_)
      if (g < 0 || static_cast<std::size_t>(g) >= v) throw ParameterError("goal value out of range");
    validate_ordering(ordering_, n);
  }

  std::size_t n() const { return n_; }
  std::size_t v() const { return v_; }
  const FeatureState& goal() const { return goal_; }
  const FeatureOrdering& ordering() const { return ordering_; }
  std::size_t max_macro_length() const { return max_len_; }

  /// Feature solved at ordered position i (1-based).
  int feature(std::size_t i) const { return ordering_.at(i - 1); }
  int value_at(const FeatureState& s, std::size_t i) const { return s.at(static_cast<std::size_t>(feature(i))); }
  int goal_at(std::size_t i) const { return goal_[static_cast<std::size_t>(feature(i))]; }

  /// Ordered features 1..i all hold their goal values.
  bool prefix_at_goal(const FeatureState& s, std::size_t i) const {
    for (std::size_t q = 1; q <= i; ++q)
      if (value_at(s, q) != goal_at(q)) return false;
    return true;
  }

  const std::optional<Macro>& cell(int j, std::size_t i) const { return cells_.at(index(j, i)); }
  bool filled(int j, std::size_t i) const { return cell(j, i).has_value(); }

  /// Stores a macro in an UNFILLED cell; filled cells are never overwritten.
  /// Returns whether the macro was stored.
  bool insert(int j, std::size_t i, Macro m) {
    if (m.size() > max_len_) throw ParameterError("macro longer than the configured maximum");
    auto& c = cells_.at(index(j, i));
    if (c) return false;
    c = std::move(m);
    return true;
  }

  /// Replaces a cell unconditionally (for constructing test tables).
  void set(int j, std::size_t i, std::optional<Macro> m) { cells_.at(index(j, i)) = std::move(m); }

  std::size_t filled_count() const {
    std::size_t c = 0;
    for (const auto& m : cells_) c += m.has_value();
    return c;
  }

  std::size_t nonempty_count() const {
    std::size_t c = 0;
    for (const auto& m : cells_) c += m && !m->empty();
    return c;
  }

  std::size_t max_filled_length() const {
    std::size_t c = 0;
    for (const auto& m : cells_)
      if (m) c = std::max(c, m->size());
    return c;
  }

  /// One line per value row; cells are operator-name strings, `-` for the
  /// null macro and `?` for UNFILLED.
  std::string dump(const std::vector<std::string>& op_names) const {
    std::string out;
    for (std::size_t j = 0; j < v_; ++j) {
      for (std::size_t i = 1; i <= n_; ++i) {
        if (i > 1) out += ' ';
        const auto& c = cell(static_cast<int>(j), i);
        if (!c) {
          out += '?';
        } else if (c->empty()) {
          out += '-';
        } else {
          for (int op : *c) out += op_names.at(static_cast<std::size_t>(op - 1));
        }
      }
      out += '\n';
    }
    return out;
  }

  friend bool operator==(const MacroTable& a, const MacroTable& b) {
    return a.n_ == b.n_ && a.v_ == b.v_ && a.goal_ == b.goal_ && a.ordering_ == b.ordering_ && a.cells_ == b.cells_;
  }

 private:
  std::size_t index(int j, std::size_t i) const {
    if (j < 0 || static_cast<std::size_t>(j) >= v_ || i < 1 || i > n_)
      throw ParameterError("cell (" + std::to_string(j) + ", " + std::to_string(i) + ") out of range");
    return static_cast<std::size_t>(j) * n_ + (i - 1);
  }

  std::size_t n_, v_;
  FeatureState goal_;
  FeatureOrdering ordering_;
  std::size_t max_len_;
  std::vector<std::optional<Macro>> cells_;
};

inline std::vector<std::string> operator_names(const DomainSpec<FeatureState>& d) {
  std::vector<std::string> names;
  for (const auto& op : d.operators) names.push_back(op.name);
  return names;
}

struct MacroSolveResult {
  Solution solution;
  /// The UNFILLED cell (value, position) that stopped the solver, if any.
  std::optional<std::pair<int, std::size_t>> missing;
};

/// For each ordered position in turn, apply the macro for the feature's
/// current value. UNFILLED cells give ⊥; an inapplicable operator inside a
/// macro means the table is corrupt.
inline MacroSolveResult macro_solve_detailed(const MacroTable& table, const DomainSpec<FeatureState>& domain,
                                             const FeatureState& s) {
  Path path;
  FeatureState x = s;
  for (std::size_t i = 1; i <= table.n(); ++i) {
    const int j = table.value_at(x, i);
    const auto& m = table.cell(j, i);
    if (!m) return {Bottom{}, std::make_pair(j, i)};
    for (int op : *m) {
      Step step{op, std::nullopt};
      auto next = domain.apply(x, step);
      if (!next)
        throw TableCorruptionError("macro in cell (" + std::to_string(j) + ", " + std::to_string(i) +
                                   ") applies an inapplicable operator");
      x = std::move(*next);
      path.push_back(step);
    }
  }
  if (x != table.goal()) return {Bottom{}, std::nullopt};
  return {std::move(path), std::nullopt};
}

inline Solution macro_solve(const MacroTable& table, const DomainSpec<FeatureState>& domain, const FeatureState& s) {
  return macro_solve_detailed(table, domain, s).solution;
}

/// Splits one solution into macros at the earliest states where successive
/// goal prefixes hold, filling UNFILLED cells only. Returns the cells filled.
inline std::size_t serial_parse_example(MacroTable& table, const DomainSpec<FeatureState>& domain,
                                        const Example<FeatureState>& ex) {
  if (is_bottom(ex.solution)) return 0;
  const Path& path = path_of(ex.solution);
  const auto xs = replay(domain, ex.problem, path);
  std::size_t p = 0, added = 0;
  for (std::size_t i = 1; i <= table.n(); ++i) {
    const int j = table.value_at(xs[p], i);
    std::size_t k = p;
    while (k < xs.size() && !table.prefix_at_goal(xs[k], i)) ++k;
    if (k == xs.size())
      throw MalformedSolutionError("solution never reaches the goal prefix of length " + std::to_string(i));
    if (k - p > table.max_macro_length())
      throw MalformedSolutionError("segment for position " + std::to_string(i) + " exceeds the maximum macro length");
    if (!table.filled(j, i)) {
      Macro m;
      for (std::size_t q = p; q < k; ++q) m.push_back(path[q].op);
      table.insert(j, i, std::move(m));
      ++added;
    }
    p = k;
  }
  if (p != path.size()) throw MalformedSolutionError("solution continues past the goal");
  return added;
}

inline void serial_parse_into(MacroTable& table, const DomainSpec<FeatureState>& domain,
                              const std::vector<Example<FeatureState>>& sample) {
  for (const auto& ex : sample) serial_parse_example(table, domain, ex);
}

inline MacroTable serial_parse(const std::vector<Example<FeatureState>>& sample,
                               const DomainSpec<FeatureState>& domain, std::size_t n, std::size_t v,
                               const FeatureState& goal, const FeatureOrdering& ordering,
                               std::size_t max_macro_length = 32) {
  MacroTable table(n, v, goal, ordering, max_macro_length);
  serial_parse_into(table, domain, sample);
  return table;
}

namespace detail {
// Mixed-radix key of ordered features 1..i.
class PrefixKeys {
 public:
  PrefixKeys(const FeatureOrdering& ordering, std::size_t v) : ordering_(ordering), v_(v) {
    double cap = 1.0;
    for (std::size_t i = 0; i < ordering.size(); ++i) cap *= static_cast<double>(v);
    if (cap >= 1.8e19) throw ParameterError("state space too large for prefix keys");
  }
  std::uint64_t extend(std::uint64_t key, const FeatureState& s, std::size_t i) const {
    return key * v_ + static_cast<std::uint64_t>(s[static_cast<std::size_t>(ordering_[i - 1])]);
  }

 private:
  const FeatureOrdering& ordering_;
  std::uint64_t v_;
};
}  // namespace detail

struct DecomposabilityWitness {
  int op = 0;
  std::size_t position = 0;  // ordered position i
  FeatureState first, second;
  /// Post-application values of feature i; -1 = inapplicable.
  int first_outcome = 0, second_outcome = 0;
};

struct DecomposabilityReport {
  bool ok = true;
  std::optional<DecomposabilityWitness> witness;
};

/// Within every class of states agreeing on ordered features 1..i, each
/// operator must leave feature i with one and the same value (or be
/// inapplicable throughout).
inline DecomposabilityReport check_serial_decomposability(const DomainSpec<FeatureState>& domain,
                                                          const FeatureOrdering& ordering, std::size_t v,
                                                          const std::vector<FeatureState>& states) {
  const std::size_t n = ordering.size();
  validate_ordering(ordering, n);
  detail::PrefixKeys keys(ordering, v);
  for (std::size_t o = 1; o <= domain.k(); ++o) {
    std::vector<std::unordered_map<std::uint64_t, std::pair<int, std::size_t>>> seen(n + 1);
    for (auto& m : seen) m.reserve(states.size() / 4 + 16);
    for (std::size_t si = 0; si < states.size(); ++si) {
      const auto& s = states[si];
      const auto next = domain.apply(s, Step{static_cast<int>(o), std::nullopt});
      std::uint64_t key = 0;
      for (std::size_t i = 1; i <= n; ++i) {
        key = keys.extend(key, s, i);
        const int outcome = next ? (*next)[static_cast<std::size_t>(ordering[i - 1])] : -1;
        auto [it, inserted] = seen[i].try_emplace(key, outcome, si);
        if (!inserted && it->second.first != outcome) {
          return {false, DecomposabilityWitness{static_cast<int>(o), i, states[it->second.second], s,
                                                it->second.first, outcome}};
        }
      }
    }
  }
  return {true, std::nullopt};
}

struct TableWitness {
  int value = 0;
  std::size_t position = 0;
  FeatureState state;  // empty when no precondition-matching state exists
  std::string reason;
};

struct TableReport {
  bool ok = true;
  std::optional<TableWitness> witness;
  std::size_t checked = 0;  // macro applications performed
};

/// Macro-table property and nonredundancy of every filled cell, over the
/// supplied states.
inline TableReport verify_table(const MacroTable& table, const DomainSpec<FeatureState>& domain,
                                const std::vector<FeatureState>& states) {
  const std::size_t n = table.n(), v = table.v();
  std::vector<char> nonredundant(n * v, 0);
  TableReport report;
  for (const auto& s : states) {
    for (std::size_t i = 1; i <= n; ++i) {
      if (!table.prefix_at_goal(s, i - 1)) break;
      const int j = table.value_at(s, i);
      const auto& m = table.cell(j, i);
      if (!m) continue;
      ++report.checked;
      FeatureState x = s;
      bool prefix_hit = false;
      for (std::size_t q = 0; q < m->size(); ++q) {
        if (table.prefix_at_goal(x, i)) prefix_hit = true;
        auto next = domain.apply(x, Step{(*m)[q], std::nullopt});
        if (!next) return {false, TableWitness{j, i, s, "operator inapplicable inside the macro"}, report.checked};
        x = std::move(*next);
      }
      if (!table.prefix_at_goal(x, i))
        return {false, TableWitness{j, i, s, "macro does not bring features 1..i to their goal values"},
                report.checked};
      if (!prefix_hit) nonredundant[static_cast<std::size_t>(j) * n + (i - 1)] = 1;
    }
  }
  for (std::size_t j = 0; j < v; ++j) {
    for (std::size_t i = 1; i <= n; ++i) {
      const auto& m = table.cell(static_cast<int>(j), i);
      if (!m || m->empty()) continue;
      if (!nonredundant[j * n + (i - 1)])
        return {false, TableWitness{static_cast<int>(j), i, {}, "no state shows the macro is nonredundant"},
                report.checked};
    }
  }
  return report;
}

}  // namespace speedup
