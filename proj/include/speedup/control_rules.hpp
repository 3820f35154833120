#pragma once

// Select control rules: one sentential form per operator, a rule-driven
// solver, and the learner that sets each select-set to the MSG of the units
// the teacher applied that operator to.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "speedup/core.hpp"
#include "speedup/grammar.hpp"

namespace speedup {

/// What the rule machinery needs from a domain besides DomainSpec: a way to
/// see a state as a sequence of parse-tree units (the places an operator may
/// be applied) in the interpreter's visiting order.
template <class State>
struct RuleDomain {
  const Grammar* grammar = nullptr;
  DomainSpec<State> spec;
  /// Calls `visit(location, unit)` for each unit in order until it returns true.
  std::function<void(const State&, const std::function<bool(const Location&, TreeRef)>&)> visit_units;
  /// Parse tree of the unit at `location`.
  std::function<Tree(const State&, const Location&)> unit_at;
  /// Problem size used for the step limit (token length).
  std::function<std::size_t(const State&)> size;
};

struct ControlRule {
  int op = 0;
  /// nullopt = EMPTY: the operator was never observed and never selected.
  std::optional<SententialForm> select;
};

class RuleSet {
 public:
  RuleSet() = default;

  /// All-EMPTY rules for operators 1..k.
  explicit RuleSet(std::size_t k, std::size_t step_factor = 50) : step_factor_(step_factor) {
    if (step_factor == 0) throw ParameterError("step factor must be positive");
    for (std::size_t i = 0; i < k; ++i) rules_.push_back(ControlRule{static_cast<int>(i + 1), std::nullopt});
  }

  std::size_t size() const { return rules_.size(); }
  const ControlRule& rule(int op) const { return rules_.at(index_of(op)); }
  const std::vector<ControlRule>& rules() const { return rules_; }
  std::size_t step_factor() const { return step_factor_; }

  void set(int op, std::optional<SententialForm> select) {
    rules_.at(index_of(op)).select = std::move(select);
    by_root_.clear();
    for (std::size_t i = 0; i < rules_.size(); ++i)
      if (rules_[i].select) by_root_[rules_[i].select->root()].push_back(i);
  }

  /// Rules whose select-set is rooted at `category`, least operator first.
  const std::vector<std::size_t>* candidates(Symbol category) const {
    auto it = by_root_.find(category);
    return it == by_root_.end() ? nullptr : &it->second;
  }

 private:
  std::size_t index_of(int op) const {
    if (op < 1 || static_cast<std::size_t>(op) > rules_.size())
      throw ParameterError("operator index " + std::to_string(op) + " out of range");
    return static_cast<std::size_t>(op - 1);
  }

  std::vector<ControlRule> rules_;
  std::unordered_map<Symbol, std::vector<std::size_t>> by_root_;
  std::size_t step_factor_ = 50;
};

/// `opN: tokens` or `opN: EMPTY`, one line per operator.
inline std::string dump_rules(const Grammar& g, const RuleSet& rules) {
  std::string out;
  for (const auto& r : rules.rules()) {
    out += "op" + std::to_string(r.op) + ": ";
    out += r.select ? r.select->to_text(g) : std::string("EMPTY");
    out += '\n';
  }
  return out;
}

enum class SolveStatus { solved, no_match, step_limit, size_limit };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::solved: return "solved";
    case SolveStatus::no_match: return "no_match";
    case SolveStatus::step_limit: return "step_limit";
    case SolveStatus::size_limit: return "size_limit";
  }
  return "?";
}

struct RuleSolveResult {
  Solution solution;
  SolveStatus status = SolveStatus::solved;
};

/// Rule-driven solver: until the state is a goal, take the first unit (in
/// visiting order) at which some rule fires, firing the least-indexed
/// operator whose select-set contains the unit and which is applicable there.
/// Both the number of steps and the size of intermediate states are bounded
/// by step_factor times the problem size; exceeding either gives ⊥.
template <class State>
RuleSolveResult rule_solve_detailed(const RuleSet& rules, const RuleDomain<State>& domain, const State& problem) {
  Path path;
  State x = problem;
  const std::size_t limit = rules.step_factor() * std::max<std::size_t>(1, domain.size(problem));
  while (!domain.spec.goal_test(x)) {
    if (path.size() >= limit) return {Bottom{}, SolveStatus::step_limit};
    if (!path.empty() && domain.size(x) > limit) return {Bottom{}, SolveStatus::size_limit};
    std::optional<State> next;
    domain.visit_units(x, [&](const Location& loc, TreeRef unit) {
      const auto* cands = rules.candidates(unit.label());
      if (!cands) return false;
      for (std::size_t ri : *cands) {
        const auto& rule = rules.rules()[ri];
        if (!rule.select->contains(unit)) continue;
        Step step{rule.op, loc};
        if (auto y = domain.spec.apply(x, step)) {
          next = std::move(y);
          path.push_back(std::move(step));
          return true;
        }
      }
      return false;
    });
    if (!next) return {Bottom{}, SolveStatus::no_match};
    x = std::move(*next);
  }
  return {std::move(path), SolveStatus::solved};
}

template <class State>
Solution rule_solve(const RuleSet& rules, const RuleDomain<State>& domain, const State& problem) {
  return rule_solve_detailed(rules, domain, problem).solution;
}

/// S(o) for every operator: the units each operator was applied to along the
/// teacher's trajectories. Index 0 holds S(o_1). Duplicates are dropped.
template <class State>
std::vector<std::vector<Tree>> collect_select_examples(const RuleDomain<State>& domain,
                                                       const std::vector<Example<State>>& sample) {
  std::vector<std::vector<Tree>> sets(domain.spec.k());
  for (const auto& ex : sample) {
    if (is_bottom(ex.solution)) continue;
    const Path& path = path_of(ex.solution);
    const auto trajectory = replay(domain.spec, ex.problem, path);
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto& step = path[i];
      if (step.op < 1 || static_cast<std::size_t>(step.op) > sets.size())
        throw ReplayError(i, "operator index out of range");
      Tree unit = domain.unit_at(trajectory[i], step.location.value_or(Location{}));
      auto& s = sets[static_cast<std::size_t>(step.op - 1)];
      if (std::ranges::find(s, unit) == s.end()) s.push_back(std::move(unit));
    }
  }
  return sets;
}

template <class State>
std::function<Solution(const State&)> rule_solver(const RuleSet& rules, const RuleDomain<State>& domain) {
  return [&rules, &domain](const State& s) { return rule_solve(rules, domain, s); };
}

/// U(o) := MSG(S(o)) for every operator, from an already drawn sample.
/// Throws ConsistencyError if the result does not reproduce the sample.
template <class State>
RuleSet learn_rules_from_sample(const RuleDomain<State>& domain, const std::vector<Example<State>>& sample,
                                std::size_t step_factor = 50) {
  RuleSet rules(domain.spec.k(), step_factor);
  const auto sets = collect_select_examples(domain, sample);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].empty()) continue;
    std::vector<TreeRef> refs;
    refs.reserve(sets[i].size());
    for (const auto& t : sets[i]) refs.push_back(t.root());
    rules.set(static_cast<int>(i + 1), msg_trees(refs));
  }
  if (!is_consistent<State>(rule_solver(rules, domain), sample))
    throw ConsistencyError("learned rules do not reproduce their training sample");
  return rules;
}

template <class State>
struct LearnedRules {
  RuleSet rules;
  std::vector<Example<State>> sample;
};

/// Draws m examples (m_override, or the sample bound for hypothesis-space
/// dimension `dim`) and learns from them.
template <class State>
LearnedRules<State> learn_rules(const RuleDomain<State>& domain, const OracleConfig<State>& oracle_config,
                                const LearnParams& params, std::optional<std::size_t> m_override,
                                double dim = 0.0) {
  params.validate();
  const std::size_t m = m_override ? *m_override : sample_size(params.epsilon, params.delta, dim);
  Oracle<State> oracle(oracle_config, params.max_solution_length);
  std::vector<Example<State>> sample;
  sample.reserve(m);
  for (std::size_t i = 0; i < m; ++i) sample.push_back(solved_problem(oracle, domain.spec));
  RuleSet rules = learn_rules_from_sample(domain, sample);
  return {std::move(rules), std::move(sample)};
}

}  // namespace speedup
