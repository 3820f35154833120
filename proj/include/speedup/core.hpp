#pragma once

// Domains, examples, oracles and the sample-size bound shared by both
// learners (control rules and macro tables).

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "speedup/errors.hpp"

namespace speedup {

/// Child-index path from the root of a structured state.
using Location = std::vector<int>;

/// One operator application. `op` is 1-based; `location` is only used by
/// parameterized domains.
struct Step {
  int op = 0;
  std::optional<Location> location;

  friend bool operator==(const Step&, const Step&) = default;
};

using Path = std::vector<Step>;

/// The distinguished "no solution" value.
struct Bottom {
  friend bool operator==(Bottom, Bottom) = default;
};

/// Either an operator sequence (possibly empty) or Bottom.
using Solution = std::variant<Path, Bottom>;

inline bool is_bottom(const Solution& s) { return std::holds_alternative<Bottom>(s); }

inline const Path& path_of(const Solution& s) {
  if (const auto* p = std::get_if<Path>(&s)) return *p;
  throw ParameterError("solution is bottom");
}

inline std::string location_to_string(const Location& loc) {
  std::string out;
  for (std::size_t i = 0; i < loc.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(loc[i]);
  }
  return out;
}

inline Location location_from_string(const std::string& text) {
  Location loc;
  if (text.empty()) return loc;
  std::stringstream in(text);
  std::string part;
  while (std::getline(in, part, '.')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw ParameterError("bad location '" + text + "'");
    loc.push_back(std::stoi(part));
  }
  return loc;
}

/// `op@path,op@path,...`; unparameterized steps print as just `op`.
inline std::string solution_to_string(const Solution& s) {
  if (is_bottom(s)) return "⊥";
  std::string out;
  for (const auto& step : path_of(s)) {
    if (!out.empty()) out += ',';
    out += std::to_string(step.op);
    if (step.location) out += '@' + location_to_string(*step.location);
  }
  return out;
}

inline Solution solution_from_string(const std::string& text) {
  if (text == "⊥") return Bottom{};
  Path path;
  if (text.empty()) return path;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    Step step;
    const auto at = item.find('@');
    const std::string op = item.substr(0, at);
    if (op.empty() || op.find_first_not_of("0123456789") != std::string::npos)
      throw ParameterError("bad step '" + item + "'");
    step.op = std::stoi(op);
    if (at != std::string::npos) step.location = location_from_string(item.substr(at + 1));
    path.push_back(std::move(step));
  }
  return path;
}

template <class State>
struct Operator {
  std::string name;
  /// Partial function; returns nullopt where the operator does not apply.
  std::function<std::optional<State>(const State&, const std::optional<Location>&)> apply;
};

/// A problem domain: goal test plus totally ordered operators.
template <class State>
struct DomainSpec {
  std::size_t state_size = 1;
  std::function<bool(const State&)> goal_test;
  std::vector<Operator<State>> operators;
  /// Abstract cost of one operator application; reporting only.
  double op_time_bound = 1.0;

  std::size_t k() const { return operators.size(); }

  std::optional<State> apply(const State& s, const Step& step) const {
    if (step.op < 1 || static_cast<std::size_t>(step.op) > operators.size())
      throw ParameterError("operator index " + std::to_string(step.op) + " out of range");
    return operators[step.op - 1].apply(s, step.location);
  }
};

/// x_0 .. x_r for a solution applied to `problem`.
template <class State>
std::vector<State> replay(const DomainSpec<State>& domain, const State& problem, const Path& solution) {
  std::vector<State> trajectory;
  trajectory.reserve(solution.size() + 1);
  trajectory.push_back(problem);
  for (std::size_t i = 0; i < solution.size(); ++i) {
    std::optional<State> next;
    try {
      next = domain.apply(trajectory.back(), solution[i]);
    } catch (const ParameterError& e) {
      throw ReplayError(i, e.what());
    }
    if (!next) throw ReplayError(i, "operator " + std::to_string(solution[i].op) + " is not applicable");
    trajectory.push_back(std::move(*next));
  }
  return trajectory;
}

template <class State>
struct Example {
  State problem;
  Solution solution;
};

struct LearnParams {
  double epsilon = 0.1;
  double delta = 0.1;
  std::size_t max_problem_size = 1;
  std::size_t max_solution_length = 1000;

  void validate() const {
    if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon > 1.0)
      throw ParameterError("epsilon must lie in (0, 1]");
    if (!std::isfinite(delta) || delta <= 0.0 || delta > 1.0) throw ParameterError("delta must lie in (0, 1]");
    if (max_problem_size == 0) throw ParameterError("max_problem_size must be positive");
    if (max_solution_length == 0) throw ParameterError("max_solution_length must be positive");
  }
};

/// ceil((1/epsilon) * (dim * ln 2 + ln(1/delta))): examples sufficient for a
/// consistent learner over a hypothesis space of l-dimension `dim`.
inline std::uint64_t sample_size(double epsilon, double delta, double dim) {
  if (!std::isfinite(epsilon) || epsilon <= 0.0 || epsilon > 1.0) throw ParameterError("epsilon must lie in (0, 1]");
  if (!std::isfinite(delta) || delta <= 0.0 || delta > 1.0) throw ParameterError("delta must lie in (0, 1]");
  if (!std::isfinite(dim) || dim < 0.0) throw ParameterError("dim must be a finite nonnegative number");
  const double m = (dim * std::log(2.0) + std::log(1.0 / delta)) / epsilon;
  if (m >= static_cast<double>(std::numeric_limits<std::uint64_t>::max()))
    throw ParameterError("sample size overflows");
  return static_cast<std::uint64_t>(std::ceil(m));
}

template <class State>
struct OracleConfig {
  std::function<State(std::mt19937_64&)> problem_generator;
  std::function<Solution(const State&)> teacher;
  std::uint64_t seed = 0;
};

/// SOLVED-PROBLEM: owns the only mutable state of an experiment (its RNG).
template <class State>
class Oracle {
 public:
  Oracle(OracleConfig<State> config, std::size_t max_solution_length = std::numeric_limits<std::size_t>::max())
      : config_(std::move(config)), rng_(config_.seed), max_solution_length_(max_solution_length) {}

  const OracleConfig<State>& config() const { return config_; }
  std::size_t max_solution_length() const { return max_solution_length_; }

  State draw_problem() { return config_.problem_generator(rng_); }
  Solution teach(const State& s) const { return config_.teacher(s); }

 private:
  OracleConfig<State> config_;
  std::mt19937_64 rng_;
  std::size_t max_solution_length_;
};

/// Draws a problem and asks the teacher for its solution. A non-bottom
/// solution must replay to a goal state within the length bound.
template <class State>
Example<State> solved_problem(Oracle<State>& oracle, const DomainSpec<State>& domain) {
  State problem = oracle.draw_problem();
  Solution solution = oracle.teach(problem);
  if (!is_bottom(solution)) {
    const Path& path = path_of(solution);
    if (path.size() > oracle.max_solution_length())
      throw OracleIntegrityError("teacher solution of length " + std::to_string(path.size()) +
                                 " exceeds the configured maximum");
    std::vector<State> trajectory;
    try {
      trajectory = replay(domain, problem, path);
    } catch (const ReplayError& e) {
      throw OracleIntegrityError(std::string("teacher solution does not replay: ") + e.what());
    }
    if (!domain.goal_test(trajectory.back()))
      throw OracleIntegrityError("teacher solution does not reach a goal state");
  }
  return Example<State>{std::move(problem), std::move(solution)};
}

/// True iff `solver` reproduces every non-bottom solution in the sample exactly.
template <class State, class Solver>
bool is_consistent(const Solver& solver, const std::vector<Example<State>>& sample) {
  for (const auto& ex : sample) {
    if (is_bottom(ex.solution)) continue;
    Solution mine;
    try {
      mine = solver(ex.problem);
    } catch (const Error&) {
      return false;
    }
    if (mine != ex.solution) return false;
  }
  return true;
}

/// Seed splitting for independent trials.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0) {
  return splitmix64(splitmix64(master ^ (stream * 0x632be59bd9b4e019ULL)) + index);
}

}  // namespace speedup
