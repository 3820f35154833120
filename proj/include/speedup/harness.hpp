#pragma once

// Learning-curve experiments: independent seeded trials run on a thread
// pool, each training one learner example by example and scoring it on
// freshly drawn test problems at every evaluation point.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "speedup/control_rules.hpp"
#include "speedup/core.hpp"
#include "speedup/eight_puzzle.hpp"
#include "speedup/integration.hpp"
#include "speedup/macro_table.hpp"

namespace speedup {

/// Verbosity from SPEEDUP_LOG: 0 quiet (default), 1 progress, 2 detail.
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("SPEEDUP_LOG");
    return v ? std::atoi(v) : 0;
  }();
  return level;
}

inline void log(int level, const std::string& message) {
  if (level > log_level()) return;
  static std::mutex m;
  std::lock_guard lock(m);
  std::cerr << "[speedup] " << message << '\n';
}

namespace harness {

enum class DomainKind { integration, eightpuzzle };

inline DomainKind parse_domain(const std::string& name) {
  if (name == "integration") return DomainKind::integration;
  if (name == "eightpuzzle") return DomainKind::eightpuzzle;
  throw ParameterError("unknown domain '" + name + "' (expected integration or eightpuzzle)");
}

inline std::string to_string(DomainKind d) { return d == DomainKind::integration ? "integration" : "eightpuzzle"; }

struct ExperimentConfig {
  DomainKind domain = DomainKind::integration;
  std::size_t trials = 50;
  std::size_t train_max = 30;
  std::size_t eval_every = 1;
  std::size_t test_set_size = 100;
  std::uint64_t seed = 1;
  /// 0 = one per hardware thread.
  std::size_t threads = 0;

  static ExperimentConfig defaults(DomainKind d) {
    ExperimentConfig c;
    c.domain = d;
    if (d == DomainKind::eightpuzzle) {
      c.train_max = 40;
      c.eval_every = 2;
    }
    return c;
  }

  void validate() const {
    if (trials == 0) throw ParameterError("trials must be positive");
    if (train_max == 0) throw ParameterError("train_max must be positive");
    if (eval_every == 0) throw ParameterError("eval_every must be positive");
    if (eval_every > train_max) throw ParameterError("eval_every must not exceed train_max");
    if (test_set_size == 0) throw ParameterError("test_set_size must be positive");
  }

  /// Training-set sizes at which the learner is scored.
  std::vector<std::size_t> eval_points() const {
    std::vector<std::size_t> pts;
    for (std::size_t k = eval_every; k <= train_max; k += eval_every) pts.push_back(k);
    return pts;
  }
};

struct CurvePoint {
  std::size_t num_examples = 0;
  double mean_accuracy = 0.0;
  double stddev = 0.0;
};

struct TrialResult {
  std::vector<double> accuracy;    // per eval point
  std::vector<std::size_t> coverage;  // filled cells or non-EMPTY rules, per eval point
};

struct CurveResult {
  std::vector<CurvePoint> points;
  std::vector<TrialResult> trials;
};

/// Mean and sample standard deviation (0 for fewer than two values).
inline std::pair<double, double> mean_stddev(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

inline TrialResult run_integration_trial(const ExperimentConfig& config, std::size_t trial) {
  const auto& dom = integration::domain();
  Oracle<integration::Expr> oracle(integration::oracle_config(derive_seed(config.seed, trial, 0)));
  std::mt19937_64 test_rng(derive_seed(config.seed, trial, 1));
  std::vector<Example<integration::Expr>> sample;
  TrialResult result;
  for (std::size_t k : config.eval_points()) {
    while (sample.size() < k) sample.push_back(solved_problem(oracle, dom.spec));
    const RuleSet rules = learn_rules_from_sample(dom, sample);
    std::size_t hits = 0;
    for (std::size_t t = 0; t < config.test_set_size; ++t) {
      const auto problem = integration::generate_problem(test_rng);
      hits += rule_solve(rules, dom, problem) == integration::teacher_solve(problem);
    }
    std::size_t learned = 0;
    for (const auto& r : rules.rules()) learned += r.select.has_value();
    result.accuracy.push_back(static_cast<double>(hits) / static_cast<double>(config.test_set_size));
    result.coverage.push_back(learned);
  }
  return result;
}

inline TrialResult run_eightpuzzle_trial(const ExperimentConfig& config, std::size_t trial) {
  namespace ep = eight_puzzle;
  const auto dom = ep::domain();
  MacroTable teacher_table = ep::empty_table();
  MacroTable learner = ep::empty_table();
  Oracle<FeatureState> oracle(ep::oracle_config(derive_seed(config.seed, trial, 0), teacher_table));
  std::mt19937_64 test_rng(derive_seed(config.seed, trial, 1));
  std::vector<Example<FeatureState>> sample;
  TrialResult result;
  for (std::size_t k : config.eval_points()) {
    while (sample.size() < k) {
      sample.push_back(solved_problem(oracle, dom));
      serial_parse_example(learner, dom, sample.back());
    }
    if (!is_consistent<FeatureState>([&](const FeatureState& s) { return macro_solve(learner, dom, s); }, sample))
      throw ConsistencyError("learned macro table does not reproduce its training sample");
    std::size_t hits = 0;
    for (std::size_t t = 0; t < config.test_set_size; ++t) {
      const auto problem = ep::random_solvable(test_rng);
      hits += macro_solve(learner, dom, problem) == ep::integrated_teacher(problem, teacher_table);
    }
    result.accuracy.push_back(static_cast<double>(hits) / static_cast<double>(config.test_set_size));
    result.coverage.push_back(learner.filled_count());
  }
  return result;
}

inline TrialResult run_trial(const ExperimentConfig& config, std::size_t trial) {
  return config.domain == DomainKind::integration ? run_integration_trial(config, trial)
                                                  : run_eightpuzzle_trial(config, trial);
}

/// Runs every trial (in parallel) and aggregates per eval point. Results are
/// keyed by trial index, so the output does not depend on scheduling.
inline CurveResult run_curve_detailed(const ExperimentConfig& config) {
  config.validate();
  CurveResult out;
  out.trials.resize(config.trials);
  std::size_t workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, config.trials);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t trial = next.fetch_add(1);
      if (trial >= config.trials) return;
      try {
        out.trials[trial] = run_trial(config, trial);
        log(1, to_string(config.domain) + " trial " + std::to_string(trial + 1) + "/" +
                   std::to_string(config.trials) + " done");
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = config.trials;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  const auto pts = config.eval_points();
  for (std::size_t e = 0; e < pts.size(); ++e) {
    std::vector<double> xs;
    for (const auto& t : out.trials) xs.push_back(t.accuracy[e]);
    const auto [mean, sd] = mean_stddev(xs);
    out.points.push_back(CurvePoint{pts[e], mean, sd});
  }
  return out;
}

inline std::vector<CurvePoint> run_curve(const ExperimentConfig& config) { return run_curve_detailed(config).points; }

/// Mean accuracy at `n` examples, linearly interpolated between eval points.
inline double mean_at(const std::vector<CurvePoint>& points, double n) {
  if (points.empty()) throw ParameterError("empty curve");
  if (n <= static_cast<double>(points.front().num_examples)) return points.front().mean_accuracy;
  for (std::size_t i = 1; i < points.size(); ++i) {
    const double a = static_cast<double>(points[i - 1].num_examples), b = static_cast<double>(points[i].num_examples);
    if (n <= b) {
      const double w = (n - a) / (b - a);
      return points[i - 1].mean_accuracy * (1.0 - w) + points[i].mean_accuracy * w;
    }
  }
  return points.back().mean_accuracy;
}

/// Fixed notation, at most six decimals, trailing zeros dropped: 0.5, 0.1, 1.
inline std::string format_number(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
  if (ec != std::errc()) throw Error("number formatting failed");
  std::string s(buf, end);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

inline void write_csv(std::ostream& os, const std::vector<CurvePoint>& points) {
  os << "num_examples,mean_accuracy,stddev\n";
  for (const auto& p : points)
    os << p.num_examples << ',' << format_number(p.mean_accuracy) << ',' << format_number(p.stddev) << '\n';
}

inline std::string csv_string(const std::vector<CurvePoint>& points) {
  std::ostringstream os;
  write_csv(os, points);
  return os.str();
}

inline void emit_csv(const std::vector<CurvePoint>& points, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot open '" + path + "' for writing");
  write_csv(f, points);
  if (!f.flush()) throw Error("failed writing '" + path + "'");
}

}  // namespace harness
}  // namespace speedup
