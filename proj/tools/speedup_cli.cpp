// speedup: command-line driver for the learning experiments and checks.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "speedup/control_rules.hpp"
#include "speedup/eight_puzzle.hpp"
#include "speedup/grammar.hpp"
#include "speedup/harness.hpp"
#include "speedup/integration.hpp"
#include "speedup/macro_table.hpp"

namespace {

using namespace speedup;
namespace ep = speedup::eight_puzzle;
namespace in = speedup::integration;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Report {
  int failures = 0;
  void line(bool ok, const std::string& what, const std::string& detail = {}) {
    failures += !ok;
    std::cout << (ok ? "ok   " : "FAIL ") << what;
    if (!detail.empty()) std::cout << " (" << detail << ')';
    std::cout << std::endl;
  }
};

std::string witness_text(const DecomposabilityWitness& w) {
  return "op " + std::string(1, ep::kMoveLetters[static_cast<std::size_t>(w.op - 1)]) + ", position " +
         std::to_string(w.position) + ": " + ep::to_string(w.first) + " -> " + std::to_string(w.first_outcome) +
         " but " + ep::to_string(w.second) + " -> " + std::to_string(w.second_outcome);
}

int cmd_bound(double epsilon, double delta, double dim) {
  std::cout << sample_size(epsilon, delta, dim) << '\n';
  return 0;
}

int cmd_curve(harness::ExperimentConfig config, const std::string& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto points = harness::run_curve(config);
  if (out.empty() || out == "-") {
    harness::write_csv(std::cout, points);
  } else {
    harness::emit_csv(points, out);
    std::cerr << "wrote " << points.size() << " points to " << out << '\n';
  }
  log(1, "curve finished in " + std::to_string(seconds_since(t0)) + " s");
  return 0;
}

int cmd_table(bool dump) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto boards = ep::reachable_boards();
  const auto table = ep::build_exhaustive_table(boards);
  const auto dom = ep::domain();
  const double built = seconds_since(t0);
  if (dump) std::cout << table.dump(operator_names(dom));
  std::cout << "boards:          " << boards.size() << '\n'
            << "filled cells:    " << table.filled_count() << '\n'
            << "nonempty macros: " << table.nonempty_count() << '\n'
            << "null macros:     " << table.filled_count() - table.nonempty_count() << '\n'
            << "unreachable:     " << table.n() * table.v() - table.filled_count() << '\n'
            << "longest macro:   " << table.max_filled_length() << '\n'
            << "build time:      " << built << " s\n";
  const auto report = verify_table(table, dom, boards);
  if (report.ok) {
    std::cout << "verification:    passed over " << boards.size() << " boards (" << report.checked
              << " macro applications)\n";
    return 0;
  }
  const auto& w = *report.witness;
  std::cout << "verification:    FAILED at cell (" << w.value << ", " << w.position << "): " << w.reason;
  if (!w.state.empty()) std::cout << " from " << ep::to_string(w.state);
  std::cout << '\n';
  return 1;
}

int cmd_verify(std::size_t draws, std::size_t numeric) {
  Report r;
  const auto boards = ep::reachable_boards();
  r.line(boards.size() == 181440, "breadth-first enumeration reaches 9!/2 boards", std::to_string(boards.size()));
  std::size_t parity_ok = 0;
  for (const auto& b : boards) parity_ok += ep::is_solvable(b);
  r.line(parity_ok == boards.size(), "parity test accepts every reachable board");

  const auto dom = ep::domain();
  const auto first = check_serial_decomposability(dom, ep::blank_first(), ep::kTiles, boards);
  r.line(first.ok, "serially decomposable with the blank first");
  const auto last = check_serial_decomposability(dom, ep::blank_last(), ep::kTiles, boards);
  r.line(!last.ok, "not serially decomposable with the blank last", last.witness ? witness_text(*last.witness) : "");

  const auto table = ep::build_exhaustive_table(boards);
  r.line(table.nonempty_count() == 35, "exhaustive table has 35 nonempty macros",
         std::to_string(table.nonempty_count()));
  const auto tv = verify_table(table, dom, boards);
  r.line(tv.ok, "exhaustive table satisfies the macro-table property", tv.ok ? "" : tv.witness->reason);

  const auto a = ep::apply_moves(ep::goal_board(), "drullu");
  const auto c = ep::apply_moves(a, "dr");
  const auto tile1 = ep::moves_to_string(ep::ida_star_subgoal(c, 2, ep::blank_first(), ep::goal_board()));
  r.line(a[0] == 5 && c[0] == 0 && tile1 == "rdlu", "\"dr\" centres the blank, then tile 1 needs \"rdlu\"", tile1);

  const auto f = msg(in::grammar(), {in::to_symbols(in::parse_expression("∫ (sin x) + (x ^ 2) d x")),
                                     in::to_symbols(in::parse_expression("∫ (cos x) + (sin x) d x"))});
  r.line(f.to_text(in::grammar()) == "∫ Trig + P-term d x", "msg of the two sum integrals",
         f.to_text(in::grammar()));

  std::mt19937_64 rng(20240601);
  std::size_t unsolved = 0;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto p = in::generate_problem(rng);
    const auto s = in::teacher_solve(p);
    if (is_bottom(s)) {
      ++unsolved;
      continue;
    }
    if (i < numeric) {
      const auto end = replay(in::domain().spec, p, path_of(s)).back();
      if (!in::is_goal(end) || !in::antiderivative_matches(p, end)) ++unsolved;
    }
  }
  r.line(unsolved == 0, "integration teacher solves " + std::to_string(draws) + " draws (" +
                            std::to_string(std::min(draws, numeric)) + " checked numerically)",
         std::to_string(unsolved) + " failures");

  std::size_t inconsistent = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    try {
      learn_rules(in::domain(), in::oracle_config(seed), LearnParams{}, 30);
    } catch (const ConsistencyError&) {
      ++inconsistent;
    }
    auto teacher = ep::empty_table();
    Oracle<FeatureState> oracle(ep::oracle_config(seed, teacher));
    std::vector<Example<FeatureState>> sample;
    for (int i = 0; i < 40; ++i) sample.push_back(solved_problem(oracle, dom));
    const auto learned = serial_parse(sample, dom, ep::kTiles, ep::kTiles, ep::goal_board(), ep::blank_first());
    inconsistent += !is_consistent<FeatureState>([&](const FeatureState& s) { return macro_solve(learned, dom, s); },
                                                 sample);
  }
  r.line(inconsistent == 0, "learners reproduce their training samples (20 seeds each)");

  std::cout << (r.failures ? "verification failed" : "all checks passed") << '\n';
  return r.failures ? 1 : 0;
}

int cmd_solve(const std::string& domain, const std::string& problem) {
  if (harness::parse_domain(domain) == harness::DomainKind::integration) {
    const auto e = in::parse_expression(problem);
    const auto s = in::teacher_solve(e);
    std::cout << "solution: " << solution_to_string(s) << '\n';
    if (!is_bottom(s)) std::cout << "result:   " << in::to_string(replay(in::domain().spec, e, path_of(s)).back()) << '\n';
    return is_bottom(s) ? 1 : 0;
  }
  const auto b = ep::from_string(problem);
  if (!ep::is_solvable(b)) {
    std::cout << "unsolvable board\n";
    return 1;
  }
  auto table = ep::empty_table();
  const auto s = ep::integrated_teacher(b, table);
  std::cout << ep::render(b) << "moves: " << ep::moves_to_string(s) << " (" << path_of(s).size() << ")\n";
  return 0;
}

int cmd_learn(const std::string& domain, std::size_t examples, std::uint64_t seed) {
  if (harness::parse_domain(domain) == harness::DomainKind::integration) {
    const auto learned = learn_rules(in::domain(), in::oracle_config(seed), LearnParams{}, examples);
    std::cout << dump_rules(in::grammar(), learned.rules);
    return 0;
  }
  const auto dom = ep::domain();
  auto teacher = ep::empty_table();
  auto learner = ep::empty_table();
  Oracle<FeatureState> oracle(ep::oracle_config(seed, teacher));
  for (std::size_t i = 0; i < examples; ++i) serial_parse_example(learner, dom, solved_problem(oracle, dom));
  std::cout << learner.dump(operator_names(dom)) << "filled cells: " << learner.filled_count() << '\n';
  return 0;
}

int cmd_examples(std::size_t count, std::uint64_t seed, const std::string& out) {
  Oracle<in::Expr> oracle(in::oracle_config(seed));
  std::vector<Example<in::Expr>> sample;
  for (std::size_t i = 0; i < count; ++i) sample.push_back(solved_problem(oracle, in::domain().spec));
  if (out.empty() || out == "-") {
    in::write_examples(std::cout, sample);
    return 0;
  }
  std::ofstream f(out);
  if (!f) throw Error("cannot open '" + out + "' for writing");
  in::write_examples(f, sample);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speedup learning workbench: control rules for integration, macro tables for the Eight Puzzle"};
  app.require_subcommand(1);

  double epsilon = 0.1, delta = 0.1, dim = 0.0;
  auto* bound = app.add_subcommand("bound", "Print the sufficient sample size");
  bound->add_option("--epsilon", epsilon, "error bound")->capture_default_str();
  bound->add_option("--delta", delta, "failure probability")->capture_default_str();
  bound->add_option("--dim", dim, "hypothesis-space dimension")->required();

  std::string domain = "integration", out;
  harness::ExperimentConfig cfg;
  std::size_t trials = 0, train_max = 0, eval_every = 0, test_size = 0, threads = 0;
  std::uint64_t seed = 1;
  auto* curve = app.add_subcommand("curve", "Run a learning-curve experiment and emit CSV");
  curve->add_option("--domain", domain, "integration or eightpuzzle")
      ->check(CLI::IsMember({"integration", "eightpuzzle"}))
      ->capture_default_str();
  curve->add_option("--trials", trials, "independent trials (default 50)");
  curve->add_option("--train-max", train_max, "training examples per trial");
  curve->add_option("--eval-every", eval_every, "evaluate after this many examples");
  curve->add_option("--test-size", test_size, "test problems per evaluation (default 100)");
  curve->add_option("--seed", seed, "master seed")->capture_default_str();
  curve->add_option("--threads", threads, "worker threads (0 = hardware)");
  curve->add_option("-o,--out", out, "CSV path (default stdout)");

  bool exhaustive = false, dump = false;
  auto* table = app.add_subcommand("table", "Build the full Eight Puzzle macro table and verify it");
  table->add_flag("--build-exhaustive", exhaustive, "search every reachable cell")->required();
  table->add_flag("--dump", dump, "print the table grid");

  bool all = false;
  std::size_t draws = 100000, numeric = 1000;
  auto* verify = app.add_subcommand("verify", "Run the property checks");
  verify->add_flag("--all", all, "run every check")->required();
  verify->add_option("--draws", draws, "integration problems for the teacher check")->capture_default_str();
  verify->add_option("--numeric", numeric, "of those, how many to check numerically")->capture_default_str();

  std::string problem;
  auto* solve = app.add_subcommand("solve", "Solve one problem with the teacher");
  solve->add_option("--domain", domain, "integration or eightpuzzle")
      ->check(CLI::IsMember({"integration", "eightpuzzle"}))
      ->capture_default_str();
  solve->add_option("problem", problem, "expression, or nine board digits")->required();

  std::size_t examples = 30;
  auto* learn = app.add_subcommand("learn", "Learn from seeded examples and print the result");
  learn->add_option("--domain", domain, "integration or eightpuzzle")
      ->check(CLI::IsMember({"integration", "eightpuzzle"}))
      ->capture_default_str();
  learn->add_option("--examples", examples, "training examples")->capture_default_str();
  learn->add_option("--seed", seed, "oracle seed")->capture_default_str();

  auto* ex = app.add_subcommand("examples", "Write solved integration problems, one per line");
  ex->add_option("--count", examples, "number of examples")->capture_default_str();
  ex->add_option("--seed", seed, "oracle seed")->capture_default_str();
  ex->add_option("-o,--out", out, "output path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bound) return cmd_bound(epsilon, delta, dim);
    if (*curve) {
      cfg = harness::ExperimentConfig::defaults(harness::parse_domain(domain));
      if (trials) cfg.trials = trials;
      if (train_max) cfg.train_max = train_max;
      if (eval_every) cfg.eval_every = eval_every;
      if (test_size) cfg.test_set_size = test_size;
      cfg.seed = seed;
      cfg.threads = threads;
      return cmd_curve(cfg, out);
    }
    if (*table) return cmd_table(dump);
    if (*verify) return cmd_verify(draws, numeric);
    if (*solve) return cmd_solve(domain, problem);
    if (*learn) return cmd_learn(domain, examples, seed);
    if (*ex) return cmd_examples(examples, seed, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
