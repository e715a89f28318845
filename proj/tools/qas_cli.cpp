// qas: command-line front end for the architecture-search workbench.
//
//   qas run --config cfg.json [--seed S] [--resume checkpoint.json]
//   qas ground --kind h1 --qubits 4
//   qas eval --ansatz a.json --kind h1 --qubits 4 [--shots k] [--optimize]
//   qas ic --ansatz a.json --kind h1 --qubits 4
//   qas bench-surrogate --qubits 4 --depth 60 --count 150
//   qas analyze --run DIR
//
// Results go to stdout as JSON. Failures print {"code", "message"} to stderr
// and exit with 2 (usage or configuration) or 3 (runtime).

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qas/analysis.hpp"
#include "qas/config.hpp"
#include "qas/error.hpp"
#include "qas/hamiltonians.hpp"
#include "qas/optimize.hpp"
#include "qas/persistence.hpp"
#include "qas/search.hpp"
#include "qas/trainability.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int fail(std::string_view code, const std::string& message, int status) {
  std::cerr << nlohmann::json{{"code", code}, {"message", message}}.dump() << "\n";
  return status;
}

void emit(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

qas::PauliSum hamiltonian_for(const std::string& kind, int qubits, const std::string& file) {
  if (!file.empty()) return qas::pauli_sum_from_json(qas::read_json(file));
  return qas::build_hamiltonian(qas::parse_hamiltonian_kind(kind), qubits);
}

struct RunArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string resume;
};

int cmd_run(const RunArgs& args) {
  qas::RunConfig cfg = qas::load_run_config(args.config);
  if (args.seed) cfg.search.seed = *args.seed;
  const qas::PauliSum h = cfg.build_hamiltonian();
  const qas::RunWriter writer(cfg.output_dir);
  writer.write_config(cfg);

  qas::Search search(cfg.search, h);
  if (args.resume.empty()) {
    search.initialize();
  } else {
    search.restore(qas::search_state_from_json(qas::read_json(args.resume)));
  }
  writer.write_progress(search.state());
  while (search.step()) writer.write_progress(search.state());
  writer.write_progress(search.state());
  const qas::RunRecord record = search.record();
  writer.write_summary(record);
  emit(qas::summary_json(record));
  return 0;
}

struct ProblemArgs {
  std::string kind = "h1";
  int qubits = 4;
  std::string hamiltonian_file;
};

void add_problem(CLI::App* cmd, ProblemArgs& p) {
  cmd->add_option("--kind", p.kind, "Hamiltonian h1..h4")->capture_default_str();
  cmd->add_option("--qubits", p.qubits, "Number of qubits")->capture_default_str();
  cmd->add_option("--hamiltonian", p.hamiltonian_file, "PauliSum JSON file (overrides --kind)");
}

int cmd_ground(const ProblemArgs& p, bool with_state) {
  const qas::PauliSum h = hamiltonian_for(p.kind, p.qubits, p.hamiltonian_file);
  const qas::GroundState g = qas::exact_ground_energy(h);
  nlohmann::json out{{"kind", p.hamiltonian_file.empty() ? p.kind : "file"},
                     {"n", h.qubits()},
                     {"energy", g.energy}};
  if (with_state) out["state"] = qas::to_json(g.state);
  emit(out);
  return 0;
}

struct EvalArgs {
  std::string ansatz;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  bool optimize = false;
  int restarts = 3;
  int evals_per_param = 200;
};

qas::Ansatz load_ansatz(const std::string& file, int qubits, qas::ParamVector* params) {
  const nlohmann::json j = qas::read_json(file);
  qas::Ansatz a = qas::ansatz_from_json(j);
  if (a.qubits() != qubits) {
    throw qas::Error(qas::Errc::dimension_mismatch,
                     "ansatz has " + std::to_string(a.qubits()) + " qubits, Hamiltonian has " +
                         std::to_string(qubits));
  }
  if (params) *params = qas::params_from_json(j);
  return a;
}

int cmd_eval(const ProblemArgs& p, const EvalArgs& e) {
  const qas::PauliSum h = hamiltonian_for(p.kind, p.qubits, p.hamiltonian_file);
  qas::ParamVector params;
  const qas::Ansatz a = load_ansatz(e.ansatz, h.qubits(), &params);
  const qas::ShotModel sm{e.shots, e.seed};
  nlohmann::json out{{"n", a.qubits()}, {"m", a.depth()}, {"num_params", qas::count_params(a)}};
  if (e.optimize) {
    qas::OptBudget budget = qas::OptBudget::defaults(qas::count_params(a), e.seed, e.restarts);
    budget.max_evals = e.evals_per_param * std::max(1, qas::count_params(a));
    const qas::OptResult r = qas::minimize_energy(a, h, sm, budget);
    out["energy"] = r.best_energy;
    out["params"] = r.best_params;
    out["evals_used"] = r.evals_used;
  } else {
    const qas::StateVector psi = qas::prepare_state(a, params);
    out["energy"] = qas::expectation_noisy(psi, h, sm);
    out["exact_energy"] = qas::expectation(psi, h);
    out["params"] = params;
  }
  emit(out);
  return 0;
}

struct IcArgs {
  std::string ansatz;
  std::uint64_t seed = 0;
  std::uint64_t shots = 0;
  int steps = 0;
  double step_scale = 0.05;
};

int cmd_ic(const ProblemArgs& p, const IcArgs& args) {
  const qas::PauliSum h = hamiltonian_for(p.kind, p.qubits, p.hamiltonian_file);
  const qas::Ansatz a = load_ansatz(args.ansatz, h.qubits(), nullptr);
  qas::WalkConfig walk = qas::WalkConfig::defaults(qas::count_params(a), args.seed);
  if (args.steps > 0) walk.steps = args.steps;
  walk.step_scale = args.step_scale;
  const qas::ICResult r =
      qas::information_content(a, h, walk, qas::ShotModel{args.shots, args.seed});
  emit(qas::to_json(r));
  return 0;
}

int cmd_bench(qas::BenchmarkConfig cfg, const std::string& kind, const std::string& output) {
  cfg.kind = qas::parse_hamiltonian_kind(kind);
  const qas::BenchmarkResult r = qas::surrogate_benchmark(cfg);
  nlohmann::json out = r.to_json();
  out["kind"] = kind;
  if (!output.empty()) qas::write_json(output, out);
  emit(out);
  return 0;
}

int cmd_analyze(const std::string& dir) {
  qas::analyze_run(dir);
  emit({{"run", dir},
        {"written", {"pareto.csv", "convergence.csv", "gate_stats.json"}}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum architecture search workbench"};
  app.require_subcommand(1);

  RunArgs run_args;
  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Run the architecture search");
  run->add_option("--config", run_args.config, "Run config JSON")->required();
  auto* seed_opt = run->add_option("--seed", run_seed, "Override the config seed");
  run->add_option("--resume", run_args.resume, "Checkpoint to continue from");

  ProblemArgs ground_p;
  bool with_state = false;
  auto* ground = app.add_subcommand("ground", "Exact ground energy by diagonalization");
  add_problem(ground, ground_p);
  ground->add_flag("--state", with_state, "Include the ground state amplitudes");

  ProblemArgs eval_p;
  EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "Energy of an ansatz");
  add_problem(eval, eval_p);
  eval->add_option("--ansatz", eval_args.ansatz, "Ansatz JSON")->required();
  eval->add_option("--shots", eval_args.shots, "Shots (0 = exact)")->capture_default_str();
  eval->add_option("--seed", eval_args.seed, "Seed")->capture_default_str();
  eval->add_flag("--optimize", eval_args.optimize, "Optimize the angles first");
  eval->add_option("--restarts", eval_args.restarts, "Optimizer restarts")->capture_default_str();
  eval->add_option("--evals-per-param", eval_args.evals_per_param, "Evaluation budget per angle")
      ->capture_default_str();

  ProblemArgs ic_p;
  IcArgs ic_args;
  auto* ic = app.add_subcommand("ic", "Information-content trainability estimate");
  add_problem(ic, ic_p);
  ic->add_option("--ansatz", ic_args.ansatz, "Ansatz JSON")->required();
  ic->add_option("--seed", ic_args.seed, "Walk seed")->capture_default_str();
  ic->add_option("--shots", ic_args.shots, "Shots per energy (0 = exact)")->capture_default_str();
  ic->add_option("--steps", ic_args.steps, "Walk steps (default 10 per angle, 10..500)");
  ic->add_option("--step-scale", ic_args.step_scale, "Step length per sqrt(angle)")
      ->capture_default_str();

  qas::BenchmarkConfig bench_cfg;
  std::string bench_kind = "h1";
  std::string bench_output;
  auto* bench = app.add_subcommand("bench-surrogate", "Cross-validated comparator accuracy");
  bench->add_option("--qubits", bench_cfg.qubits, "Number of qubits")->capture_default_str();
  bench->add_option("--depth", bench_cfg.depth, "Ansatz depth")->capture_default_str();
  bench->add_option("--count", bench_cfg.count, "Random circuits")->capture_default_str();
  bench->add_option("--kind", bench_kind, "Hamiltonian h1..h4")->capture_default_str();
  bench->add_option("--folds", bench_cfg.folds, "Cross-validation folds")->capture_default_str();
  bench->add_option("--evals-per-param", bench_cfg.evals_per_param, "Optimizer budget per angle")
      ->capture_default_str();
  bench->add_option("--eps", bench_cfg.eps, "Comparison tolerance (default 5% of the spectral span)");
  bench->add_option("--seed", bench_cfg.seed, "Seed")->capture_default_str();
  bench->add_flag("--shuffle-labels", bench_cfg.shuffle_labels, "Permute labels before training");
  bench->add_option("--output", bench_output, "Also write the table to this file");

  std::string analyze_dir;
  auto* analyze = app.add_subcommand("analyze", "Plot-ready data from a run directory");
  analyze->add_option("--run", analyze_dir, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), kExitConfig);
  }

  try {
    if (*run) {
      if (*seed_opt) run_args.seed = run_seed;
      return cmd_run(run_args);
    }
    if (*ground) return cmd_ground(ground_p, with_state);
    if (*eval) return cmd_eval(eval_p, eval_args);
    if (*ic) return cmd_ic(ic_p, ic_args);
    if (*bench) return cmd_bench(bench_cfg, bench_kind, bench_output);
    if (*analyze) return cmd_analyze(analyze_dir);
  } catch (const qas::Error& e) {
    const int status = e.code() == qas::Errc::config_error ? kExitConfig : kExitRuntime;
    return fail(qas::to_string(e.code()), e.what(), status);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitRuntime);
  }
  return 0;
}
