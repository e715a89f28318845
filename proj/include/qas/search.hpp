#pragma once

// Estimation-of-distribution search over codified ansatzes.
//
// Each generation is ranked by g = (r1 - Score)(r2 - min(IC, r2)), the area
// of the box between an individual's (Score, IC) point and the ideal corner
// r = (r1, r2); lower is better. The top fraction alpha fits a per-cell
// categorical model that samples the next generation; the best individual
// is carried over unchanged. Scores come from the learned comparator; only
// the initial population and the top few of every generation are truly
// optimized, so a run performs exactly N + top_k * t optimizations.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qas/circuits.hpp"
#include "qas/optimize.hpp"
#include "qas/pauli.hpp"
#include "qas/random.hpp"
#include "qas/surrogate.hpp"
#include "qas/trainability.hpp"

namespace qas {

struct RefPoint {
  double score;  // r1
  double ic;     // r2
};

/// Per-cell categorical distributions over the gate codes of n qubits.
class MultinomialModel {
 public:
  MultinomialModel() = default;
  /// Equal probability over the enabled codes.
  static MultinomialModel uniform(int qubits, int depth, std::span<const GateCode> disabled = {});
  /// probs[cell * code_count(n) + code]; every cell must sum to 1 within
  /// 1e-9 and be non-negative.
  static MultinomialModel from_probs(int qubits, int depth, std::vector<double> probs);

  int qubits() const { return qubits_; }
  int depth() const { return depth_; }
  int codes() const { return code_count(qubits_); }
  double prob(int cell, GateCode code) const { return probs_[cell * codes() + code]; }
  std::span<const double> probs() const { return probs_; }

  /// Cell-independent draw; not post-processed.
  Ansatz sample(Rng& rng) const;

  nlohmann::json to_json() const;

 private:
  int qubits_ = 0;
  int depth_ = 0;
  std::vector<double> probs_;
};

/// Smallest probability fit_model assigns to an enabled code:
/// 1 / (10 * enabled codes).
double probability_floor(int qubits, std::span<const GateCode> disabled = {});

/// Per-cell empirical frequencies mixed with the uniform distribution,
/// p = 0.9 freq + 0.1 / K, so every enabled code keeps at least the floor
/// and each cell still sums to 1. Disabled codes get probability 0.
/// Errc::empty_input for an empty selection.
MultinomialModel fit_model(std::span<const Ansatz> selected, std::span<const GateCode> disabled = {});

/// Raw per-cell frequencies (no floor).
std::vector<double> empirical_frequencies(std::span<const Ansatz> selected);

struct Individual {
  Ansatz ansatz;
  std::optional<double> energy;  // exact energy after true optimization
  ParamVector params;
  double ic = 0.0;  // raw IC metric, never clamped
  int score = 0;
  double g = 0.0;
  int born = 0;  // iteration that sampled it
  bool optimized = false;
};

nlohmann::json to_json(const Individual& ind);
Individual individual_from_json(const nlohmann::json& j);

/// Box volume to the ideal corner; inputs clamped to [0, r1] x [0, r2].
double g_value(double score, double ic, RefPoint r);

/// Ranking order: g ascending, then higher IC, then earlier birth, then
/// lexicographic matrix order.
bool ranks_before(const Individual& a, const Individual& b);

struct Selection {
  std::vector<Individual> selected;  // floor(alpha * |pop|), best first
  Individual elite;
  std::vector<Individual> ranked;    // whole population in rank order
};

/// Computes g for every member and truncates. Errc::invalid_argument when
/// floor(alpha * |pop|) = 0.
Selection rank_and_truncate(std::vector<Individual> pop, double alpha, RefPoint r);

/// Indices of the points not dominated in (score, ic), both maximized,
/// ordered by score then index. Equal points are all kept.
std::vector<std::size_t> pareto_front(std::span<const std::pair<double, double>> points);
std::vector<std::size_t> pareto_front(std::span<const Individual> pop);

struct SearchConfig {
  int qubits = 2;
  int depth = 4;
  int population = 150;  // N
  int iterations = 50;   // t_max
  double alpha = 0.4;
  double ref_ic = 2.0;   // r2; r1 is 2N
  int top_k = 5;         // true optimizations per iteration
  int stall_limit = 15;
  int retry_cap = 20;
  double eps = 0.0;      // comparator tolerance; <= 0 means 0.05 * spectral span
  std::uint64_t seed = 0;
  std::uint64_t shots = 1024;
  bool ic_exact = true;  // IC walks without shot noise
  double walk_step = 0.05;
  int opt_evals_per_param = 200;
  double opt_ftol = 1e-6;
  int opt_restarts = 1;
  std::size_t pair_cap = kDefaultPairCap;
  std::vector<GateCode> disabled_codes;
  /// Seed population; empty means uniform sampling.
  std::vector<Ansatz> initial;

  RefPoint ref() const { return {2.0 * population, ref_ic}; }
  void validate() const;
};

nlohmann::json to_json(const SearchConfig& cfg);
/// Flat keys, all optional; unknown keys are rejected (Errc::config_error).
SearchConfig search_config_from_json(const nlohmann::json& j);

/// N distinct post-processed individuals: the seed population (padded with
/// identity columns, topped up with uniform samples) or uniform samples.
/// Energies are not filled in here.
std::vector<Individual> init_population(const SearchConfig& cfg);

struct SampleStats {
  int uniform_fills = 0;  // slots whose model draws were all duplicates
  int duplicates = 0;     // slots left with a duplicate after every retry
};

/// `size - 1` fresh post-processed individuals plus the elite, or `size`
/// fresh ones without an elite. Slot k draws from the substream
/// (seed, iteration, k).
std::vector<Individual> sample_population(const MultinomialModel& model, int size,
                                          const std::optional<Individual>& elite,
                                          std::uint64_t seed, int iteration, int retry_cap,
                                          std::span<const GateCode> disabled = {},
                                          SampleStats* stats = nullptr);

struct ParetoEntry {
  double score;
  double ic;
  Ansatz ansatz;
};

struct IterationLog {
  int iter = 0;
  double elite_g = 0.0;
  std::optional<double> elite_energy;
  Ansatz elite_ansatz;
  double mean_ic = 0.0;
  long n_true_opts = 0;
  int uniform_fills = 0;
  std::vector<ParetoEntry> pareto;
};

nlohmann::json to_json(const IterationLog& log);
IterationLog iteration_log_from_json(const nlohmann::json& j);

/// Everything needed to continue a run.
struct SearchState {
  int iteration = 0;  // completed iterations
  double eps = 0.0;
  std::vector<Individual> population;
  std::vector<Individual> archive;  // truly optimized, one entry per matrix
  std::optional<ComparatorModel> model;
  std::optional<Individual> elite;
  int stall = 0;
  long true_opts = 0;
  std::vector<IterationLog> log;
  std::string stop_reason;  // empty while running
};

nlohmann::json to_json(const SearchState& s);
SearchState search_state_from_json(const nlohmann::json& j);

struct RunRecord {
  std::vector<IterationLog> iterations;
  /// Truly optimized individuals with Score under the true comparator
  /// (r1 = 2(|archive| - 1)) and g filled in.
  std::vector<Individual> archive;
  std::vector<std::size_t> pareto;  // indices into archive
  std::size_t best = 0;             // minimal g on the archive
  std::size_t lowest = 0;           // minimal energy on the archive
  long true_opts = 0;
  double eps = 0.0;
  std::string stop_reason;
};

nlohmann::json summary_json(const RunRecord& r);

using OptimizeFn = std::function<OptResult(const Ansatz&, const PauliSum&, const ShotModel&,
                                           const OptBudget&)>;

class Search {
 public:
  Search(SearchConfig cfg, PauliSum h, OptimizeFn optimize = {});

  /// Generation 0: sample, optimize all N, train the comparator.
  void initialize();
  /// Continue from a checkpointed state.
  void restore(SearchState state);
  /// One iteration. Returns false once the run has stopped.
  bool step();
  bool finished() const { return !state_.stop_reason.empty(); }

  const SearchState& state() const { return state_; }
  const SearchConfig& config() const { return cfg_; }
  RunRecord record() const;

 private:
  const ICResult& ic_of(const Ansatz& a);
  Individual& optimize(Individual& ind);
  void add_to_archive(const Individual& ind);

  SearchConfig cfg_;
  PauliSum h_;
  OptimizeFn optimize_;
  SearchState state_;
  std::map<Ansatz, ICResult> ic_cache_;
};

/// Runs to completion. `on_iteration` sees the state after generation 0
/// and after every iteration; returning false interrupts the run.
RunRecord run_search(const SearchConfig& cfg, const PauliSum& h,
                     const std::function<bool(const SearchState&)>& on_iteration = {},
                     const OptimizeFn& optimize = {});

}  // namespace qas
