#pragma once

// Post-run analysis: state-distance clustering, gate statistics, and the
// comparator accuracy benchmark.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qas/circuits.hpp"
#include "qas/hamiltonians.hpp"
#include "qas/quantumsim.hpp"
#include "qas/surrogate.hpp"

namespace qas {

/// Optimized states of reference ansatzes for one Hamiltonian.
struct ClusterSet {
  std::string label;
  std::vector<StateVector> states;
};

/// Mean of 1 - F(s, s_B) over the cluster, in [0, 1].
/// Errc::empty_input for an empty cluster, Errc::dimension_mismatch for
/// mismatched qubit counts.
double distance_to_cluster(const StateVector& s, const ClusterSet& c);

/// Index of the nearest cluster; ties go to the earlier one.
std::size_t assign_cluster(const StateVector& s, std::span<const ClusterSet> clusters);

struct ConfusionMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<int>> counts;  // [true][assigned]

  /// counts[i][i] / row total (0 for an empty row).
  double own_fraction(std::size_t i) const;
  nlohmann::json to_json() const;
};

struct LabelledState {
  std::size_t truth;  // index into the cluster list
  StateVector state;
};

ConfusionMatrix confusion_matrix(std::span<const ClusterSet> clusters,
                                 std::span<const LabelledState> queries);

/// Optimizes every ansatz exactly against h and keeps the prepared states.
ClusterSet build_cluster(std::string label, std::span<const Ansatz> ansatzes, const PauliSum& h,
                         int evals_per_param, std::uint64_t seed);

struct GateStats {
  /// Share of each family among non-identity cells: Rx, Ry, Rz, H, CNOT.
  std::map<std::string, double> ratios;
  double params_mean = 0.0;
  double params_std = 0.0;  // population standard deviation
  std::size_t individuals = 0;

  nlohmann::json to_json() const;
};

/// Errc::empty_input for an empty population.
GateStats gate_stats(std::span<const Ansatz> pop);

struct BenchmarkConfig {
  int qubits = 4;
  int depth = 60;
  int count = 150;
  HamiltonianKind kind = HamiltonianKind::H1;
  int folds = 15;
  int evals_per_param = 200;
  double eps = 0.0;  // <= 0 means 0.05 * spectral span
  std::uint64_t seed = 0;
  bool shuffle_labels = false;  // permutation sanity check
};

struct BenchmarkResult {
  int qubits = 0;
  int depth = 0;
  int count = 0;
  std::size_t pairs = 0;
  int folds = 0;
  double eps = 0.0;
  double accuracy = 0.0;  // pooled over all held-out pairs
  std::vector<double> fold_accuracy;
  std::array<std::size_t, 3> class_counts{};
  double majority_baseline = 0.0;

  nlohmann::json to_json() const;
};

/// k-fold cross-validated accuracy of the comparator on a labelled pair set.
/// Pairs are shuffled with `seed` and dealt round-robin into folds.
/// Errc::degenerate_data when there are fewer pairs than folds.
BenchmarkResult cross_validate(const TrainingSet& data, int folds, std::uint64_t seed,
                               const svm::Params& params = {});

/// Generates `count` distinct random circuits, optimizes them exactly, labels
/// all pairs and cross-validates the comparator.
BenchmarkResult surrogate_benchmark(const BenchmarkConfig& cfg);

/// Writes pareto.csv, convergence.csv and gate_stats.json into the run
/// directory from its summary.json and iterations.jsonl.
void analyze_run(const std::filesystem::path& dir);

}  // namespace qas
