#pragma once

// Pairwise performance comparison and its learned replacement.
//
// Performance is P = -energy, so higher is better. A comparison h(A, B) is
//   0  B is better by at least eps,
//   1  A is better by at least eps,
//   2  otherwise (too close to call).
// Score(A) sums h(A, B) + 1 - h(B, A) over the rest of the population and
// lies in [0, 2(|pop| - 1)].

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <json.hpp>

#include "qas/circuits.hpp"
#include "qas/svm.hpp"

namespace qas {

using ComparisonLabel = int;

inline double performance(double energy) { return -energy; }

ComparisonLabel true_compare(double perf_a, double perf_b, double eps);

/// h(i, j) for members i != j of some population.
using PairComparator = std::function<ComparisonLabel(std::size_t, std::size_t)>;

/// Score of member `index` in a population of `size`; 0 for a population of
/// one. Errc::index_out_of_range when index >= size (size 0 returns 0).
int score(std::size_t index, std::size_t size, const PairComparator& h);
std::vector<int> scores(std::size_t size, const PairComparator& h);

/// Scores from a dense label table: labels[i * size + j] = h(i, j).
std::vector<int> scores_from_table(std::size_t size, std::span<const ComparisonLabel> labels);

/// concat(flatten(A) + flatten(B), flatten(A) - flatten(B)); length 2nm.
/// Errc::shape_mismatch when the shapes differ.
std::vector<double> pair_feature(const Ansatz& a, const Ansatz& b);

/// A truly optimized circuit.
struct Evaluated {
  Ansatz ansatz;
  double energy = 0.0;
};

struct PairSample {
  std::size_t a;  // indices into TrainingSet::circuits
  std::size_t b;
  ComparisonLabel label;
};

struct TrainingSet {
  std::vector<Evaluated> circuits;
  std::vector<PairSample> pairs;
  double eps = 0.0;

  svm::Matrix features() const;
  std::vector<int> labels() const;
  /// Hash of the feature matrix and labels; equals the trained model's
  /// training_fingerprint().
  std::uint64_t fingerprint() const;
};

/// Labels pairs i < j of `circuits` with true_compare. When there are more
/// than `cap` pairs, pairs touching one of the first `priority` circuits are
/// kept first and the remainder is a seeded uniform sample. Pairs of
/// identical matrices are skipped.
TrainingSet label_pairs(std::vector<Evaluated> circuits, double eps, std::size_t cap,
                        std::size_t priority, std::uint64_t seed);

class ComparatorModel {
 public:
  ComparatorModel() = default;

  int qubits() const { return qubits_; }
  int depth() const { return depth_; }
  std::uint64_t training_fingerprint() const { return fingerprint_; }
  std::size_t training_size() const { return training_size_; }
  bool is_constant() const { return classifier_.is_constant(); }
  const svm::Classifier& classifier() const { return classifier_; }

  /// Errc::shape_mismatch when A or B differs from the training shape.
  ComparisonLabel predict(const Ansatz& a, const Ansatz& b) const;

  /// h(i, j) for every ordered pair of `pop` (diagonal entries are 2),
  /// row-major. Same labels as predict(), computed from per-circuit
  /// projections instead of per-pair kernel distances.
  std::vector<ComparisonLabel> predict_all(std::span<const Ansatz> pop) const;

  nlohmann::json to_json() const;
  static ComparatorModel from_json(const nlohmann::json& j);

  friend ComparatorModel train_comparator(const svm::Matrix&, std::span<const int>, int, int,
                                          const svm::Params&);

 private:
  void check_shape(const Ansatz& a) const;

  int qubits_ = 0;
  int depth_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::size_t training_size_ = 0;
  svm::Classifier classifier_;
};

/// RBF width 1/(2nm), C = 1 unless overridden. A single-class training set
/// gives a constant predictor and a warning on stderr.
ComparatorModel train_comparator(const svm::Matrix& features, std::span<const int> labels,
                                 int qubits, int depth, const svm::Params& params = {});
ComparatorModel train_comparator(const TrainingSet& training, const svm::Params& params = {});

struct RefitResult {
  TrainingSet training;
  ComparatorModel model;
};

/// Retrains on all pairs among archive and elite. Elite entries come first
/// (they win the cap) and replace archive entries with the same matrix when
/// their energy is lower. Pure: equal inputs give equal models.
RefitResult refit(std::span<const Evaluated> archive, std::span<const Evaluated> elite,
                  double eps, std::size_t cap, std::uint64_t seed,
                  const svm::Params& params = {});

inline constexpr std::size_t kDefaultPairCap = 20'000;

}  // namespace qas
