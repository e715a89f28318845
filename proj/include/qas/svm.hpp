#pragma once

// Multiclass soft-margin SVM with an RBF kernel.
//
// Binary problems are solved by SMO with second-order working-set selection
// and an LRU cache of kernel rows. Multiclass prediction is one-vs-one
// voting; a tied vote goes to the smaller class label.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qas::svm {

/// Dense row-major sample matrix.
struct Matrix {
  std::vector<double> data;
  std::size_t rows = 0;
  std::size_t cols = 0;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : data(r * c, 0.0), rows(r), cols(c) {}
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Per-column affine map to zero mean and unit variance. Constant columns
/// keep scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> inv_scale;

  static Standardizer fit(const Matrix& x);
  void apply(std::span<const double> in, std::span<double> out) const;
  Matrix apply(const Matrix& x) const;
};

struct Params {
  double c = 1.0;
  /// RBF width; <= 0 means 1 / feature dimension.
  double gamma = 0.0;
  double tolerance = 1e-3;
  /// Kernel row cache budget in bytes.
  std::size_t cache_bytes = std::size_t{256} << 20;
  /// Hard cap on SMO iterations per binary problem; 0 picks
  /// max(10^7, 100 * samples).
  std::uint64_t max_iterations = 0;
};

/// One binary sub-problem: class_pos (+1) against class_neg (-1).
struct BinaryMachine {
  int class_pos = 0;
  int class_neg = 0;
  double rho = 0.0;
  std::vector<std::size_t> sv;  // indices into Classifier::support
  std::vector<double> coef;     // alpha_i * y_i
  std::uint64_t iterations = 0;
};

class Classifier {
 public:
  /// Trains on raw (unstandardized) rows. Labels must be >= 0. A training
  /// set with a single class yields a constant predictor (is_constant()).
  static Classifier train(const Matrix& x, std::span<const int> labels, const Params& params = {});

  int predict(std::span<const double> raw) const;
  std::vector<int> predict(const Matrix& raw) const;

  /// Prediction from the squared distances between the standardized sample
  /// and every support vector (same order as support()). Lets callers with
  /// structured features compute distances faster than row by row.
  int predict_from_sq_distances(std::span<const double> sq_dist) const;

  bool is_constant() const { return machines_.empty(); }
  const std::vector<int>& classes() const { return classes_; }
  double gamma() const { return gamma_; }
  double c() const { return c_; }
  std::size_t dim() const { return standardizer_.mean.size(); }
  const Standardizer& standardizer() const { return standardizer_; }
  /// Support vectors in standardized coordinates.
  const Matrix& support() const { return support_; }
  const std::vector<BinaryMachine>& machines() const { return machines_; }

  nlohmann::json to_json() const;
  static Classifier from_json(const nlohmann::json& j);

 private:
  std::vector<int> classes_;
  double gamma_ = 0.0;
  double c_ = 1.0;
  Standardizer standardizer_;
  Matrix support_;
  std::vector<BinaryMachine> machines_;
};

}  // namespace qas::svm
