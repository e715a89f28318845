#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qas {

/// A real-weighted Pauli word. Character k of `word` acts on qubit k.
struct PauliTerm {
  double coeff = 0.0;
  std::string word;

  /// Bit k set when qubit k carries X or Y.
  std::uint64_t x_mask() const;
  /// Bit k set when qubit k carries Z or Y.
  std::uint64_t z_mask() const;
  int y_count() const;
};

/// Hermitian observable as a sum of Pauli words with real coefficients.
/// Duplicate words are merged on construction, first-occurrence order kept.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int qubits) : qubits_(qubits) {}
  PauliSum(int qubits, std::vector<PauliTerm> terms);

  int qubits() const { return qubits_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Adds a term, merging into an existing identical word.
  void add(double coeff, const std::string& word);

  PauliSum scaled(double factor) const;
  /// Adds `shift` times the identity.
  PauliSum shifted(double shift) const;

  /// Sum of |coeff|; bounds the spectral radius.
  double coefficient_norm() const;

 private:
  int qubits_ = 0;
  std::vector<PauliTerm> terms_;
};

// PauliSum JSON: {"n": int, "terms": [{"coeff": float, "word": "ZZI..."}, ...]}
nlohmann::json to_json(const PauliSum& h);
PauliSum pauli_sum_from_json(const nlohmann::json& j);

}  // namespace qas
