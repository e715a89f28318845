#pragma once

// Integer-matrix codification of parametric circuits.
//
// An ansatz on n qubits with maximal depth m is an n x m grid of gate codes.
// Row i is qubit i; column j holds the operations applied at depth step j.
// Within a column, cells are applied in row order.
//
// Code table for n qubits (n + 4 codes in total):
//   0 I, 1 Rx, 2 Ry, 3 Rz, 4 H,
//   5 + k  CNOT with this row as control and the k-th other qubit (ascending
//          index, skipping the row itself) as target, k = 0 .. n-2.

#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace qas {

using GateCode = int;

enum class GateKind : std::uint8_t { I, Rx, Ry, Rz, H, CNOT };

inline constexpr GateCode kCodeI = 0;
inline constexpr GateCode kCodeRx = 1;
inline constexpr GateCode kCodeRy = 2;
inline constexpr GateCode kCodeRz = 3;
inline constexpr GateCode kCodeH = 4;
inline constexpr GateCode kFirstCnotCode = 5;

/// Number of distinct codes for n qubits: (n - 1) + 5.
constexpr int code_count(int qubits) { return qubits + 4; }

constexpr GateKind kind_of(GateCode code) {
  switch (code) {
    case 0: return GateKind::I;
    case 1: return GateKind::Rx;
    case 2: return GateKind::Ry;
    case 3: return GateKind::Rz;
    case 4: return GateKind::H;
    default: return GateKind::CNOT;
  }
}

constexpr bool is_parametric(GateCode code) { return code >= 1 && code <= 3; }

/// Target qubit of a CNOT code placed on `row`.
constexpr int cnot_target(int row, GateCode code) {
  const int k = code - kFirstCnotCode;
  return k < row ? k : k + 1;
}

std::string_view kind_name(GateKind kind);

struct GateDescriptor {
  GateCode code;
  GateKind kind;
  std::string name;  // "I", "Rx", ..., "CNOT+k"
  int arity;         // 1 or 2
  bool parametric;
  /// For CNOT codes: target qubit for each control row (size n); empty
  /// otherwise.
  std::vector<int> targets_by_row;
};

/// Descriptors for every code usable on n qubits. Throws
/// Errc::invalid_qubit_count for n < 1.
std::vector<GateDescriptor> gate_alphabet(int qubits);

class Ansatz {
 public:
  Ansatz() = default;
  /// All-identity circuit.
  Ansatz(int qubits, int depth);
  /// Cells given row-major; validated against the code table.
  Ansatz(int qubits, int depth, std::vector<GateCode> cells);

  static Ansatz from_rows(const std::vector<std::vector<GateCode>>& rows);

  int qubits() const { return qubits_; }
  int depth() const { return depth_; }
  GateCode at(int row, int col) const { return cells_[index(row, col)]; }
  void set(int row, int col, GateCode code);

  /// Row-major cells, identical to flatten().
  std::span<const GateCode> cells() const { return cells_; }

  /// Copy padded with identity columns up to `depth`.
  Ansatz padded_to(int depth) const;

  std::vector<std::vector<GateCode>> rows() const;
  std::uint64_t fingerprint() const;

  friend bool operator==(const Ansatz&, const Ansatz&) = default;
  friend auto operator<=>(const Ansatz& a, const Ansatz& b) {
    if (auto c = a.qubits_ <=> b.qubits_; c != 0) return c;
    if (auto c = a.depth_ <=> b.depth_; c != 0) return c;
    return std::lexicographical_compare_three_way(
        a.cells_.begin(), a.cells_.end(), b.cells_.begin(), b.cells_.end());
  }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * depth_ + col;
  }

  int qubits_ = 0;
  int depth_ = 0;
  std::vector<GateCode> cells_;
};

using ParamVector = std::vector<double>;

std::vector<GateCode> flatten(const Ansatz& a);
Ansatz unflatten(std::span<const GateCode> flat, int qubits, int depth);

/// Number of cells holding Rx, Ry or Rz.
int count_params(const Ansatz& a);

/// One scheduled operation. Execution order is column by column, rows top to
/// bottom inside a column; parametric operations consume parameters in that
/// same order.
struct Operation {
  GateKind kind;
  int qubit;       // the row (control qubit for CNOT)
  int target;      // CNOT target; -1 otherwise
  int column;
  int param_index; // -1 for non-parametric gates
};

std::vector<Operation> schedule(const Ansatz& a);

/// Simplification rules applied until fixpoint:
///  * two consecutive H on a qubit cancel,
///  * consecutive rotations of the same axis merge into the leftmost one.
/// "Consecutive" skips identity cells; any CNOT touching the qubit (as
/// control or target) separates runs.
Ansatz postprocess(const Ansatz& a);

struct SimplifiedCircuit {
  Ansatz ansatz;
  ParamVector params;
};

/// postprocess() carrying a parameter assignment along: merged rotation
/// angles are summed (mod 2*pi), so the simplified circuit prepares the same
/// state up to global phase.
SimplifiedCircuit postprocess(const Ansatz& a, std::span<const double> params);

// Ansatz JSON: {"n": int, "m": int, "matrix": [[...], ...], "params": [...]}.
nlohmann::json to_json(const Ansatz& a);
nlohmann::json to_json(const Ansatz& a, std::span<const double> params);
Ansatz ansatz_from_json(const nlohmann::json& j);
/// Reads the optional "params" array; empty when absent.
ParamVector params_from_json(const nlohmann::json& j);

}  // namespace qas
