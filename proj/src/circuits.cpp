#include "qas/circuits.hpp"

#include <cmath>
#include <numbers>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

std::string_view kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::I: return "I";
    case GateKind::Rx: return "Rx";
    case GateKind::Ry: return "Ry";
    case GateKind::Rz: return "Rz";
    case GateKind::H: return "H";
    case GateKind::CNOT: return "CNOT";
  }
  return "?";
}

std::vector<GateDescriptor> gate_alphabet(int qubits) {
  if (qubits < 1) {
    throw Error(Errc::invalid_qubit_count,
                "gate alphabet needs at least one qubit, got " +
                    std::to_string(qubits));
  }
  std::vector<GateDescriptor> out;
  out.reserve(code_count(qubits));
  for (GateCode c = 0; c < code_count(qubits); ++c) {
    GateDescriptor d{c, kind_of(c), "", 1, is_parametric(c), {}};
    if (d.kind == GateKind::CNOT) {
      d.name = "CNOT+" + std::to_string(c - kFirstCnotCode);
      d.arity = 2;
      for (int row = 0; row < qubits; ++row) {
        d.targets_by_row.push_back(cnot_target(row, c));
      }
    } else {
      d.name = std::string(kind_name(d.kind));
    }
    out.push_back(std::move(d));
  }
  return out;
}

Ansatz::Ansatz(int qubits, int depth)
    : qubits_(qubits), depth_(depth),
      cells_(static_cast<std::size_t>(qubits) * depth, kCodeI) {
  if (qubits < 1) {
    throw Error(Errc::invalid_qubit_count, "ansatz needs at least one qubit");
  }
  if (depth < 1) throw Error(Errc::invalid_argument, "ansatz depth must be >= 1");
}

Ansatz::Ansatz(int qubits, int depth, std::vector<GateCode> cells)
    : Ansatz(qubits, depth) {
  if (cells.size() != cells_.size()) {
    throw Error(Errc::shape_mismatch,
                "expected " + std::to_string(cells_.size()) + " cells, got " +
                    std::to_string(cells.size()));
  }
  for (GateCode c : cells) {
    if (c < 0 || c >= code_count(qubits)) {
      throw Error(Errc::invalid_argument,
                  "gate code " + std::to_string(c) + " out of range for " +
                      std::to_string(qubits) + " qubits");
    }
  }
  cells_ = std::move(cells);
}

Ansatz Ansatz::from_rows(const std::vector<std::vector<GateCode>>& rows) {
  if (rows.empty() || rows.front().empty()) {
    throw Error(Errc::shape_mismatch, "empty ansatz matrix");
  }
  const int n = static_cast<int>(rows.size());
  const int m = static_cast<int>(rows.front().size());
  std::vector<GateCode> cells;
  cells.reserve(static_cast<std::size_t>(n) * m);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != m) {
      throw Error(Errc::shape_mismatch, "ragged ansatz matrix");
    }
    cells.insert(cells.end(), row.begin(), row.end());
  }
  return Ansatz(n, m, std::move(cells));
}

void Ansatz::set(int row, int col, GateCode code) {
  if (row < 0 || row >= qubits_ || col < 0 || col >= depth_) {
    throw Error(Errc::index_out_of_range, "cell index out of range");
  }
  if (code < 0 || code >= code_count(qubits_)) {
    throw Error(Errc::invalid_argument, "gate code out of range");
  }
  cells_[index(row, col)] = code;
}

Ansatz Ansatz::padded_to(int depth) const {
  if (depth < depth_) {
    throw Error(Errc::shape_mismatch, "cannot pad to a smaller depth");
  }
  Ansatz out(qubits_, depth);
  for (int r = 0; r < qubits_; ++r) {
    for (int c = 0; c < depth_; ++c) out.cells_[out.index(r, c)] = at(r, c);
  }
  return out;
}

std::vector<std::vector<GateCode>> Ansatz::rows() const {
  std::vector<std::vector<GateCode>> out(qubits_);
  for (int r = 0; r < qubits_; ++r) {
    out[r].assign(cells_.begin() + static_cast<std::ptrdiff_t>(index(r, 0)),
                  cells_.begin() + static_cast<std::ptrdiff_t>(index(r, 0)) + depth_);
  }
  return out;
}

std::uint64_t Ansatz::fingerprint() const {
  std::uint64_t h = fnv1a(&qubits_, sizeof qubits_);
  h = fnv1a(&depth_, sizeof depth_, h);
  return fnv1a(cells_.data(), cells_.size() * sizeof(GateCode), h);
}

std::vector<GateCode> flatten(const Ansatz& a) {
  return {a.cells().begin(), a.cells().end()};
}

Ansatz unflatten(std::span<const GateCode> flat, int qubits, int depth) {
  return Ansatz(qubits, depth, std::vector<GateCode>(flat.begin(), flat.end()));
}

int count_params(const Ansatz& a) {
  int count = 0;
  for (GateCode c : a.cells()) count += is_parametric(c) ? 1 : 0;
  return count;
}

std::vector<Operation> schedule(const Ansatz& a) {
  std::vector<Operation> ops;
  int next_param = 0;
  for (int col = 0; col < a.depth(); ++col) {
    for (int row = 0; row < a.qubits(); ++row) {
      const GateCode c = a.at(row, col);
      const GateKind kind = kind_of(c);
      if (kind == GateKind::I) continue;
      Operation op{kind, row, -1, col, -1};
      if (kind == GateKind::CNOT) op.target = cnot_target(row, c);
      if (is_parametric(c)) op.param_index = next_param++;
      ops.push_back(op);
    }
  }
  return ops;
}

namespace {

struct StackEntry {
  GateKind kind;
  int column;
  int param_index;
};

// Reduces each row's gate word left to right. A stack holds the surviving
// single-qubit gates since the last CNOT touching the row; H cancels an H on
// top, a rotation is absorbed by a same-axis rotation on top.
SimplifiedCircuit simplify(const Ansatz& a, std::span<const double> params,
                           bool track_params) {
  const auto ops = schedule(a);
  Ansatz out = a;
  std::vector<double> angles(params.begin(), params.end());
  std::vector<bool> dropped_param(static_cast<std::size_t>(count_params(a)), false);

  for (int row = 0; row < a.qubits(); ++row) {
    std::vector<StackEntry> stack;
    for (const Operation& op : ops) {
      if (op.kind == GateKind::CNOT) {
        if (op.qubit == row || op.target == row) stack.clear();
        continue;
      }
      if (op.qubit != row) continue;
      if (!stack.empty()) {
        StackEntry& top = stack.back();
        if (op.kind == GateKind::H && top.kind == GateKind::H) {
          out.set(row, top.column, kCodeI);
          out.set(row, op.column, kCodeI);
          stack.pop_back();
          continue;
        }
        if (op.kind == top.kind) {  // same-axis rotation
          out.set(row, op.column, kCodeI);
          dropped_param[op.param_index] = true;
          if (track_params) {
            angles[top.param_index] = std::fmod(
                angles[top.param_index] + angles[op.param_index],
                2.0 * std::numbers::pi);
            if (angles[top.param_index] < 0.0) {
              angles[top.param_index] += 2.0 * std::numbers::pi;
            }
          }
          continue;
        }
      }
      stack.push_back({op.kind, op.column, op.param_index});
    }
  }

  SimplifiedCircuit result{std::move(out), {}};
  if (track_params) {
    for (std::size_t k = 0; k < angles.size(); ++k) {
      if (!dropped_param[k]) result.params.push_back(angles[k]);
    }
  }
  return result;
}

}  // namespace

Ansatz postprocess(const Ansatz& a) { return simplify(a, {}, false).ansatz; }

SimplifiedCircuit postprocess(const Ansatz& a, std::span<const double> params) {
  if (static_cast<int>(params.size()) != count_params(a)) {
    throw Error(Errc::parameter_length_mismatch,
                "expected " + std::to_string(count_params(a)) +
                    " parameters, got " + std::to_string(params.size()));
  }
  return simplify(a, params, true);
}

nlohmann::json to_json(const Ansatz& a) {
  return {{"n", a.qubits()}, {"m", a.depth()}, {"matrix", a.rows()}};
}

nlohmann::json to_json(const Ansatz& a, std::span<const double> params) {
  auto j = to_json(a);
  j["params"] = std::vector<double>(params.begin(), params.end());
  return j;
}

Ansatz ansatz_from_json(const nlohmann::json& j) {
  try {
    auto rows = j.at("matrix").get<std::vector<std::vector<GateCode>>>();
    Ansatz a = Ansatz::from_rows(rows);
    if (j.contains("n") && j.at("n").get<int>() != a.qubits()) {
      throw Error(Errc::shape_mismatch, "'n' disagrees with matrix rows");
    }
    if (j.contains("m") && j.at("m").get<int>() != a.depth()) {
      throw Error(Errc::shape_mismatch, "'m' disagrees with matrix columns");
    }
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad ansatz JSON: ") + e.what());
  }
}

ParamVector params_from_json(const nlohmann::json& j) {
  if (!j.contains("params")) return {};
  try {
    return j.at("params").get<ParamVector>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad params: ") + e.what());
  }
}

}  // namespace qas
