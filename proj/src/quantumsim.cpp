#include "qas/quantumsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qas/error.hpp"
#include "qas/kernels.hpp"
#include "qas/random.hpp"

namespace qas {
namespace {

void check_qubits(int qubits) {
  if (qubits < 1 || qubits > kMaxSimQubits) {
    throw Error(Errc::invalid_qubit_count,
                "simulator supports 1.." + std::to_string(kMaxSimQubits) +
                    " qubits, got " + std::to_string(qubits));
  }
}

void check_same(const StateVector& psi, const PauliSum& h) {
  if (psi.qubits() != h.qubits()) {
    throw Error(Errc::dimension_mismatch,
                "state has " + std::to_string(psi.qubits()) +
                    " qubits, observable has " + std::to_string(h.qubits()));
  }
}

// i^k for k mod 4.
cplx i_power(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

kernels::Mat2 rotation(GateKind kind, double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  switch (kind) {
    case GateKind::Rx: return {{c, 0}, {0, -s}, {0, -s}, {c, 0}};
    case GateKind::Ry: return {{c, 0}, {-s, 0}, {s, 0}, {c, 0}};
    case GateKind::Rz: return {{c, -s}, {0, 0}, {0, 0}, {c, s}};
    default: break;
  }
  throw Error(Errc::invalid_argument, "not a rotation gate");
}

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;
const kernels::Mat2 kHadamard{{kInvSqrt2, 0}, {kInvSqrt2, 0}, {kInvSqrt2, 0}, {-kInvSqrt2, 0}};

}  // namespace

StateVector::StateVector(int qubits) : qubits_(qubits) {
  check_qubits(qubits);
  amps_.assign(std::size_t{1} << qubits, cplx{0.0, 0.0});
  amps_[0] = 1.0;
}

StateVector::StateVector(int qubits, std::vector<cplx> amplitudes)
    : qubits_(qubits), amps_(std::move(amplitudes)) {
  check_qubits(qubits);
  if (amps_.size() != (std::size_t{1} << qubits)) {
    throw Error(Errc::dimension_mismatch, "amplitude count is not 2^n");
  }
}

double StateVector::norm() const {
  return std::sqrt(kernels::active().inner(amps_.data(), amps_.data(), amps_.size()).real());
}

CompiledCircuit::CompiledCircuit(const Ansatz& a)
    : qubits_(a.qubits()), num_params_(count_params(a)), ops_(schedule(a)) {
  check_qubits(qubits_);
}

StateVector CompiledCircuit::run(std::span<const double> params) const {
  if (static_cast<int>(params.size()) != num_params_) {
    throw Error(Errc::parameter_length_mismatch,
                "circuit takes " + std::to_string(num_params_) +
                    " parameters, got " + std::to_string(params.size()));
  }
  StateVector psi(qubits_);
  const auto& k = kernels::active();
  cplx* amps = psi.amplitudes().data();
  const std::size_t dim = psi.dim();
  for (const Operation& op : ops_) {
    switch (op.kind) {
      case GateKind::I: break;
      case GateKind::H:
        k.apply_1q(amps, dim, static_cast<unsigned>(op.qubit), kHadamard);
        break;
      case GateKind::CNOT:
        k.apply_cnot(amps, dim, static_cast<unsigned>(op.qubit),
                     static_cast<unsigned>(op.target));
        break;
      default:
        k.apply_1q(amps, dim, static_cast<unsigned>(op.qubit),
                   rotation(op.kind, params[op.param_index]));
        break;
    }
  }
  return psi;
}

StateVector prepare_state(const Ansatz& a, std::span<const double> params) {
  return CompiledCircuit(a).run(params);
}

double expectation(const StateVector& psi, const PauliSum& h) {
  check_same(psi, h);
  const auto& k = kernels::active();
  double total = 0.0;
  for (const auto& term : h.terms()) {
    const cplx overlap = k.pauli_overlap(psi.amplitudes().data(), psi.dim(),
                                         term.x_mask(), term.z_mask());
    total += term.coeff * (i_power(term.y_count()) * overlap).real();
  }
  return total;
}

StateVector apply(const PauliSum& h, const StateVector& psi) {
  check_same(psi, h);
  const auto& k = kernels::active();
  std::vector<cplx> out(psi.dim(), cplx{0.0, 0.0});
  for (const auto& term : h.terms()) {
    k.pauli_accumulate(psi.amplitudes().data(), out.data(), psi.dim(),
                       term.x_mask(), term.z_mask(),
                       term.coeff * i_power(term.y_count()));
  }
  return StateVector(psi.qubits(), std::move(out));
}

double variance(const StateVector& psi, const PauliSum& h) {
  const StateVector h_psi = apply(h, psi);
  const auto& k = kernels::active();
  const double mean =
      k.inner(psi.amplitudes().data(), h_psi.amplitudes().data(), psi.dim()).real();
  const double second =
      k.inner(h_psi.amplitudes().data(), h_psi.amplitudes().data(), psi.dim()).real();
  return std::max(0.0, second - mean * mean);
}

double expectation_noisy(const StateVector& psi, const PauliSum& h,
                         const ShotModel& shots, std::uint64_t stream) {
  if (shots.shots == 0) return expectation(psi, h);
  const StateVector h_psi = apply(h, psi);
  const auto& k = kernels::active();
  const double mean =
      k.inner(psi.amplitudes().data(), h_psi.amplitudes().data(), psi.dim()).real();
  const double second =
      k.inner(h_psi.amplitudes().data(), h_psi.amplitudes().data(), psi.dim()).real();
  const double var = std::max(0.0, second - mean * mean);
  if (var == 0.0) return mean;
  Rng rng = make_stream(shots.seed, {stream});
  std::normal_distribution<double> noise(0.0, std::sqrt(var / static_cast<double>(shots.shots)));
  return mean + noise(rng);
}

double fidelity(const StateVector& a, const StateVector& b) {
  if (a.qubits() != b.qubits()) {
    throw Error(Errc::dimension_mismatch, "fidelity of states with different qubit counts");
  }
  const cplx ov = kernels::active().inner(a.amplitudes().data(),
                                          b.amplitudes().data(), a.dim());
  return std::clamp(std::norm(ov), 0.0, 1.0);
}

double energy(const Ansatz& a, std::span<const double> params, const PauliSum& h) {
  return expectation(prepare_state(a, params), h);
}

double parameter_shift_grad(const Ansatz& a, std::span<const double> params,
                            const PauliSum& h, std::size_t k) {
  if (k >= params.size()) {
    throw Error(Errc::index_out_of_range,
                "parameter index " + std::to_string(k) + " out of range");
  }
  const CompiledCircuit circuit(a);
  std::vector<double> shifted(params.begin(), params.end());
  shifted[k] = params[k] + 0.5 * std::numbers::pi;
  const double plus = expectation(circuit.run(shifted), h);
  shifted[k] = params[k] - 0.5 * std::numbers::pi;
  const double minus = expectation(circuit.run(shifted), h);
  return 0.5 * (plus - minus);
}

nlohmann::json to_json(const StateVector& psi) {
  nlohmann::json out = nlohmann::json::array();
  for (const cplx& a : psi.amplitudes()) out.push_back({a.real(), a.imag()});
  return out;
}

StateVector state_from_json(const nlohmann::json& j) {
  try {
    std::vector<cplx> amps;
    for (const auto& pair : j) {
      amps.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    const int n = std::bit_width(amps.size()) - 1;
    if (amps.empty() || (std::size_t{1} << n) != amps.size()) {
      throw Error(Errc::dimension_mismatch, "amplitude count is not a power of two");
    }
    return StateVector(n, std::move(amps));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad state JSON: ") + e.what());
  }
}

}  // namespace qas
