#pragma once

// Dense statevector simulation of codified ansatzes.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "qas/circuits.hpp"
#include "qas/pauli.hpp"

namespace qas {

using cplx = std::complex<double>;

/// 2^n amplitudes; bit k of a basis index is qubit k.
class StateVector {
 public:
  StateVector() = default;
  /// |0...0>.
  explicit StateVector(int qubits);
  StateVector(int qubits, std::vector<cplx> amplitudes);

  int qubits() const { return qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const cplx> amplitudes() const { return amps_; }
  std::span<cplx> amplitudes() { return amps_; }
  cplx operator[](std::size_t i) const { return amps_[i]; }

  double norm() const;

 private:
  int qubits_ = 0;
  std::vector<cplx> amps_;
};

/// Largest register the dense simulator accepts.
inline constexpr int kMaxSimQubits = 24;

/// Gate schedule resolved once so repeated evaluations with different
/// parameters skip decoding.
class CompiledCircuit {
 public:
  explicit CompiledCircuit(const Ansatz& a);

  int qubits() const { return qubits_; }
  int num_params() const { return num_params_; }

  /// U(params)|0...0>. Throws Errc::parameter_length_mismatch.
  StateVector run(std::span<const double> params) const;

 private:
  int qubits_;
  int num_params_;
  std::vector<Operation> ops_;
};

StateVector prepare_state(const Ansatz& a, std::span<const double> params);

/// <psi|H|psi>.
double expectation(const StateVector& psi, const PauliSum& h);

/// H|psi>.
StateVector apply(const PauliSum& h, const StateVector& psi);

/// <H^2> - <H>^2, clamped at zero.
double variance(const StateVector& psi, const PauliSum& h);

/// Measurement model. shots == 0 means exact expectation values.
struct ShotModel {
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
};

/// Expectation plus Gaussian shot noise N(0, Var_psi(H)/shots). The noise
/// draw comes from the substream (seed, stream), so calls are reproducible
/// independent of evaluation order.
double expectation_noisy(const StateVector& psi, const PauliSum& h,
                         const ShotModel& shots, std::uint64_t stream = 0);

/// |<a|b>|^2.
double fidelity(const StateVector& a, const StateVector& b);

double energy(const Ansatz& a, std::span<const double> params, const PauliSum& h);

/// (E(theta + pi/2 e_k) - E(theta - pi/2 e_k)) / 2, exact.
double parameter_shift_grad(const Ansatz& a, std::span<const double> params,
                            const PauliSum& h, std::size_t k);

/// [[re, im], ...].
nlohmann::json to_json(const StateVector& psi);
StateVector state_from_json(const nlohmann::json& j);

}  // namespace qas
