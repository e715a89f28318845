#pragma once

#include <string_view>

#include "qas/pauli.hpp"
#include "qas/quantumsim.hpp"

namespace qas {

/// Benchmark spin chains (open boundary, qubits 0..n-1):
///   H1  transverse-field Ising      sum Z_i Z_{i+1} + 2 sum X_i
///   H2  Heisenberg with field       sum (XX+YY+ZZ)_{i,i+1} + 2 sum Z_i
///   H3  SSH-type alternating bonds  sum (1 + 3/2 (-1)^(i-1)) (XX+YY+ZZ)_{i,i+1}
///                                   + 2 sum X_i   (i counted from 1)
///   H4  J1-J2                       sum (XX+YY+ZZ)_{i,i+1} + 3 sum (XX+YY+ZZ)_{i,i+2}
enum class HamiltonianKind { H1, H2, H3, H4 };

HamiltonianKind parse_hamiltonian_kind(std::string_view name);
std::string_view to_string(HamiltonianKind kind);

/// n >= 2 (n >= 3 for H4); Errc::invalid_qubit_count otherwise.
PauliSum build_hamiltonian(HamiltonianKind kind, int qubits);

/// Dense 2^n x 2^n matrix, row-major.
std::vector<cplx> dense_matrix(const PauliSum& h);

struct GroundState {
  double energy;
  StateVector state;
};

inline constexpr int kMaxDenseQubits = 14;

/// Lowest eigenpair by dense Hermitian diagonalization.
/// Errc::too_large beyond kMaxDenseQubits.
GroundState exact_ground_energy(const PauliSum& h);

/// lambda_max - lambda_min. Exact up to 10 qubits, otherwise the
/// 2 * sum |coeff| bound.
double spectral_span(const PauliSum& h);

}  // namespace qas
