#pragma once

// Data-parallel inner loops behind the simulator and the comparator.
//
// Every kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2/FMA variant compiled in its own translation unit. The active table
// is chosen once at startup from CPUID; set QAS_KERNELS=scalar (or avx2) to
// force a variant. Variants agree to floating-point reassociation error and
// are checked against each other in tests/test_kernels.cpp.
//
// Amplitude layout: interleaved std::complex<double>, basis index bit k is
// qubit k.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string_view>

namespace qas::kernels {

using cplx = std::complex<double>;

/// Row-major 2x2 complex matrix.
struct Mat2 {
  cplx m00, m01, m10, m11;
};

struct KernelTable {
  std::string_view name;

  /// amps <- (I (x) U on `target`) amps.
  void (*apply_1q)(cplx* amps, std::size_t dim, unsigned target, const Mat2& u);

  /// Swaps amplitude pairs differing in `target` where `control` is set.
  void (*apply_cnot)(cplx* amps, std::size_t dim, unsigned control,
                     unsigned target);

  /// sum_i conj(psi[i ^ x]) * (-1)^popcount(i & z) * psi[i].
  /// Multiplying by i^(#Y) gives <psi|P|psi> for the Pauli word with masks
  /// (x, z).
  cplx (*pauli_overlap)(const cplx* psi, std::size_t dim, std::uint64_t x_mask,
                        std::uint64_t z_mask);

  /// out[i ^ x] += coeff * (-1)^popcount(i & z) * in[i]. With coeff carrying
  /// the i^(#Y) phase this accumulates P|in>.
  void (*pauli_accumulate)(const cplx* in, cplx* out, std::size_t dim,
                           std::uint64_t x_mask, std::uint64_t z_mask,
                           cplx coeff);

  /// sum_i conj(a[i]) * b[i].
  cplx (*inner)(const cplx* a, const cplx* b, std::size_t dim);

  /// sum_k (a[k] - b[k])^2.
  double (*squared_distance)(const double* a, const double* b, std::size_t len);
};

const KernelTable& scalar();
/// nullptr when the variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2();

/// Table used by the library. Resolved on first use.
const KernelTable& active();

/// Forces a variant by name ("scalar", "avx2"); returns false when that
/// variant is unavailable. Intended for tests and benchmarking.
bool select(std::string_view name);

}  // namespace qas::kernels
