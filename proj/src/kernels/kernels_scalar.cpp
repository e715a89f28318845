#include <bit>

#include "qas/kernels.hpp"

namespace qas::kernels {
namespace {

void apply_1q(cplx* amps, std::size_t dim, unsigned target, const Mat2& u) {
  const std::size_t stride = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; ++k) {
      const cplx a0 = amps[k];
      const cplx a1 = amps[k + stride];
      amps[k] = u.m00 * a0 + u.m01 * a1;
      amps[k + stride] = u.m10 * a0 + u.m11 * a1;
    }
  }
}

void apply_cnot(cplx* amps, std::size_t dim, unsigned control, unsigned target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t i = 0; i < dim; ++i) {
    if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
  }
}

cplx pauli_overlap(const cplx* psi, std::size_t dim, std::uint64_t x_mask,
                   std::uint64_t z_mask) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx a = std::conj(psi[i ^ x_mask]) * psi[i];
    if (std::popcount(i & z_mask) & 1) {
      re -= a.real();
      im -= a.imag();
    } else {
      re += a.real();
      im += a.imag();
    }
  }
  return {re, im};
}

void pauli_accumulate(const cplx* in, cplx* out, std::size_t dim,
                      std::uint64_t x_mask, std::uint64_t z_mask, cplx coeff) {
  for (std::size_t i = 0; i < dim; ++i) {
    const cplx v = coeff * in[i];
    out[i ^ x_mask] += (std::popcount(i & z_mask) & 1) ? -v : v;
  }
}

cplx inner(const cplx* a, const cplx* b, std::size_t dim) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double squared_distance(const double* a, const double* b, std::size_t len) {
  double s = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& scalar() {
  static const KernelTable table{"scalar",      apply_1q, apply_cnot,
                                 pauli_overlap, pauli_accumulate, inner,
                                 squared_distance};
  return table;
}

}  // namespace qas::kernels
