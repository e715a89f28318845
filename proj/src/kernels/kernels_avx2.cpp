// AVX2/FMA variants. Compiled with -mavx2 -mfma; only reached through the
// dispatch table after a CPUID check.

#include <immintrin.h>

#include <bit>

#include "qas/kernels.hpp"

namespace qas::kernels {
namespace {

// A __m256d holds two interleaved complex doubles [re0, im0, re1, im1].

inline __m256d load2(const cplx* p) {
  return _mm256_loadu_pd(reinterpret_cast<const double*>(p));
}

inline void store2(cplx* p, __m256d v) {
  _mm256_storeu_pd(reinterpret_cast<double*>(p), v);
}

// [re, im] -> [im, re] inside each complex.
inline __m256d swap_reim(__m256d v) { return _mm256_permute_pd(v, 0b0101); }

// Exchanges the two complex numbers held in v.
inline __m256d swap_halves(__m256d v) {
  return _mm256_permute2f128_pd(v, v, 0x01);
}

// Broadcast complex scalar times both lanes.
inline __m256d cmul(cplx c, __m256d v) {
  const __m256d re = _mm256_set1_pd(c.real());
  const __m256d im = _mm256_set1_pd(c.imag());
  return _mm256_fmaddsub_pd(re, v, _mm256_mul_pd(im, swap_reim(v)));
}

// Lane-wise complex product.
inline __m256d cmul_lanes(__m256d c, __m256d v) {
  const __m256d re = _mm256_movedup_pd(c);
  const __m256d im = _mm256_permute_pd(c, 0b1111);
  return _mm256_fmaddsub_pd(re, v, _mm256_mul_pd(im, swap_reim(v)));
}

inline __m256d pack(cplx lo, cplx hi) {
  return _mm256_setr_pd(lo.real(), lo.imag(), hi.real(), hi.imag());
}

inline double parity_sign(std::size_t i, std::uint64_t z_mask) {
  return (std::popcount(i & z_mask) & 1) ? -1.0 : 1.0;
}

void apply_1q(cplx* amps, std::size_t dim, unsigned target, const Mat2& u) {
  if (target == 0) {
    const __m256d diag = pack(u.m00, u.m11);
    const __m256d off = pack(u.m01, u.m10);
    for (std::size_t k = 0; k < dim; k += 2) {
      const __m256d v = load2(amps + k);
      const __m256d out = _mm256_add_pd(cmul_lanes(diag, v),
                                        cmul_lanes(off, swap_halves(v)));
      store2(amps + k, out);
    }
    return;
  }
  const std::size_t stride = std::size_t{1} << target;
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t k = base; k < base + stride; k += 2) {
      const __m256d a0 = load2(amps + k);
      const __m256d a1 = load2(amps + k + stride);
      store2(amps + k, _mm256_add_pd(cmul(u.m00, a0), cmul(u.m01, a1)));
      store2(amps + k + stride, _mm256_add_pd(cmul(u.m10, a0), cmul(u.m11, a1)));
    }
  }
}

void apply_cnot(cplx* amps, std::size_t dim, unsigned control, unsigned target) {
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  if (control == 0 || target == 0) {
    for (std::size_t i = 0; i < dim; ++i) {
      if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
    }
    return;
  }
  // Bit 0 is neither control nor target, so pairs (i, i+1) move together.
  for (std::size_t i = 0; i < dim; i += 2) {
    if ((i & cbit) && !(i & tbit)) {
      const __m256d a = load2(amps + i);
      const __m256d b = load2(amps + (i | tbit));
      store2(amps + i, b);
      store2(amps + (i | tbit), a);
    }
  }
}

cplx pauli_overlap(const cplx* psi, std::size_t dim, std::uint64_t x_mask,
                   std::uint64_t z_mask) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  const bool flip_low = x_mask & 1;
  for (std::size_t i = 0; i < dim; i += 2) {
    const __m256d p = load2(psi + i);
    __m256d q = load2(psi + ((i ^ x_mask) & ~std::size_t{1}));
    if (flip_low) q = swap_halves(q);
    const double s0 = parity_sign(i, z_mask);
    const double s1 = parity_sign(i + 1, z_mask);
    const __m256d s = _mm256_setr_pd(s0, s0, s1, s1);
    // conj(q) * p: re = qr*pr + qi*pi, im = qr*pi - qi*pr.
    acc_re = _mm256_fmadd_pd(s, _mm256_mul_pd(q, p), acc_re);
    acc_im = _mm256_fmadd_pd(s, _mm256_mul_pd(q, swap_reim(p)), acc_im);
  }
  alignas(32) double r[4];
  alignas(32) double m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  return {(r[0] + r[1]) + (r[2] + r[3]), (m[0] - m[1]) + (m[2] - m[3])};
}

void pauli_accumulate(const cplx* in, cplx* out, std::size_t dim,
                      std::uint64_t x_mask, std::uint64_t z_mask, cplx coeff) {
  const bool flip_low = x_mask & 1;
  for (std::size_t i = 0; i < dim; i += 2) {
    const double s0 = parity_sign(i, z_mask);
    const double s1 = parity_sign(i + 1, z_mask);
    __m256d v = _mm256_mul_pd(_mm256_setr_pd(s0, s0, s1, s1),
                              cmul(coeff, load2(in + i)));
    if (flip_low) v = swap_halves(v);
    cplx* dst = out + ((i ^ x_mask) & ~std::size_t{1});
    store2(dst, _mm256_add_pd(load2(dst), v));
  }
}

cplx inner(const cplx* a, const cplx* b, std::size_t dim) {
  __m256d acc_re = _mm256_setzero_pd();
  __m256d acc_im = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 2 <= dim; i += 2) {
    const __m256d q = load2(a + i);
    const __m256d p = load2(b + i);
    acc_re = _mm256_fmadd_pd(q, p, acc_re);
    acc_im = _mm256_fmadd_pd(q, swap_reim(p), acc_im);
  }
  alignas(32) double r[4];
  alignas(32) double m[4];
  _mm256_store_pd(r, acc_re);
  _mm256_store_pd(m, acc_im);
  double re = (r[0] + r[1]) + (r[2] + r[3]);
  double im = (m[0] - m[1]) + (m[2] - m[3]);
  for (; i < dim; ++i) {
    re += a[i].real() * b[i].real() + a[i].imag() * b[i].imag();
    im += a[i].real() * b[i].imag() - a[i].imag() * b[i].real();
  }
  return {re, im};
}

double squared_distance(const double* a, const double* b, std::size_t len) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= len; k += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    const __m256d d1 =
        _mm256_sub_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4));
    acc0 = _mm256_fmadd_pd(d0, d0, acc0);
    acc1 = _mm256_fmadd_pd(d1, d1, acc1);
  }
  for (; k + 4 <= len; k += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k));
    acc0 = _mm256_fmadd_pd(d, d, acc0);
  }
  alignas(32) double r[4];
  _mm256_store_pd(r, _mm256_add_pd(acc0, acc1));
  double s = (r[0] + r[1]) + (r[2] + r[3]);
  for (; k < len; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{"avx2",        apply_1q, apply_cnot,
                                 pauli_overlap, pauli_accumulate, inner,
                                 squared_distance};
  return table;
}

}  // namespace qas::kernels
