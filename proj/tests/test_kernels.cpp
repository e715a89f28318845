#include <gtest/gtest.h>

#include <random>

#include "qas/kernels.hpp"

using qas::kernels::cplx;
using qas::kernels::KernelTable;

namespace {

std::vector<cplx> random_state(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<cplx> v(dim);
  for (auto& a : v) a = {g(rng), g(rng)};
  return v;
}

qas::kernels::Mat2 random_mat(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

class KernelEquivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = qas::kernels::avx2();
    if (!simd_) GTEST_SKIP() << "AVX2 kernels unavailable on this CPU";
  }
  const KernelTable& ref_ = qas::kernels::scalar();
  const KernelTable* simd_ = nullptr;
};

}  // namespace

TEST_F(KernelEquivalence, ApplyOneQubit) {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 9; ++n) {
    const std::size_t dim = std::size_t{1} << n;
    for (int q = 0; q < n; ++q) {
      auto a = random_state(rng, dim);
      auto b = a;
      const auto m = random_mat(rng);
      ref_.apply_1q(a.data(), dim, static_cast<unsigned>(q), m);
      simd_->apply_1q(b.data(), dim, static_cast<unsigned>(q), m);
      EXPECT_LT(max_diff(a, b), 1e-12) << "n=" << n << " q=" << q;
    }
  }
}

TEST_F(KernelEquivalence, ApplyCnot) {
  std::mt19937_64 rng(2);
  for (int n = 2; n <= 8; ++n) {
    const std::size_t dim = std::size_t{1} << n;
    for (int c = 0; c < n; ++c) {
      for (int t = 0; t < n; ++t) {
        if (c == t) continue;
        auto a = random_state(rng, dim);
        auto b = a;
        ref_.apply_cnot(a.data(), dim, static_cast<unsigned>(c), static_cast<unsigned>(t));
        simd_->apply_cnot(b.data(), dim, static_cast<unsigned>(c), static_cast<unsigned>(t));
        EXPECT_EQ(max_diff(a, b), 0.0) << "c=" << c << " t=" << t;
      }
    }
  }
}

TEST_F(KernelEquivalence, PauliOverlapAndAccumulate) {
  std::mt19937_64 rng(3);
  for (int n = 1; n <= 8; ++n) {
    const std::size_t dim = std::size_t{1} << n;
    for (int trial = 0; trial < 20; ++trial) {
      const auto psi = random_state(rng, dim);
      const std::uint64_t x = rng() & (dim - 1);
      const std::uint64_t z = rng() & (dim - 1);
      const cplx r = ref_.pauli_overlap(psi.data(), dim, x, z);
      const cplx s = simd_->pauli_overlap(psi.data(), dim, x, z);
      EXPECT_LT(std::abs(r - s), 1e-10 * (1.0 + std::abs(r)));

      std::vector<cplx> out_r(dim, cplx{0.5, -0.25}), out_s = out_r;
      const cplx w{0.3, -1.1};
      ref_.pauli_accumulate(psi.data(), out_r.data(), dim, x, z, w);
      simd_->pauli_accumulate(psi.data(), out_s.data(), dim, x, z, w);
      EXPECT_LT(max_diff(out_r, out_s), 1e-12);
    }
  }
}

TEST_F(KernelEquivalence, InnerAndSquaredDistance) {
  std::mt19937_64 rng(4);
  for (std::size_t dim : {1u, 2u, 3u, 5u, 8u, 17u, 64u, 1023u}) {
    const auto a = random_state(rng, dim);
    const auto b = random_state(rng, dim);
    const cplx r = ref_.inner(a.data(), b.data(), dim);
    const cplx s = simd_->inner(a.data(), b.data(), dim);
    EXPECT_LT(std::abs(r - s), 1e-10 * (1.0 + std::abs(r)));

    std::vector<double> x(dim), y(dim);
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
    }
    const double dr = ref_.squared_distance(x.data(), y.data(), dim);
    const double ds = simd_->squared_distance(x.data(), y.data(), dim);
    EXPECT_NEAR(dr, ds, 1e-10 * (1.0 + dr));
  }
}

TEST(KernelDispatch, SelectByName) {
  const std::string before(qas::kernels::active().name);
  EXPECT_TRUE(qas::kernels::select("scalar"));
  EXPECT_EQ(qas::kernels::active().name, "scalar");
  if (qas::kernels::avx2()) {
    EXPECT_TRUE(qas::kernels::select("avx2"));
    EXPECT_EQ(qas::kernels::active().name, "avx2");
  }
  EXPECT_FALSE(qas::kernels::select("neon"));
  EXPECT_TRUE(qas::kernels::select(before));
}

TEST(KernelScalar, PauliOverlapMatchesDefinition) {
  // <psi| X_0 Z_1 |psi> style check on a 2-qubit state with hand values:
  // P|i> = (-1)^{popcount(i & z)} |i ^ x>, overlap = sum conj(psi[i^x]) sign psi[i].
  const std::vector<cplx> psi{{0.5, 0}, {0, 0.5}, {0.5, 0}, {-0.5, 0}};
  const cplx got = qas::kernels::scalar().pauli_overlap(psi.data(), 4, 1, 2);
  cplx expect{0, 0};
  for (std::size_t i = 0; i < 4; ++i) {
    const double sign = ((i & 2) ? -1.0 : 1.0);
    expect += std::conj(psi[i ^ 1]) * sign * psi[i];
  }
  EXPECT_LT(std::abs(got - expect), 1e-15);
}
