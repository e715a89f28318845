#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qas/error.hpp"
#include "qas/hamiltonians.hpp"
#include "qas/quantumsim.hpp"

using qas::Ansatz;
using qas::PauliSum;
using qas::StateVector;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

PauliSum single_term(int n, const std::string& word, double c = 1.0) {
  PauliSum h(n);
  h.add(c, word);
  return h;
}

StateVector plus_state() { return StateVector(1, {{kInvSqrt2, 0}, {kInvSqrt2, 0}}); }

}  // namespace

TEST(PrepareState, IdentityCircuitStaysInZero) {
  const auto s = qas::prepare_state(Ansatz(3, 4), {});
  EXPECT_EQ(s[0], qas::cplx(1, 0));
  for (std::size_t i = 1; i < s.dim(); ++i) EXPECT_EQ(s[i], qas::cplx(0, 0));
}

TEST(PrepareState, HadamardAndBell) {
  const auto plus = qas::prepare_state(Ansatz::from_rows({{4}}), {});
  EXPECT_NEAR(plus[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(plus[1].real(), kInvSqrt2, 1e-15);

  const auto bell = qas::prepare_state(Ansatz::from_rows({{4, 5}, {0, 0}}), {});
  EXPECT_NEAR(bell[0].real(), kInvSqrt2, 1e-15);
  EXPECT_NEAR(std::abs(bell[1]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(bell[2]), 0.0, 1e-15);
  EXPECT_NEAR(bell[3].real(), kInvSqrt2, 1e-15);
}

TEST(PrepareState, RejectsWrongParameterCount) {
  try {
    qas::prepare_state(Ansatz::from_rows({{1, 2}}), std::vector<double>{0.1});
    FAIL();
  } catch (const qas::Error& e) {
    EXPECT_EQ(e.code(), qas::Errc::parameter_length_mismatch);
  }
}

TEST(PrepareStateProperty, MatchesDenseMatrixOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const int m = 1 + static_cast<int>(rng() % 6);
    const Ansatz a = oracle::random_ansatz(rng, n, m);
    const auto params = oracle::random_params(rng, qas::count_params(a));
    const auto got = oracle::to_vec(qas::prepare_state(a, params));
    const auto want = oracle::state(a, params);
    EXPECT_LT((got - want).norm(), 1e-12);
    EXPECT_NEAR(got.norm(), 1.0, 1e-12);
  }
}

TEST(Expectation, HandValues) {
  const auto zero4 = StateVector(4);
  EXPECT_DOUBLE_EQ(qas::expectation(zero4, qas::build_hamiltonian(qas::HamiltonianKind::H1, 4)), 3.0);
  EXPECT_NEAR(qas::expectation(plus_state(), single_term(1, "Z")), 0.0, 1e-15);
  const auto bell = qas::prepare_state(Ansatz::from_rows({{4, 5}, {0, 0}}), {});
  EXPECT_NEAR(qas::expectation(bell, single_term(2, "ZZ")), 1.0, 1e-15);
}

TEST(Expectation, RejectsQubitMismatch) {
  EXPECT_THROW(qas::expectation(StateVector(2), single_term(3, "ZZZ")), qas::Error);
}

TEST(ExpectationProperty, MatchesDenseOracleAndIsLinear) {
  std::mt19937_64 rng(8);
  const std::string letters = "IXYZ";
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    PauliSum h(n);
    std::normal_distribution<double> g;
    const int terms = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < terms; ++t) {
      std::string w;
      for (int k = 0; k < n; ++k) w += letters[rng() % 4];
      h.add(g(rng), w);
    }
    const Ansatz a = oracle::random_ansatz(rng, n, 4);
    const auto params = oracle::random_params(rng, qas::count_params(a));
    const auto psi = qas::prepare_state(a, params);
    const auto v = oracle::to_vec(psi);
    const double want = (v.adjoint() * oracle::dense(h) * v)(0, 0).real();
    const double got = qas::expectation(psi, h);
    EXPECT_NEAR(got, want, 1e-10);
    double sum = 0;
    for (const auto& term : h.terms()) sum += qas::expectation(psi, single_term(n, term.word, term.coeff));
    EXPECT_NEAR(got, sum, 1e-10);
    const auto hv = oracle::to_vec(qas::apply(h, psi));
    EXPECT_LT((hv - oracle::dense(h) * v).norm(), 1e-10);
    const double var_want = (oracle::dense(h) * v).squaredNorm() - want * want;
    EXPECT_NEAR(qas::variance(psi, h), std::max(0.0, var_want), 1e-9);
  }
}

TEST(ExpectationNoisy, ExactWhenShotsZeroOrEigenstate) {
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H2, 3);
  std::mt19937_64 rng(9);
  const Ansatz a = oracle::random_ansatz(rng, 3, 5);
  const auto psi = qas::prepare_state(a, oracle::random_params(rng, qas::count_params(a)));
  EXPECT_EQ(qas::expectation_noisy(psi, h, {0, 5}), qas::expectation(psi, h));
  EXPECT_EQ(qas::expectation_noisy(StateVector(1), single_term(1, "Z"), {100, 5}), 1.0);
}

TEST(ExpectationNoisy, PlusStateWithinFourSigma) {
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const double e = qas::expectation_noisy(plus_state(), single_term(1, "Z"), {10000, seed});
    if (std::abs(e) <= 0.04) ++inside;
  }
  EXPECT_GE(inside, 1996);
}

TEST(ExpectationNoisy, DeterministicAndStreamDependent) {
  const auto z = single_term(1, "Z");
  const double a = qas::expectation_noisy(plus_state(), z, {64, 3}, 7);
  EXPECT_EQ(a, qas::expectation_noisy(plus_state(), z, {64, 3}, 7));
  EXPECT_NE(a, qas::expectation_noisy(plus_state(), z, {64, 3}, 8));
}

TEST(ExpectationNoisy, SampleVarianceMatchesShotModel) {
  const auto z = single_term(1, "Z");
  double s = 0, s2 = 0;
  const int count = 20000;
  for (int k = 0; k < count; ++k) {
    const double e = qas::expectation_noisy(plus_state(), z, {100, 11}, static_cast<std::uint64_t>(k));
    s += e;
    s2 += e * e;
  }
  const double mean = s / count;
  const double var = s2 / count - mean * mean;
  EXPECT_NEAR(mean, 0.0, 5.0 * 0.1 / std::sqrt(count));
  EXPECT_NEAR(var, 0.01, 0.001);
}

TEST(Fidelity, HandValues) {
  EXPECT_DOUBLE_EQ(qas::fidelity(StateVector(1), StateVector(1)), 1.0);
  EXPECT_DOUBLE_EQ(qas::fidelity(StateVector(1), StateVector(1, {{0, 0}, {1, 0}})), 0.0);
  EXPECT_NEAR(qas::fidelity(StateVector(1), plus_state()), 0.5, 1e-15);
  EXPECT_THROW(qas::fidelity(StateVector(1), StateVector(2)), qas::Error);
}

TEST(ParameterShift, SingleRxHandValues) {
  const Ansatz rx = Ansatz::from_rows({{1}});
  const auto z = single_term(1, "Z");
  EXPECT_NEAR(qas::parameter_shift_grad(rx, std::vector<double>{0.0}, z, 0), 0.0, 1e-14);
  EXPECT_NEAR(qas::parameter_shift_grad(rx, std::vector<double>{std::numbers::pi / 2}, z, 0), -1.0, 1e-14);
  try {
    qas::parameter_shift_grad(rx, std::vector<double>{0.0}, z, 1);
    FAIL();
  } catch (const qas::Error& e) {
    EXPECT_EQ(e.code(), qas::Errc::index_out_of_range);
  }
}

TEST(ParameterShiftProperty, MatchesCentralDifferences) {
  std::mt19937_64 rng(10);
  int checked = 0;
  while (checked < 100) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const Ansatz a = oracle::random_ansatz(rng, n, 1 + static_cast<int>(rng() % 6));
    const int m = qas::count_params(a);
    if (m == 0) continue;
    const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H1, n);
    auto p = oracle::random_params(rng, m);
    const std::size_t k = rng() % static_cast<std::size_t>(m);
    const double step = 1e-5;
    auto plus = p, minus = p;
    plus[k] += step;
    minus[k] -= step;
    const double fd = (qas::energy(a, plus, h) - qas::energy(a, minus, h)) / (2 * step);
    EXPECT_NEAR(qas::parameter_shift_grad(a, p, h, k), fd, 1e-6);
    ++checked;
  }
}

TEST(StateJson, RoundTrip) {
  const auto bell = qas::prepare_state(Ansatz::from_rows({{4, 5}, {0, 0}}), {});
  const auto back = qas::state_from_json(qas::to_json(bell));
  EXPECT_EQ(back.qubits(), 2);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back[i], bell[i]);
}
