#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "oracles.hpp"
#include "qas/error.hpp"
#include "qas/hamiltonians.hpp"
#include "qas/trainability.hpp"

using qas::Ansatz;

namespace {

qas::PauliSum word(int n, const std::string& w, double c = 1.0) {
  qas::PauliSum h(n);
  h.add(c, w);
  return h;
}

// Direct transcription of the transition entropy for a symbol string.
double entropy_oracle(const std::vector<int>& s) {
  std::map<std::pair<int, int>, int> counts;
  for (std::size_t t = 0; t + 1 < s.size(); ++t) counts[{s[t], s[t + 1]}]++;
  const double total = static_cast<double>(s.size() - 1);
  double h = 0;
  for (const auto& [pair, c] : counts) {
    if (pair.first == pair.second) continue;
    const double p = c / total;
    h -= p * std::log(p) / std::log(6.0);
  }
  return h;
}

std::vector<int> symbols(const std::vector<double>& y, double eps) {
  std::vector<int> s;
  for (double v : y) s.push_back(v > eps ? 1 : (v < -eps ? -1 : 0));
  return s;
}

}  // namespace

TEST(WalkConfig, DefaultsScaleWithParameters) {
  EXPECT_EQ(qas::WalkConfig::defaults(0, 1).steps, 10);
  EXPECT_EQ(qas::WalkConfig::defaults(3, 1).steps, 30);
  EXPECT_EQ(qas::WalkConfig::defaults(80, 1).steps, 500);
  const auto w = qas::WalkConfig::defaults(2, 1);
  EXPECT_EQ(w.step_scale, 0.05);
  ASSERT_EQ(w.eps_factors.size(), 64u);
  EXPECT_NEAR(w.eps_factors.front(), 1e-4, 1e-18);
  EXPECT_NEAR(w.eps_factors.back(), 1e2, 1e-10);
  EXPECT_NO_THROW(w.validate());
}

TEST(WalkConfig, ValidationRejectsBadValues) {
  auto w = qas::WalkConfig::defaults(2, 1);
  w.steps = 9;
  EXPECT_THROW(w.validate(), qas::Error);
  w = qas::WalkConfig::defaults(2, 1);
  w.step_scale = 0.0;
  EXPECT_THROW(w.validate(), qas::Error);
  w = qas::WalkConfig::defaults(2, 1);
  w.eps_factors = {1.0, 1.0};
  EXPECT_THROW(w.validate(), qas::Error);
}

TEST(RandomWalk, LengthAndBounds) {
  auto w = qas::WalkConfig::defaults(1, 3);
  const auto e = qas::random_walk_energies(Ansatz::from_rows({{1}}), word(1, "Z"), w, {});
  EXPECT_EQ(e.size(), 11u);
  for (double x : e) {
    EXPECT_GE(x, -1.0 - 1e-12);
    EXPECT_LE(x, 1.0 + 1e-12);
  }
  const auto zero = qas::random_walk_energies(Ansatz::from_rows({{1, 2}}), qas::PauliSum(1), w, {});
  for (double x : zero) EXPECT_EQ(x, 0.0);
  EXPECT_THROW(qas::random_walk_energies(Ansatz(1, 2), word(1, "Z"), w, {}), qas::Error);
}

TEST(RandomWalk, StepsHaveFixedLength) {
  // With a single Rx on Z the energy is cos(theta); each step moves theta by
  // exactly +-delta, so consecutive energies are cos(t0 + k*delta) with k
  // changing by one.
  auto w = qas::WalkConfig::defaults(1, 21);
  const auto e = qas::random_walk_energies(Ansatz::from_rows({{1}}), word(1, "Z"), w, {});
  for (std::size_t t = 0; t + 1 < e.size(); ++t) {
    EXPECT_LE(std::abs(e[t + 1] - e[t]), w.step_scale + 1e-12);
  }
}

TEST(IcCurve, ConstantAndMonotoneWalksHaveZeroEntropy) {
  const std::vector<double> flat(12, 1.5);
  const std::vector<double> grid{1e-6, 1e-3, 1.0};
  for (const auto& p : qas::ic_curve(flat, 0.05, grid)) EXPECT_EQ(p.ic, 0.0);
  std::vector<double> rising;
  for (int t = 0; t < 12; ++t) rising.push_back(0.1 * t);
  for (const auto& p : qas::ic_curve(rising, 0.05, std::vector<double>{1e-6})) EXPECT_EQ(p.ic, 0.0);
}

// Alternating energies give slopes +1, -1, +1, ...; the only unequal pairs
// are (+1,-1) and (-1,+1), so IC approaches 2 * (1/2) log6 2 = log6 2 as the
// walk grows.
TEST(IcCurve, AlternatingWalk) {
  for (int len : {21, 201, 2001}) {
    std::vector<double> alt;
    for (int t = 0; t < len; ++t) alt.push_back(t % 2);
    const auto curve = qas::ic_curve(alt, 1.0, std::vector<double>{0.5});
    const auto y = qas::walk_slopes(alt, 1.0);
    EXPECT_NEAR(curve[0].ic, entropy_oracle(symbols(y, 0.5)), 1e-15);
    EXPECT_NEAR(curve[0].ic, std::log(2.0) / std::log(6.0), 1e-3 * 20.0 / (len - 1));
  }
}

TEST(IcCurve, RejectsShortWalks) {
  EXPECT_THROW(qas::ic_curve(std::vector<double>{0.0, 1.0}, 1.0, std::vector<double>{0.1}), qas::Error);
}

TEST(IcCurveProperty, MatchesTransitionEntropyOracle) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> e(3 + rng() % 40);
    for (double& x : e) x = g(rng);
    const double step = 0.1 + 0.1 * (rng() % 5);
    const auto y = qas::walk_slopes(e, step);
    ASSERT_EQ(y.size(), e.size() - 1);
    std::vector<double> grid{0.01, 0.3, 1.0, 3.0, 30.0, 1e4};
    const auto curve = qas::ic_curve(e, step, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      EXPECT_NEAR(curve[k].ic, entropy_oracle(symbols(y, grid[k])), 1e-12);
      EXPECT_GE(curve[k].ic, 0.0);
      EXPECT_LE(curve[k].ic, 1.0);
    }
    EXPECT_EQ(curve.back().ic, 0.0);
  }
}

TEST(InformationContent, ZeroParametersAndNullObservable) {
  const auto w = qas::WalkConfig::defaults(0, 1);
  const auto r = qas::information_content(Ansatz(2, 3), qas::build_hamiltonian(qas::HamiltonianKind::H1, 2), w, {});
  EXPECT_EQ(r.metric, 0.0);
  EXPECT_EQ(r.num_params, 0);
  const auto a = Ansatz::from_rows({{1, 2}, {3, 0}});
  const auto z = qas::information_content(a, qas::PauliSum(2), qas::WalkConfig::defaults(3, 1), {});
  EXPECT_EQ(z.metric, 0.0);
  EXPECT_EQ(z.eps_m, 0.0);
}

TEST(InformationContent, MetricIsEpsTimesRootM) {
  const auto a = Ansatz::from_rows({{1, 2, 5}, {2, 3, 0}});
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H2, 2);
  const auto r = qas::information_content(a, h, qas::WalkConfig::defaults(4, 5), {});
  EXPECT_GT(r.metric, 0.0);
  EXPECT_DOUBLE_EQ(r.metric, r.eps_m * 2.0);
  // eps_M is the first grid point reaching the maximum.
  double best = -1;
  double first_eps = 0;
  for (const auto& p : r.curve) {
    if (p.ic > best) {
      best = p.ic;
      first_eps = p.eps;
    }
  }
  EXPECT_EQ(r.eps_m, first_eps);
}

TEST(InformationContent, DeterministicGivenSeed) {
  const auto a = Ansatz::from_rows({{1, 2, 5}, {2, 3, 4}});
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H1, 2);
  const auto w = qas::WalkConfig::defaults(4, 77);
  const auto r1 = qas::information_content(a, h, w, {128, 3});
  const auto r2 = qas::information_content(a, h, w, {128, 3});
  EXPECT_EQ(qas::to_json(r1).dump(), qas::to_json(r2).dump());
}

// E = cos(theta), so the mean squared gradient over the circle is 1/2. A
// 200-step walk covers only a fraction of the circle, so single walks
// scatter; the seed average must land within a factor 3.
TEST(InformationContent, SingleRxGradientProxyNearOneHalf) {
  auto w = qas::WalkConfig::defaults(1, 0);
  w.steps = 200;
  double mean = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    w.seed = seed;
    const auto r = qas::information_content(Ansatz::from_rows({{1}}), word(1, "Z"), w, {});
    EXPECT_GE(r.grad_norm_proxy, 0.0);
    EXPECT_LE(r.grad_norm_proxy, 1.0 + 1e-9);  // |y| <= max |sin| = 1
    mean += r.grad_norm_proxy / 10;
  }
  EXPECT_GT(mean, 0.5 / 3.0);
  EXPECT_LT(mean, 0.5 * 3.0);
}

TEST(InformationContentProperty, ShiftInvariantAndScaleCovariant) {
  std::mt19937_64 rng(31);
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H1, 3);
  for (int trial = 0; trial < 10; ++trial) {
    const Ansatz a = oracle::random_ansatz(rng, 3, 4);
    const int m = qas::count_params(a);
    if (m == 0) continue;
    const auto w = qas::WalkConfig::defaults(m, 500 + trial);
    const auto base = qas::information_content(a, h, w, {});
    const auto shifted = qas::information_content(a, h.shifted(5.0), w, {});
    const auto scaled = qas::information_content(a, h.scaled(4.0), w, {});
    EXPECT_NEAR(shifted.metric, base.metric, 1e-8 * (1 + base.metric));
    EXPECT_NEAR(scaled.metric, 4.0 * base.metric, 1e-8 * (1 + base.metric));
  }
}

TEST(InformationContentProperty, ArgmaxTracksScaleOnRefinedGrid) {
  // Refine the grid tenfold and scale H by a factor that is an exact grid
  // ratio: the argmax index must move by the matching number of points.
  const auto a = Ansatz::from_rows({{1, 2, 5, 3}, {3, 1, 0, 2}});
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H1, 2);
  std::vector<double> e = qas::random_walk_energies(a, h, qas::WalkConfig::defaults(5, 3), {});
  std::vector<double> scaled_e;
  const double c = 10.0;
  for (double x : e) scaled_e.push_back(c * x);
  const auto grid = qas::WalkConfig::log_grid(1e-6, 1e4, 641);  // 64 points per decade
  const auto argmax = [](const std::vector<qas::ICPoint>& curve) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < curve.size(); ++k)
      if (curve[k].ic > curve[best].ic) best = k;
    return best;
  };
  const double step = 0.05 * std::sqrt(5.0);
  const auto k1 = argmax(qas::ic_curve(e, step, grid));
  const auto k2 = argmax(qas::ic_curve(scaled_e, step, grid));
  EXPECT_NEAR(static_cast<double>(k2) - static_cast<double>(k1), 64.0, 1.0);
}

TEST(InformationContent, LargeThresholdsGiveZero) {
  const auto a = Ansatz::from_rows({{1, 2}, {2, 1}});
  const auto h = qas::build_hamiltonian(qas::HamiltonianKind::H1, 2);
  const auto r = qas::information_content(a, h, qas::WalkConfig::defaults(4, 9), {});
  EXPECT_EQ(r.curve.back().ic, 0.0);
}

TEST(IcJson, ContainsCurve) {
  const auto r = qas::information_content(Ansatz::from_rows({{1}}), word(1, "Z"),
                                          qas::WalkConfig::defaults(1, 2), {});
  const auto j = qas::to_json(r);
  EXPECT_EQ(j.at("ic_curve").size(), 64u);
  EXPECT_EQ(j.at("eps_m").get<double>(), r.eps_m);
}
