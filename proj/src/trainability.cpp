#include "qas/trainability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

std::vector<double> WalkConfig::log_grid(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int k = 0; k < points; ++k) {
    grid[k] = std::exp(a + (b - a) * k / std::max(1, points - 1));
  }
  return grid;
}

WalkConfig WalkConfig::defaults(int num_params, std::uint64_t seed) {
  WalkConfig w;
  w.steps = std::clamp(10 * num_params, 10, 500);
  w.step_scale = 0.05;
  w.eps_factors = log_grid(1e-4, 1e2, 64);
  w.seed = seed;
  return w;
}

void WalkConfig::validate() const {
  if (steps < 10) throw Error(Errc::invalid_argument, "walk needs at least 10 steps");
  if (!(step_scale > 0.0)) throw Error(Errc::invalid_argument, "step scale must be > 0");
  if (eps_factors.empty()) throw Error(Errc::invalid_argument, "empty eps grid");
  for (std::size_t k = 0; k < eps_factors.size(); ++k) {
    if (!(eps_factors[k] > 0.0) || (k > 0 && !(eps_factors[k] > eps_factors[k - 1]))) {
      throw Error(Errc::invalid_argument, "eps grid must be positive and strictly increasing");
    }
  }
}

std::vector<double> random_walk_energies(const Ansatz& a, const PauliSum& h,
                                         const WalkConfig& walk,
                                         const ShotModel& shots) {
  walk.validate();
  const CompiledCircuit circuit(a);
  const int m = circuit.num_params();
  if (m == 0) throw Error(Errc::invalid_argument, "ansatz has no parameters to walk");

  Rng rng = make_stream(walk.seed, {0});
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double step_length = walk.step_scale * std::sqrt(static_cast<double>(m));

  std::vector<double> theta(static_cast<std::size_t>(m));
  for (double& t : theta) t = angle(rng);
  std::vector<double> dir(theta.size());

  std::vector<double> energies;
  energies.reserve(static_cast<std::size_t>(walk.steps) + 1);
  for (int t = 0; t <= walk.steps; ++t) {
    energies.push_back(
        expectation_noisy(circuit.run(theta), h, shots, static_cast<std::uint64_t>(t)));
    if (t == walk.steps) break;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& d : dir) {
        d = gauss(rng);
        norm2 += d * d;
      }
    } while (norm2 == 0.0);
    const double scale = step_length / std::sqrt(norm2);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] += scale * dir[k];
  }
  return energies;
}

std::vector<double> walk_slopes(std::span<const double> energies, double step_length) {
  std::vector<double> y;
  if (energies.size() < 2) return y;
  y.reserve(energies.size() - 1);
  for (std::size_t t = 0; t + 1 < energies.size(); ++t) {
    y.push_back((energies[t + 1] - energies[t]) / step_length);
  }
  return y;
}

namespace {

int symbol(double y, double eps) {
  if (y > eps) return 2;   // +1
  if (y < -eps) return 0;  // -1
  return 1;                // 0
}

double entropy_for(std::span<const double> slopes, double eps) {
  std::array<int, 9> counts{};
  for (std::size_t t = 0; t + 1 < slopes.size(); ++t) {
    counts[3 * symbol(slopes[t], eps) + symbol(slopes[t + 1], eps)]++;
  }
  const double pairs = static_cast<double>(slopes.size() - 1);
  const double log6 = std::log(6.0);
  double ic = 0.0;
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      if (a == b) continue;
      const int c = counts[3 * a + b];
      if (c == 0) continue;
      const double p = c / pairs;
      ic -= p * std::log(p) / log6;
    }
  }
  return ic;
}

double variance_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

std::vector<ICPoint> ic_curve(std::span<const double> energies, double step_length,
                              std::span<const double> eps_grid) {
  if (energies.size() < 3) {
    throw Error(Errc::invalid_argument, "IC needs at least 3 energies");
  }
  if (!(step_length > 0.0)) throw Error(Errc::invalid_argument, "step length must be > 0");
  const auto slopes = walk_slopes(energies, step_length);
  std::vector<ICPoint> curve;
  curve.reserve(eps_grid.size());
  for (double eps : eps_grid) curve.push_back({eps, entropy_for(slopes, eps)});
  return curve;
}

ICResult analyze_walk(std::span<const double> energies, int num_params,
                      const WalkConfig& walk) {
  ICResult r;
  r.num_params = num_params;
  if (num_params == 0) return r;
  const double sqrt_m = std::sqrt(static_cast<double>(num_params));
  const double step_length = walk.step_scale * sqrt_m;
  const auto slopes = walk_slopes(energies, step_length);

  double max_abs = 0.0;
  for (double y : slopes) max_abs = std::max(max_abs, std::abs(y));
  r.grad_norm_proxy = variance_of(slopes) * num_params;
  if (max_abs == 0.0) return r;

  std::vector<double> grid(walk.eps_factors.size());
  for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = walk.eps_factors[k] * max_abs;
  r.curve = ic_curve(energies, step_length, grid);

  double best_ic = 0.0;
  for (const auto& p : r.curve) {
    if (p.ic > best_ic) {  // strict: ties stay on the smaller eps
      best_ic = p.ic;
      r.eps_m = p.eps;
    }
  }
  r.metric = r.eps_m * sqrt_m;
  return r;
}

ICResult information_content(const Ansatz& a, const PauliSum& h,
                             const WalkConfig& walk, const ShotModel& shots) {
  walk.validate();
  const int m = count_params(a);
  if (m == 0) {
    ICResult r;
    return r;
  }
  const auto energies = random_walk_energies(a, h, walk, shots);
  return analyze_walk(energies, m, walk);
}

nlohmann::json to_json(const ICResult& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& p : r.curve) curve.push_back({{"eps", p.eps}, {"ic", p.ic}});
  return {{"eps_m", r.eps_m},
          {"metric", r.metric},
          {"grad_norm_proxy", r.grad_norm_proxy},
          {"num_params", r.num_params},
          {"ic_curve", curve}};
}

}  // namespace qas
