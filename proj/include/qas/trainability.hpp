#pragma once

// Information-content (IC) trainability estimate from a random walk in
// parameter space.
//
// The walk records energies E_0..E_W; each step has Euclidean length
// delta * sqrt(M), so y_t = (E_{t+1} - E_t) / (delta * sqrt(M)) is a
// directional-derivative sample. For a threshold eps every slope becomes a
// symbol in {-1, 0, +1} (0 when |y_t| <= eps) and IC(eps) is the base-6
// entropy of unequal consecutive symbol pairs. eps_M maximizes IC(eps) and
// the ranking metric is eps_M * sqrt(M).

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qas/circuits.hpp"
#include "qas/pauli.hpp"
#include "qas/quantumsim.hpp"

namespace qas {

struct WalkConfig {
  int steps = 10;            // W, >= 10
  double step_scale = 0.05;  // delta, radians per sqrt(parameter)
  /// Thresholds relative to max |y_t|; strictly increasing, positive.
  std::vector<double> eps_factors;
  std::uint64_t seed = 0;

  /// W = clamp(10 M, 10, 500), delta = 0.05, 64 log-spaced factors over
  /// [1e-4, 1e2].
  static WalkConfig defaults(int num_params, std::uint64_t seed);
  static std::vector<double> log_grid(double lo, double hi, int points);
  void validate() const;
};

struct ICPoint {
  double eps;
  double ic;
};

struct ICResult {
  double eps_m = 0.0;
  std::vector<ICPoint> curve;
  double metric = 0.0;           // eps_M * sqrt(M)
  double grad_norm_proxy = 0.0;  // M * Var_t(y_t)
  int num_params = 0;
};

/// W + 1 energies along the walk. Errc::invalid_argument when M = 0.
std::vector<double> random_walk_energies(const Ansatz& a, const PauliSum& h,
                                         const WalkConfig& walk,
                                         const ShotModel& shots);

/// Slopes between consecutive energies for a fixed step length.
std::vector<double> walk_slopes(std::span<const double> energies, double step_length);

/// IC(eps) for each threshold. `step_length` is the Euclidean length of one
/// walk step (delta * sqrt(M)). Needs at least 3 energies.
std::vector<ICPoint> ic_curve(std::span<const double> energies, double step_length,
                              std::span<const double> eps_grid);

/// Zero-parameter ansatzes get metric 0. A walk whose IC vanishes for every
/// threshold (constant or sign-homogeneous landscape) also gets eps_M = 0.
ICResult information_content(const Ansatz& a, const PauliSum& h,
                             const WalkConfig& walk, const ShotModel& shots);

/// Same analysis on a pre-recorded walk.
ICResult analyze_walk(std::span<const double> energies, int num_params,
                      const WalkConfig& walk);

nlohmann::json to_json(const ICResult& r);

}  // namespace qas
