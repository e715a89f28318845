#pragma once

// Inner-loop parameter tuning: minimize <H> over the angles of a fixed
// ansatz with a derivative-free method.

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "qas/circuits.hpp"
#include "qas/pauli.hpp"
#include "qas/quantumsim.hpp"

namespace qas {

struct OptBudget {
  int max_evals = 200;  // per restart
  double ftol = 1e-6;
  std::uint64_t seed = 0;
  int restarts = 1;

  /// 200 * max(1, M) evaluations, ftol 1e-6.
  static OptBudget defaults(int num_params, std::uint64_t seed, int restarts = 1);
};

struct OptResult {
  ParamVector best_params;
  double best_energy = 0.0;  // exact (noise-free) energy at best_params
  int evals_used = 0;        // objective calls, excluding the exact re-check
};

using Objective = std::function<double(std::span<const double>)>;

struct LocalResult {
  std::vector<double> x;
  double fx = 0.0;
  int evals = 0;
};

/// Pluggable derivative-free local method.
class Minimizer {
 public:
  virtual ~Minimizer() = default;
  virtual LocalResult minimize(const Objective& f, std::vector<double> x0,
                               int max_evals, double ftol) const = 0;
};

/// Nelder-Mead with dimension-adaptive coefficients (Gao & Han):
/// reflection 1, expansion 1 + 2/d, contraction 0.75 - 1/(2d),
/// shrink 1 - 1/d. Stops when the simplex value spread drops below ftol or
/// the evaluation budget is spent.
class NelderMead final : public Minimizer {
 public:
  explicit NelderMead(double initial_step = 0.5) : initial_step_(initial_step) {}

  LocalResult minimize(const Objective& f, std::vector<double> x0, int max_evals,
                       double ftol) const override;

 private:
  double initial_step_;
};

const Minimizer& default_minimizer();

/// Best of `restarts` local runs, each from uniform angles in [0, 2pi)^M
/// drawn from the substream (seed, restart). Noisy objective calls use the
/// substream (shots.seed, restart, call). The reported energy is the exact
/// energy at the best point found. M = 0 evaluates the fixed circuit once.
OptResult minimize_energy(const Ansatz& a, const PauliSum& h, const ShotModel& shots,
                          const OptBudget& budget,
                          const Minimizer& method = default_minimizer());

}  // namespace qas
