#include "qas/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

OptBudget OptBudget::defaults(int num_params, std::uint64_t seed, int restarts) {
  return {200 * std::max(1, num_params), 1e-6, seed, restarts};
}

LocalResult NelderMead::minimize(const Objective& f, std::vector<double> x0,
                                 int max_evals, double ftol) const {
  const std::size_t d = x0.size();
  LocalResult out;
  if (d == 0) {
    out.fx = f(x0);
    out.evals = 1;
    out.x = std::move(x0);
    return out;
  }
  const double dd = static_cast<double>(d);
  const double rho = 1.0;
  const double chi = 1.0 + 2.0 / dd;
  const double psi = 0.75 - 1.0 / (2.0 * dd);
  const double sigma = 1.0 - 1.0 / dd;

  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(d + 1, x0);
  std::vector<double> values(d + 1);
  for (std::size_t k = 0; k < d; ++k) simplex[k + 1][k] += initial_step_;
  for (std::size_t k = 0; k <= d && evals < max_evals; ++k) values[k] = eval(simplex[k]);
  if (evals < static_cast<int>(d + 1)) {
    // Budget smaller than the simplex: return the best evaluated vertex.
    const auto best = static_cast<std::size_t>(
        std::min_element(values.begin(), values.begin() + evals) - values.begin());
    return {simplex[best], values[best], evals};
  }

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), xr(d), xe(d), xc(d);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::vector<double>> s2(d + 1);
    std::vector<double> v2(d + 1);
    for (std::size_t k = 0; k <= d; ++k) {
      s2[k] = std::move(simplex[order[k]]);
      v2[k] = values[order[k]];
    }
    simplex = std::move(s2);
    values = std::move(v2);
  };

  sort_simplex();
  while (evals < max_evals && values[d] - values[0] > ftol) {
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < d; ++k) {
      for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[k][i];
    }
    for (double& c : centroid) c /= dd;
    const auto& worst = simplex[d];

    for (std::size_t i = 0; i < d; ++i) xr[i] = centroid[i] + rho * (centroid[i] - worst[i]);
    const double fr = eval(xr);
    bool shrink = false;
    if (fr < values[0]) {
      for (std::size_t i = 0; i < d; ++i) xe[i] = centroid[i] + chi * (xr[i] - centroid[i]);
      const double fe = evals < max_evals ? eval(xe) : fr;
      if (fe < fr) {
        simplex[d] = xe;
        values[d] = fe;
      } else {
        simplex[d] = xr;
        values[d] = fr;
      }
    } else if (fr < values[d - 1]) {
      simplex[d] = xr;
      values[d] = fr;
    } else if (evals >= max_evals) {
      break;
    } else if (fr < values[d]) {
      for (std::size_t i = 0; i < d; ++i) xc[i] = centroid[i] + psi * (xr[i] - centroid[i]);
      const double fc = eval(xc);
      if (fc <= fr) {
        simplex[d] = xc;
        values[d] = fc;
      } else {
        shrink = true;
      }
    } else {
      for (std::size_t i = 0; i < d; ++i) xc[i] = centroid[i] - psi * (centroid[i] - worst[i]);
      const double fc = eval(xc);
      if (fc < values[d]) {
        simplex[d] = xc;
        values[d] = fc;
      } else {
        shrink = true;
      }
    }
    if (shrink) {
      for (std::size_t k = 1; k <= d && evals < max_evals; ++k) {
        for (std::size_t i = 0; i < d; ++i) {
          simplex[k][i] = simplex[0][i] + sigma * (simplex[k][i] - simplex[0][i]);
        }
        values[k] = eval(simplex[k]);
      }
    }
    sort_simplex();
  }
  return {simplex[0], values[0], evals};
}

const Minimizer& default_minimizer() {
  static const NelderMead method;
  return method;
}

OptResult minimize_energy(const Ansatz& a, const PauliSum& h, const ShotModel& shots,
                          const OptBudget& budget, const Minimizer& method) {
  if (budget.max_evals < 1) throw Error(Errc::invalid_argument, "max_evals must be >= 1");
  if (!(budget.ftol > 0.0)) throw Error(Errc::invalid_argument, "ftol must be > 0");
  if (budget.restarts < 1) throw Error(Errc::invalid_argument, "restarts must be >= 1");

  const CompiledCircuit circuit(a);
  const int num_params = circuit.num_params();
  if (num_params == 0) {
    return {{}, expectation(circuit.run({}), h), 1};
  }

  OptResult best;
  bool have_best = false;
  for (int r = 0; r < budget.restarts; ++r) {
    Rng rng = make_stream(budget.seed, {static_cast<std::uint64_t>(r)});
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    std::vector<double> x0(static_cast<std::size_t>(num_params));
    for (double& x : x0) x = angle(rng);

    std::uint64_t call = 0;
    const Objective objective = [&](std::span<const double> x) {
      return expectation_noisy(circuit.run(x), h, shots,
                               derive_seed(static_cast<std::uint64_t>(r), {call++}));
    };
    LocalResult local = method.minimize(objective, std::move(x0), budget.max_evals, budget.ftol);
    best.evals_used += local.evals;

    for (double& x : local.x) {
      x = std::fmod(x, 2.0 * std::numbers::pi);
      if (x < 0.0) x += 2.0 * std::numbers::pi;
    }
    const double exact = expectation(circuit.run(local.x), h);
    if (!have_best || exact < best.best_energy) {
      best.best_energy = exact;
      best.best_params = std::move(local.x);
      have_best = true;
    }
  }
  return best;
}

}  // namespace qas
