#include "qas/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "qas/error.hpp"
#include "qas/hamiltonians.hpp"

namespace qas {
namespace {

// Substream tags.
enum : std::uint64_t { kInit = 1, kSample, kOpt, kShots, kIc, kIcShots, kRefit };

constexpr int kUniformTries = 1000;

double unit_draw(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<bool> enabled_mask(int qubits, std::span<const GateCode> disabled) {
  std::vector<bool> on(static_cast<std::size_t>(code_count(qubits)), true);
  for (GateCode c : disabled) {
    if (c < 0 || c >= code_count(qubits)) {
      throw Error(Errc::invalid_argument, "disabled code " + std::to_string(c) + " out of range");
    }
    on[c] = false;
  }
  if (std::none_of(on.begin(), on.end(), [](bool b) { return b; })) {
    throw Error(Errc::invalid_argument, "every gate code is disabled");
  }
  return on;
}

nlohmann::json matrix_json(const Ansatz& a) { return a.rows(); }

Ansatz matrix_from_json(const nlohmann::json& j) {
  return Ansatz::from_rows(j.get<std::vector<std::vector<GateCode>>>());
}

}  // namespace

MultinomialModel MultinomialModel::uniform(int qubits, int depth, std::span<const GateCode> disabled) {
  const auto on = enabled_mask(qubits, disabled);
  const int k = code_count(qubits);
  const double p = 1.0 / static_cast<double>(std::count(on.begin(), on.end(), true));
  std::vector<double> probs(static_cast<std::size_t>(qubits) * depth * k);
  for (std::size_t cell = 0; cell < probs.size() / k; ++cell) {
    for (int c = 0; c < k; ++c) probs[cell * k + c] = on[c] ? p : 0.0;
  }
  return from_probs(qubits, depth, std::move(probs));
}

MultinomialModel MultinomialModel::from_probs(int qubits, int depth, std::vector<double> probs) {
  if (qubits < 1 || depth < 1) throw Error(Errc::invalid_argument, "model shape must be positive");
  const int k = code_count(qubits);
  const std::size_t cells = static_cast<std::size_t>(qubits) * depth;
  if (probs.size() != cells * k) {
    throw Error(Errc::dimension_mismatch, "probability table has the wrong size");
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      const double p = probs[cell * k + c];
      if (!(p >= 0.0)) throw Error(Errc::invalid_argument, "negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(Errc::invalid_argument, "cell probabilities do not sum to 1");
    }
  }
  MultinomialModel m;
  m.qubits_ = qubits;
  m.depth_ = depth;
  m.probs_ = std::move(probs);
  return m;
}

Ansatz MultinomialModel::sample(Rng& rng) const {
  const int k = codes();
  std::vector<GateCode> cells(static_cast<std::size_t>(qubits_) * depth_);
  for (std::size_t cell = 0; cell < cells.size(); ++cell) {
    const double u = unit_draw(rng);
    double acc = 0.0;
    GateCode chosen = -1;
    for (int c = 0; c < k; ++c) {
      const double p = probs_[cell * k + c];
      if (p <= 0.0) continue;
      acc += p;
      chosen = c;
      if (u < acc) break;
    }
    cells[cell] = chosen;
  }
  return Ansatz(qubits_, depth_, std::move(cells));
}

nlohmann::json MultinomialModel::to_json() const {
  return {{"n", qubits_}, {"m", depth_}, {"codes", codes()}, {"probs", probs_}};
}

double probability_floor(int qubits, std::span<const GateCode> disabled) {
  const auto on = enabled_mask(qubits, disabled);
  return 1.0 / (10.0 * static_cast<double>(std::count(on.begin(), on.end(), true)));
}

std::vector<double> empirical_frequencies(std::span<const Ansatz> selected) {
  if (selected.empty()) throw Error(Errc::empty_input, "empty selection");
  const int n = selected.front().qubits();
  const int m = selected.front().depth();
  const int k = code_count(n);
  std::vector<double> freq(static_cast<std::size_t>(n) * m * k, 0.0);
  for (const auto& a : selected) {
    if (a.qubits() != n || a.depth() != m) {
      throw Error(Errc::shape_mismatch, "selected ansatzes differ in shape");
    }
    const auto cells = a.cells();
    for (std::size_t cell = 0; cell < cells.size(); ++cell) freq[cell * k + cells[cell]] += 1.0;
  }
  for (double& f : freq) f /= static_cast<double>(selected.size());
  return freq;
}

MultinomialModel fit_model(std::span<const Ansatz> selected, std::span<const GateCode> disabled) {
  auto freq = empirical_frequencies(selected);
  const int n = selected.front().qubits();
  const int m = selected.front().depth();
  const int k = code_count(n);
  const auto on = enabled_mask(n, disabled);
  const double enabled = static_cast<double>(std::count(on.begin(), on.end(), true));
  for (std::size_t cell = 0; cell < freq.size() / k; ++cell) {
    double mass = 0.0;  // frequency on enabled codes
    for (int c = 0; c < k; ++c) {
      if (on[c]) mass += freq[cell * k + c];
    }
    for (int c = 0; c < k; ++c) {
      double& p = freq[cell * k + c];
      if (!on[c]) {
        p = 0.0;
      } else {
        const double f = mass > 0.0 ? p / mass : 1.0 / enabled;
        p = 0.9 * f + 0.1 / enabled;
      }
    }
  }
  return MultinomialModel::from_probs(n, m, std::move(freq));
}

nlohmann::json to_json(const Individual& ind) {
  nlohmann::json j{{"n", ind.ansatz.qubits()},
                   {"m", ind.ansatz.depth()},
                   {"matrix", matrix_json(ind.ansatz)},
                   {"params", ind.params},
                   {"ic", ind.ic},
                   {"score", ind.score},
                   {"g", ind.g},
                   {"born", ind.born},
                   {"optimized", ind.optimized}};
  j["energy"] = ind.energy ? nlohmann::json(*ind.energy) : nlohmann::json(nullptr);
  return j;
}

Individual individual_from_json(const nlohmann::json& j) {
  try {
    Individual ind;
    ind.ansatz = Ansatz(j.at("n").get<int>(), j.at("m").get<int>());
    const auto rows = j.at("matrix").get<std::vector<std::vector<GateCode>>>();
    if (!rows.empty()) ind.ansatz = Ansatz::from_rows(rows);
    if (!j.at("energy").is_null()) ind.energy = j.at("energy").get<double>();
    ind.params = j.at("params").get<ParamVector>();
    ind.ic = j.at("ic").get<double>();
    ind.score = j.at("score").get<int>();
    ind.g = j.at("g").get<double>();
    ind.born = j.at("born").get<int>();
    ind.optimized = j.at("optimized").get<bool>();
    return ind;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad individual JSON: ") + e.what());
  }
}

double g_value(double score, double ic, RefPoint r) {
  const double s = std::clamp(score, 0.0, r.score);
  const double c = std::clamp(ic, 0.0, r.ic);
  return (r.score - s) * (r.ic - c);
}

bool ranks_before(const Individual& a, const Individual& b) {
  if (a.g != b.g) return a.g < b.g;
  if (a.ic != b.ic) return a.ic > b.ic;
  if (a.born != b.born) return a.born < b.born;
  return a.ansatz < b.ansatz;
}

Selection rank_and_truncate(std::vector<Individual> pop, double alpha, RefPoint r) {
  const auto keep = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(pop.size())));
  if (keep == 0) throw Error(Errc::invalid_argument, "selection size floor(alpha N) is 0");
  for (auto& ind : pop) ind.g = g_value(ind.score, ind.ic, r);
  std::sort(pop.begin(), pop.end(), ranks_before);
  Selection s;
  s.selected.assign(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(keep));
  s.elite = pop.front();
  s.ranked = std::move(pop);
  return s;
}

std::vector<std::size_t> pareto_front(std::span<const std::pair<double, double>> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].first != points[b].first) return points[a].first > points[b].first;
    if (points[a].second != points[b].second) return points[a].second > points[b].second;
    return a < b;
  });
  std::vector<std::size_t> front;
  double best_ic = -std::numeric_limits<double>::infinity();  // over strictly higher scores
  for (std::size_t g = 0; g < order.size();) {
    std::size_t end = g;
    while (end < order.size() && points[order[end]].first == points[order[g]].first) ++end;
    const double group_max = points[order[g]].second;
    if (group_max > best_ic) {
      for (std::size_t k = g; k < end && points[order[k]].second == group_max; ++k) {
        front.push_back(order[k]);
      }
      best_ic = group_max;
    }
    g = end;
  }
  std::sort(front.begin(), front.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].first != points[b].first) return points[a].first < points[b].first;
    return a < b;
  });
  return front;
}

std::vector<std::size_t> pareto_front(std::span<const Individual> pop) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(pop.size());
  for (const auto& ind : pop) pts.emplace_back(ind.score, ind.ic);
  return pareto_front(std::span<const std::pair<double, double>>(pts));
}

void SearchConfig::validate() const {
  auto fail = [](const std::string& msg) { throw Error(Errc::config_error, msg); };
  if (qubits < 1) fail("qubits must be >= 1");
  if (depth < 1) fail("depth must be >= 1");
  if (population < 1) fail("population must be >= 1");
  if (iterations < 0) fail("iterations must be >= 0");
  if (!(alpha > 0.0 && alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (std::floor(alpha * population) < 1) fail("floor(alpha * population) must be >= 1");
  if (!(ref_ic > 0.0)) fail("ref_ic must be > 0");
  if (top_k < 1 || top_k > population) fail("top_k must lie in [1, population]");
  if (stall_limit < 1) fail("stall_limit must be >= 1");
  if (retry_cap < 0) fail("retry_cap must be >= 0");
  if (!(walk_step > 0.0)) fail("walk_step must be > 0");
  if (opt_evals_per_param < 1) fail("opt_evals_per_param must be >= 1");
  if (!(opt_ftol > 0.0)) fail("opt_ftol must be > 0");
  if (opt_restarts < 1) fail("opt_restarts must be >= 1");
  if (pair_cap < 1) fail("pair_cap must be >= 1");
  try {
    enabled_mask(qubits, disabled_codes);
  } catch (const Error& e) {
    fail(e.what());
  }
  for (const auto& a : initial) {
    if (a.qubits() != qubits) fail("seed population has the wrong qubit count");
    if (a.depth() > depth) fail("seed population is deeper than depth");
  }
}

nlohmann::json to_json(const SearchConfig& c) {
  return {{"qubits", c.qubits},
          {"depth", c.depth},
          {"population", c.population},
          {"iterations", c.iterations},
          {"alpha", c.alpha},
          {"ref_ic", c.ref_ic},
          {"top_k", c.top_k},
          {"stall_limit", c.stall_limit},
          {"retry_cap", c.retry_cap},
          {"eps", c.eps},
          {"seed", c.seed},
          {"shots", c.shots},
          {"ic_exact", c.ic_exact},
          {"walk_step", c.walk_step},
          {"opt_evals_per_param", c.opt_evals_per_param},
          {"opt_ftol", c.opt_ftol},
          {"opt_restarts", c.opt_restarts},
          {"pair_cap", c.pair_cap},
          {"disabled_codes", c.disabled_codes}};
}

SearchConfig search_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(Errc::config_error, "search config must be a JSON object");
  SearchConfig c;
  const nlohmann::json defaults = to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw Error(Errc::config_error, "unknown config key '" + key + "'");
  }
  try {
    auto read = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j.at(key).get<std::remove_reference_t<decltype(field)>>();
    };
    read("qubits", c.qubits);
    read("depth", c.depth);
    read("population", c.population);
    read("iterations", c.iterations);
    read("alpha", c.alpha);
    read("ref_ic", c.ref_ic);
    read("top_k", c.top_k);
    read("stall_limit", c.stall_limit);
    read("retry_cap", c.retry_cap);
    read("eps", c.eps);
    read("seed", c.seed);
    read("shots", c.shots);
    read("ic_exact", c.ic_exact);
    read("walk_step", c.walk_step);
    read("opt_evals_per_param", c.opt_evals_per_param);
    read("opt_ftol", c.opt_ftol);
    read("opt_restarts", c.opt_restarts);
    read("pair_cap", c.pair_cap);
    read("disabled_codes", c.disabled_codes);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("bad config value: ") + e.what());
  }
  return c;
}

namespace {

// Draws until a matrix not in `seen` turns up: model draws first, then
// uniform ones. Falls back to a duplicate when the space looks exhausted.
Ansatz draw_distinct(const MultinomialModel& model, const MultinomialModel& uniform, Rng& rng,
                     const std::set<Ansatz>& seen, int retry_cap, SampleStats* stats) {
  for (int attempt = 0; attempt <= retry_cap; ++attempt) {
    Ansatz a = postprocess(model.sample(rng));
    if (!seen.contains(a)) return a;
  }
  if (stats) ++stats->uniform_fills;
  Ansatz a;
  for (int attempt = 0; attempt < kUniformTries; ++attempt) {
    a = postprocess(uniform.sample(rng));
    if (!seen.contains(a)) return a;
  }
  if (stats) ++stats->duplicates;
  return a;
}

}  // namespace

std::vector<Individual> init_population(const SearchConfig& cfg) {
  cfg.validate();
  const auto uniform = MultinomialModel::uniform(cfg.qubits, cfg.depth, cfg.disabled_codes);
  std::vector<Individual> pop;
  std::set<Ansatz> seen;
  for (const auto& seed_ansatz : cfg.initial) {
    if (static_cast<int>(pop.size()) == cfg.population) break;
    Ansatz a = postprocess(seed_ansatz.padded_to(cfg.depth));
    if (!seen.insert(a).second) continue;
    Individual ind;
    ind.ansatz = std::move(a);
    pop.push_back(std::move(ind));
  }
  for (int slot = static_cast<int>(pop.size()); slot < cfg.population; ++slot) {
    Rng rng = make_stream(cfg.seed, {kInit, static_cast<std::uint64_t>(slot)});
    Individual ind;
    ind.ansatz = draw_distinct(uniform, uniform, rng, seen, 0, nullptr);
    seen.insert(ind.ansatz);
    pop.push_back(std::move(ind));
  }
  return pop;
}

std::vector<Individual> sample_population(const MultinomialModel& model, int size,
                                          const std::optional<Individual>& elite,
                                          std::uint64_t seed, int iteration, int retry_cap,
                                          std::span<const GateCode> disabled,
                                          SampleStats* stats) {
  if (size < 1) throw Error(Errc::invalid_argument, "population size must be >= 1");
  const auto uniform = MultinomialModel::uniform(model.qubits(), model.depth(), disabled);
  std::vector<Individual> pop;
  std::set<Ansatz> seen;
  if (elite) {
    pop.push_back(*elite);
    seen.insert(elite->ansatz);
  }
  for (int slot = static_cast<int>(pop.size()); slot < size; ++slot) {
    Rng rng = make_stream(seed, {kSample, static_cast<std::uint64_t>(iteration),
                                 static_cast<std::uint64_t>(slot)});
    Individual ind;
    ind.ansatz = draw_distinct(model, uniform, rng, seen, retry_cap, stats);
    ind.born = iteration;
    seen.insert(ind.ansatz);
    pop.push_back(std::move(ind));
  }
  return pop;
}

nlohmann::json to_json(const IterationLog& log) {
  nlohmann::json pareto = nlohmann::json::array();
  for (const auto& p : log.pareto) {
    pareto.push_back({{"score", p.score}, {"ic", p.ic}, {"matrix", matrix_json(p.ansatz)}});
  }
  nlohmann::json j{{"iter", log.iter},
                   {"elite_g", log.elite_g},
                   {"elite_matrix", matrix_json(log.elite_ansatz)},
                   {"mean_ic", log.mean_ic},
                   {"n_true_opts", log.n_true_opts},
                   {"uniform_fills", log.uniform_fills},
                   {"pareto", pareto}};
  j["elite_energy"] = log.elite_energy ? nlohmann::json(*log.elite_energy) : nlohmann::json(nullptr);
  return j;
}

IterationLog iteration_log_from_json(const nlohmann::json& j) {
  try {
    IterationLog log;
    log.iter = j.at("iter").get<int>();
    log.elite_g = j.at("elite_g").get<double>();
    if (!j.at("elite_energy").is_null()) log.elite_energy = j.at("elite_energy").get<double>();
    log.elite_ansatz = matrix_from_json(j.at("elite_matrix"));
    log.mean_ic = j.at("mean_ic").get<double>();
    log.n_true_opts = j.at("n_true_opts").get<long>();
    log.uniform_fills = j.at("uniform_fills").get<int>();
    for (const auto& p : j.at("pareto")) {
      log.pareto.push_back(
          {p.at("score").get<double>(), p.at("ic").get<double>(), matrix_from_json(p.at("matrix"))});
    }
    return log;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad iteration log JSON: ") + e.what());
  }
}

nlohmann::json to_json(const SearchState& s) {
  nlohmann::json pop = nlohmann::json::array();
  for (const auto& ind : s.population) pop.push_back(to_json(ind));
  nlohmann::json archive = nlohmann::json::array();
  for (const auto& ind : s.archive) archive.push_back(to_json(ind));
  nlohmann::json log = nlohmann::json::array();
  for (const auto& l : s.log) log.push_back(to_json(l));
  return {{"iteration", s.iteration},
          {"eps", s.eps},
          {"population", pop},
          {"archive", archive},
          {"model", s.model ? s.model->to_json() : nlohmann::json(nullptr)},
          {"elite", s.elite ? to_json(*s.elite) : nlohmann::json(nullptr)},
          {"stall", s.stall},
          {"true_opts", s.true_opts},
          {"log", log},
          {"stop_reason", s.stop_reason}};
}

SearchState search_state_from_json(const nlohmann::json& j) {
  try {
    SearchState s;
    s.iteration = j.at("iteration").get<int>();
    s.eps = j.at("eps").get<double>();
    for (const auto& ind : j.at("population")) s.population.push_back(individual_from_json(ind));
    for (const auto& ind : j.at("archive")) s.archive.push_back(individual_from_json(ind));
    if (!j.at("model").is_null()) s.model = ComparatorModel::from_json(j.at("model"));
    if (!j.at("elite").is_null()) s.elite = individual_from_json(j.at("elite"));
    s.stall = j.at("stall").get<int>();
    s.true_opts = j.at("true_opts").get<long>();
    for (const auto& l : j.at("log")) s.log.push_back(iteration_log_from_json(l));
    s.stop_reason = j.at("stop_reason").get<std::string>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad checkpoint JSON: ") + e.what());
  }
}

nlohmann::json summary_json(const RunRecord& r) {
  nlohmann::json front = nlohmann::json::array();
  for (std::size_t i : r.pareto) front.push_back(to_json(r.archive[i]));
  nlohmann::json j{{"iterations", r.iterations.size()},
                   {"n_true_opts", r.true_opts},
                   {"eps", r.eps},
                   {"stop_reason", r.stop_reason},
                   {"archive_size", r.archive.size()},
                   {"pareto_front", front}};
  if (!r.archive.empty()) {
    j["best"] = to_json(r.archive[r.best]);
    j["lowest_energy"] = to_json(r.archive[r.lowest]);
  } else {
    j["best"] = nullptr;
    j["lowest_energy"] = nullptr;
  }
  return j;
}

Search::Search(SearchConfig cfg, PauliSum h, OptimizeFn optimize)
    : cfg_(std::move(cfg)), h_(std::move(h)), optimize_(std::move(optimize)) {
  cfg_.validate();
  if (h_.qubits() != cfg_.qubits) {
    throw Error(Errc::dimension_mismatch, "Hamiltonian qubit count differs from the config");
  }
  if (!optimize_) {
    optimize_ = [](const Ansatz& a, const PauliSum& h, const ShotModel& sm, const OptBudget& b) {
      return minimize_energy(a, h, sm, b);
    };
  }
}

const ICResult& Search::ic_of(const Ansatz& a) {
  auto it = ic_cache_.find(a);
  if (it != ic_cache_.end()) return it->second;
  const std::uint64_t fp = a.fingerprint();
  const int m = count_params(a);
  WalkConfig walk = WalkConfig::defaults(m, derive_seed(cfg_.seed, {kIc, fp}));
  walk.step_scale = cfg_.walk_step;
  const ShotModel sm = cfg_.ic_exact ? ShotModel{0, 0}
                                     : ShotModel{cfg_.shots, derive_seed(cfg_.seed, {kIcShots, fp})};
  return ic_cache_.emplace(a, information_content(a, h_, walk, sm)).first->second;
}

void Search::add_to_archive(const Individual& ind) {
  for (auto& entry : state_.archive) {
    if (entry.ansatz == ind.ansatz) {
      if (*ind.energy < *entry.energy) {
        entry.energy = ind.energy;
        entry.params = ind.params;
      }
      return;
    }
  }
  state_.archive.push_back(ind);
}

Individual& Search::optimize(Individual& ind) {
  const auto call = static_cast<std::uint64_t>(state_.true_opts);
  OptBudget budget = OptBudget::defaults(count_params(ind.ansatz),
                                         derive_seed(cfg_.seed, {kOpt, call}), cfg_.opt_restarts);
  budget.max_evals = cfg_.opt_evals_per_param * std::max(1, count_params(ind.ansatz));
  budget.ftol = cfg_.opt_ftol;
  const ShotModel sm{cfg_.shots, derive_seed(cfg_.seed, {kShots, call})};
  OptResult res = optimize_(ind.ansatz, h_, sm, budget);
  ++state_.true_opts;
  if (!ind.energy || res.best_energy < *ind.energy) {
    ind.energy = res.best_energy;
    ind.params = std::move(res.best_params);
  }
  ind.optimized = true;
  ind.ic = ic_of(ind.ansatz).metric;
  add_to_archive(ind);
  return ind;
}

namespace {

std::vector<Evaluated> evaluated(std::span<const Individual> inds) {
  std::vector<Evaluated> out;
  out.reserve(inds.size());
  for (const auto& ind : inds) out.push_back({ind.ansatz, *ind.energy});
  return out;
}

}  // namespace

void Search::initialize() {
  state_ = SearchState{};
  state_.eps = cfg_.eps > 0.0 ? cfg_.eps : 0.05 * spectral_span(h_);
  state_.population = init_population(cfg_);
  for (auto& ind : state_.population) optimize(ind);
  const auto archive = evaluated(state_.archive);
  const auto training = label_pairs(archive, state_.eps, cfg_.pair_cap, 0,
                                    derive_seed(cfg_.seed, {kRefit, 0}));
  if (!training.pairs.empty()) state_.model = train_comparator(training);
  if (cfg_.iterations == 0) state_.stop_reason = "t_max";
}

void Search::restore(SearchState state) {
  state_ = std::move(state);
  // A run cut short by a smaller iteration limit continues under the new one.
  if (state_.stop_reason == "t_max" && state_.iteration < cfg_.iterations) state_.stop_reason.clear();
  ic_cache_.clear();
}

bool Search::step() {
  if (finished()) return false;
  const int t = state_.iteration + 1;
  const std::size_t n = state_.population.size();

  std::vector<Ansatz> shapes;
  shapes.reserve(n);
  for (auto& ind : state_.population) {
    ind.ic = ic_of(ind.ansatz).metric;
    shapes.push_back(ind.ansatz);
  }
  std::vector<ComparisonLabel> table(n * n, 2);
  if (state_.model) table = state_.model->predict_all(shapes);
  const auto s = scores_from_table(n, table);
  for (std::size_t i = 0; i < n; ++i) state_.population[i].score = s[i];

  Selection sel = rank_and_truncate(state_.population, cfg_.alpha, cfg_.ref());

  const bool replaced = !state_.elite || sel.ranked.front().g < state_.elite->g;
  state_.stall = replaced ? 0 : state_.stall + 1;

  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(cfg_.top_k), n);
  std::vector<Individual> top;
  for (std::size_t i = 0; i < k; ++i) top.push_back(optimize(sel.ranked[i]));

  if (replaced) {
    state_.elite = sel.ranked.front();
  }
  for (const auto& entry : state_.archive) {
    if (entry.ansatz == state_.elite->ansatz) {
      state_.elite->energy = entry.energy;
      state_.elite->params = entry.params;
      state_.elite->optimized = true;
    }
  }

  const auto refit_result = refit(evaluated(state_.archive), evaluated(top), state_.eps,
                                  cfg_.pair_cap, derive_seed(cfg_.seed, {kRefit, static_cast<std::uint64_t>(t)}));
  state_.model = refit_result.model;

  std::vector<Ansatz> chosen;
  for (const auto& ind : sel.selected) chosen.push_back(ind.ansatz);
  const MultinomialModel model = fit_model(chosen, cfg_.disabled_codes);
  SampleStats stats;
  auto next = sample_population(model, cfg_.population, state_.elite, cfg_.seed, t,
                                cfg_.retry_cap, cfg_.disabled_codes, &stats);

  IterationLog log;
  log.iter = t;
  log.elite_g = state_.elite->g;
  log.elite_energy = state_.elite->energy;
  log.elite_ansatz = state_.elite->ansatz;
  double ic_sum = 0.0;
  for (const auto& ind : sel.ranked) ic_sum += ind.ic;
  log.mean_ic = ic_sum / static_cast<double>(n);
  log.n_true_opts = state_.true_opts;
  log.uniform_fills = stats.uniform_fills;
  for (std::size_t i : pareto_front(std::span<const Individual>(sel.ranked))) {
    log.pareto.push_back({static_cast<double>(sel.ranked[i].score), sel.ranked[i].ic,
                          sel.ranked[i].ansatz});
  }
  state_.log.push_back(std::move(log));

  state_.population = std::move(next);
  state_.iteration = t;
  if (t >= cfg_.iterations) {
    state_.stop_reason = "t_max";
  } else if (state_.stall >= cfg_.stall_limit) {
    state_.stop_reason = "stall";
  }
  return !finished();
}

RunRecord Search::record() const {
  RunRecord r;
  r.iterations = state_.log;
  r.archive = state_.archive;
  r.true_opts = state_.true_opts;
  r.eps = state_.eps;
  r.stop_reason = state_.stop_reason;
  const std::size_t k = r.archive.size();
  if (k == 0) return r;
  const auto true_h = [&](std::size_t i, std::size_t j) {
    return true_compare(performance(*r.archive[i].energy), performance(*r.archive[j].energy),
                        state_.eps);
  };
  const auto s = scores(k, true_h);
  const RefPoint ref{2.0 * static_cast<double>(k - 1), cfg_.ref_ic};
  for (std::size_t i = 0; i < k; ++i) {
    r.archive[i].score = s[i];
    r.archive[i].g = g_value(s[i], r.archive[i].ic, ref);
  }
  r.pareto = pareto_front(std::span<const Individual>(r.archive));
  for (std::size_t i = 1; i < k; ++i) {
    if (ranks_before(r.archive[i], r.archive[r.best])) r.best = i;
    if (*r.archive[i].energy < *r.archive[r.lowest].energy) r.lowest = i;
  }
  return r;
}

RunRecord run_search(const SearchConfig& cfg, const PauliSum& h,
                     const std::function<bool(const SearchState&)>& on_iteration,
                     const OptimizeFn& optimize) {
  Search search(cfg, h, optimize);
  search.initialize();
  bool go = !on_iteration || on_iteration(search.state());
  while (go && !search.finished()) {
    search.step();
    go = !on_iteration || on_iteration(search.state());
  }
  return search.record();
}

}  // namespace qas
