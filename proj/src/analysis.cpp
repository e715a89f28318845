#include "qas/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "qas/error.hpp"
#include "qas/optimize.hpp"
#include "qas/persistence.hpp"
#include "qas/random.hpp"
#include "qas/search.hpp"

namespace qas {

double distance_to_cluster(const StateVector& s, const ClusterSet& c) {
  if (c.states.empty()) throw Error(Errc::empty_input, "cluster '" + c.label + "' is empty");
  double total = 0.0;
  for (const auto& member : c.states) total += 1.0 - fidelity(s, member);
  return std::clamp(total / static_cast<double>(c.states.size()), 0.0, 1.0);
}

std::size_t assign_cluster(const StateVector& s, std::span<const ClusterSet> clusters) {
  if (clusters.empty()) throw Error(Errc::empty_input, "no clusters to assign to");
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    const double d = distance_to_cluster(s, clusters[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double ConfusionMatrix::own_fraction(std::size_t i) const {
  const int total = std::accumulate(counts[i].begin(), counts[i].end(), 0);
  return total == 0 ? 0.0 : static_cast<double>(counts[i][i]) / total;
}

nlohmann::json ConfusionMatrix::to_json() const {
  std::vector<double> own(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) own[i] = own_fraction(i);
  return {{"labels", labels}, {"counts", counts}, {"own_fraction", own}};
}

ConfusionMatrix confusion_matrix(std::span<const ClusterSet> clusters,
                                 std::span<const LabelledState> queries) {
  ConfusionMatrix cm;
  for (const auto& c : clusters) cm.labels.push_back(c.label);
  cm.counts.assign(clusters.size(), std::vector<int>(clusters.size(), 0));
  for (const auto& q : queries) {
    if (q.truth >= clusters.size()) throw Error(Errc::index_out_of_range, "query label out of range");
    ++cm.counts[q.truth][assign_cluster(q.state, clusters)];
  }
  return cm;
}

ClusterSet build_cluster(std::string label, std::span<const Ansatz> ansatzes, const PauliSum& h,
                         int evals_per_param, std::uint64_t seed) {
  ClusterSet c{std::move(label), {}};
  for (std::size_t k = 0; k < ansatzes.size(); ++k) {
    const int m = count_params(ansatzes[k]);
    OptBudget budget{evals_per_param * std::max(1, m), 1e-6, derive_seed(seed, {k}), 1};
    const OptResult r = minimize_energy(ansatzes[k], h, ShotModel{}, budget);
    c.states.push_back(prepare_state(ansatzes[k], r.best_params));
  }
  return c;
}

nlohmann::json GateStats::to_json() const {
  return {{"ratios", ratios},
          {"params_mean", params_mean},
          {"params_std", params_std},
          {"individuals", individuals}};
}

GateStats gate_stats(std::span<const Ansatz> pop) {
  if (pop.empty()) throw Error(Errc::empty_input, "gate statistics of an empty population");
  GateStats st;
  st.individuals = pop.size();
  std::map<std::string, std::size_t> counts{{"Rx", 0}, {"Ry", 0}, {"Rz", 0}, {"H", 0}, {"CNOT", 0}};
  std::size_t active = 0;
  std::vector<double> params;
  for (const auto& a : pop) {
    for (GateCode c : a.cells()) {
      if (c == kCodeI) continue;
      ++active;
      ++counts[std::string(kind_name(kind_of(c)))];
    }
    params.push_back(count_params(a));
  }
  for (const auto& [name, count] : counts) {
    st.ratios[name] = active == 0 ? 0.0 : static_cast<double>(count) / static_cast<double>(active);
  }
  const double n = static_cast<double>(params.size());
  st.params_mean = std::accumulate(params.begin(), params.end(), 0.0) / n;
  double var = 0.0;
  for (double p : params) var += (p - st.params_mean) * (p - st.params_mean);
  st.params_std = std::sqrt(var / n);
  return st;
}

nlohmann::json BenchmarkResult::to_json() const {
  return {{"n", qubits},
          {"m", depth},
          {"count", count},
          {"pairs", pairs},
          {"folds", folds},
          {"eps", eps},
          {"model", "svm-rbf-ovo"},
          {"accuracy", accuracy},
          {"fold_accuracy", fold_accuracy},
          {"class_counts", class_counts},
          {"majority_baseline", majority_baseline}};
}

BenchmarkResult cross_validate(const TrainingSet& data, int folds, std::uint64_t seed,
                               const svm::Params& params) {
  if (folds < 2) throw Error(Errc::invalid_argument, "cross-validation needs at least 2 folds");
  const std::size_t total = data.pairs.size();
  if (total < static_cast<std::size_t>(folds)) {
    throw Error(Errc::degenerate_data, std::to_string(total) + " labelled pairs cannot fill " +
                                           std::to_string(folds) + " folds");
  }
  BenchmarkResult r;
  r.pairs = total;
  r.folds = folds;
  r.eps = data.eps;
  const svm::Matrix x = data.features();
  const std::vector<int> y = data.labels();
  for (int label : y) ++r.class_counts[static_cast<std::size_t>(label)];
  r.majority_baseline = static_cast<double>(*std::max_element(r.class_counts.begin(), r.class_counts.end())) /
                        static_cast<double>(total);

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_stream(seed, {0});
  std::shuffle(order.begin(), order.end(), rng);

  const Ansatz& shape = data.circuits.front().ansatz;
  std::size_t correct_total = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t p = 0; p < total; ++p) {
      (static_cast<int>(p % static_cast<std::size_t>(folds)) == f ? test : train).push_back(order[p]);
    }
    svm::Matrix xt(train.size(), x.cols);
    std::vector<int> yt(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      const auto src = x.row(train[i]);
      std::copy(src.begin(), src.end(), xt.row(i).begin());
      yt[i] = y[train[i]];
    }
    const ComparatorModel model = train_comparator(xt, yt, shape.qubits(), shape.depth(), params);
    std::size_t correct = 0;
    for (std::size_t i : test) {
      if (model.classifier().predict(x.row(i)) == y[i]) ++correct;
    }
    correct_total += correct;
    r.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  r.accuracy = static_cast<double>(correct_total) / static_cast<double>(total);
  return r;
}

BenchmarkResult surrogate_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.count < 2) throw Error(Errc::degenerate_data, "benchmark needs at least 2 circuits");
  if (cfg.depth < 1) throw Error(Errc::invalid_argument, "depth must be >= 1");
  if (cfg.evals_per_param < 1) throw Error(Errc::invalid_argument, "evals_per_param must be >= 1");
  const PauliSum h = build_hamiltonian(cfg.kind, cfg.qubits);
  const double eps = cfg.eps > 0.0 ? cfg.eps : 0.05 * spectral_span(h);

  const auto uniform = MultinomialModel::uniform(cfg.qubits, cfg.depth);
  std::set<Ansatz> seen;
  std::vector<Evaluated> circuits;
  for (int k = 0; k < cfg.count; ++k) {
    Rng rng = make_stream(cfg.seed, {1, static_cast<std::uint64_t>(k)});
    Ansatz a = postprocess(uniform.sample(rng));
    for (int attempt = 0; seen.contains(a) && attempt < 1000; ++attempt) {
      a = postprocess(uniform.sample(rng));
    }
    seen.insert(a);
    const int m = count_params(a);
    const OptBudget budget{cfg.evals_per_param * std::max(1, m), 1e-6,
                           derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(k)}), 1};
    const OptResult r = minimize_energy(a, h, ShotModel{}, budget);
    circuits.push_back({std::move(a), r.best_energy});
  }
  TrainingSet data = label_pairs(std::move(circuits), eps,
                                 std::numeric_limits<std::size_t>::max(), 0, cfg.seed);
  if (cfg.shuffle_labels) {
    std::vector<int> labels = data.labels();
    Rng rng = make_stream(cfg.seed, {3});
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < labels.size(); ++i) data.pairs[i].label = labels[i];
  }
  BenchmarkResult r = cross_validate(data, cfg.folds, derive_seed(cfg.seed, {4}));
  r.qubits = cfg.qubits;
  r.depth = cfg.depth;
  r.count = cfg.count;
  return r;
}

namespace {

std::string num(double x) { return nlohmann::json(x).dump(); }

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

void analyze_run(const std::filesystem::path& dir) {
  const nlohmann::json summary = read_json(dir / "summary.json");

  std::ostringstream pareto;
  pareto << "score,ic,energy,num_params,g,matrix\n";
  std::vector<Ansatz> front;
  for (const auto& item : summary.at("pareto_front")) {
    const Individual ind = individual_from_json(item);
    pareto << ind.score << ',' << num(ind.ic) << ','
           << (ind.energy ? num(*ind.energy) : std::string()) << ',' << count_params(ind.ansatz)
           << ',' << num(ind.g) << ',' << csv_quote(nlohmann::json(ind.ansatz.rows()).dump())
           << '\n';
    front.push_back(ind.ansatz);
  }
  write_text(dir / "pareto.csv", pareto.str());

  std::ostringstream conv;
  conv << "iter,elite_g,elite_energy,mean_ic,n_true_opts,uniform_fills\n";
  std::istringstream lines(read_text(dir / "iterations.jsonl"));
  for (std::string line; std::getline(lines, line);) {
    if (line.empty()) continue;
    const IterationLog log = iteration_log_from_json(nlohmann::json::parse(line));
    conv << log.iter << ',' << num(log.elite_g) << ','
         << (log.elite_energy ? num(*log.elite_energy) : std::string()) << ','
         << num(log.mean_ic) << ',' << log.n_true_opts << ',' << log.uniform_fills << '\n';
  }
  write_text(dir / "convergence.csv", conv.str());

  nlohmann::json stats = nlohmann::json::object();
  if (!front.empty()) stats["pareto_front"] = gate_stats(front).to_json();
  if (std::filesystem::exists(dir / "checkpoint.json")) {
    const SearchState state = search_state_from_json(read_json(dir / "checkpoint.json"));
    std::vector<Ansatz> archive, population;
    for (const auto& ind : state.archive) archive.push_back(ind.ansatz);
    for (const auto& ind : state.population) population.push_back(ind.ansatz);
    if (!archive.empty()) stats["archive"] = gate_stats(archive).to_json();
    if (!population.empty()) stats["final_population"] = gate_stats(population).to_json();
  }
  write_json(dir / "gate_stats.json", stats);
}

}  // namespace qas
