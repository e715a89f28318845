#include "qas/surrogate.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numeric>

#include "qas/error.hpp"
#include "qas/random.hpp"

namespace qas {

ComparisonLabel true_compare(double perf_a, double perf_b, double eps) {
  if (perf_b >= perf_a + eps) return 0;
  if (perf_a >= perf_b + eps) return 1;
  return 2;
}

int score(std::size_t index, std::size_t size, const PairComparator& h) {
  if (size == 0) return 0;
  if (index >= size) throw Error(Errc::index_out_of_range, "score index outside population");
  int total = 0;
  for (std::size_t j = 0; j < size; ++j) {
    if (j == index) continue;
    total += h(index, j) + 1 - h(j, index);
  }
  return total;
}

std::vector<int> scores(std::size_t size, const PairComparator& h) {
  std::vector<int> out(size);
  for (std::size_t i = 0; i < size; ++i) out[i] = score(i, size, h);
  return out;
}

std::vector<int> scores_from_table(std::size_t size, std::span<const ComparisonLabel> labels) {
  if (labels.size() != size * size) {
    throw Error(Errc::dimension_mismatch, "label table is not size x size");
  }
  return scores(size, [&](std::size_t i, std::size_t j) { return labels[i * size + j]; });
}

std::vector<double> pair_feature(const Ansatz& a, const Ansatz& b) {
  if (a.qubits() != b.qubits() || a.depth() != b.depth()) {
    throw Error(Errc::shape_mismatch, "pair feature needs equally shaped ansatzes");
  }
  const auto ca = a.cells();
  const auto cb = b.cells();
  const std::size_t len = ca.size();
  std::vector<double> f(2 * len);
  for (std::size_t k = 0; k < len; ++k) {
    f[k] = ca[k] + cb[k];
    f[len + k] = ca[k] - cb[k];
  }
  return f;
}

svm::Matrix TrainingSet::features() const {
  if (circuits.empty()) return {};
  const std::size_t dim = 2 * circuits.front().ansatz.cells().size();
  svm::Matrix x(pairs.size(), dim);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto f = pair_feature(circuits[pairs[i].a].ansatz, circuits[pairs[i].b].ansatz);
    std::copy(f.begin(), f.end(), x.row(i).begin());
  }
  return x;
}

std::vector<int> TrainingSet::labels() const {
  std::vector<int> y(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) y[i] = pairs[i].label;
  return y;
}

std::uint64_t TrainingSet::fingerprint() const {
  const svm::Matrix x = features();
  const std::vector<int> y = labels();
  const std::uint64_t h = fnv1a(x.data.data(), x.data.size() * sizeof(double));
  return fnv1a(y.data(), y.size() * sizeof(int), h);
}

TrainingSet label_pairs(std::vector<Evaluated> circuits, double eps, std::size_t cap,
                        std::size_t priority, std::uint64_t seed) {
  if (!(eps >= 0.0)) throw Error(Errc::invalid_argument, "tolerance must be >= 0");
  TrainingSet ts;
  ts.eps = eps;
  ts.circuits = std::move(circuits);
  std::vector<PairSample> first;
  std::vector<PairSample> rest;
  const std::size_t n = ts.circuits.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (ts.circuits[i].ansatz == ts.circuits[j].ansatz) continue;
      const PairSample p{i, j,
                         true_compare(performance(ts.circuits[i].energy),
                                      performance(ts.circuits[j].energy), eps)};
      (i < priority ? first : rest).push_back(p);
    }
  }
  if (first.size() > cap) {
    Rng rng = make_stream(seed, {0});
    std::shuffle(first.begin(), first.end(), rng);
    first.resize(cap);
    rest.clear();
  } else if (first.size() + rest.size() > cap) {
    Rng rng = make_stream(seed, {1});
    std::shuffle(rest.begin(), rest.end(), rng);
    rest.resize(cap - first.size());
  }
  ts.pairs = std::move(first);
  ts.pairs.insert(ts.pairs.end(), rest.begin(), rest.end());
  std::sort(ts.pairs.begin(), ts.pairs.end(), [](const PairSample& x, const PairSample& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return ts;
}

void ComparatorModel::check_shape(const Ansatz& a) const {
  if (a.qubits() != qubits_ || a.depth() != depth_) {
    throw Error(Errc::shape_mismatch, "ansatz shape " + std::to_string(a.qubits()) + "x" +
                                          std::to_string(a.depth()) +
                                          " differs from the training shape " +
                                          std::to_string(qubits_) + "x" + std::to_string(depth_));
  }
}

ComparisonLabel ComparatorModel::predict(const Ansatz& a, const Ansatz& b) const {
  check_shape(a);
  check_shape(b);
  return classifier_.predict(pair_feature(a, b));
}

std::vector<ComparisonLabel> ComparatorModel::predict_all(std::span<const Ansatz> pop) const {
  const std::size_t n = pop.size();
  std::vector<ComparisonLabel> out(n * n, 2);
  for (const auto& a : pop) check_shape(a);
  if (n < 2) return out;
  if (classifier_.is_constant()) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) out[i * n + j] = classifier_.classes().front();
      }
    }
    return out;
  }

  // With z = (f - mu) * rho and support vector s,
  //   |z - s|^2 = sum rho^2 f^2 - 2 sum w f + sum c^2,  c = rho mu + s,  w = rho c.
  // The middle term splits into u_s . a + v_s . b for f = (a + b, a - b).
  const auto& st = classifier_.standardizer();
  const auto& sv = classifier_.support();
  const std::size_t len = pop.front().cells().size();
  const std::size_t ns = sv.rows;
  std::vector<double> u(ns * len), v(ns * len), c2(ns, 0.0);
  for (std::size_t s = 0; s < ns; ++s) {
    const auto srow = sv.row(s);
    for (std::size_t k = 0; k < len; ++k) {
      const double c1 = st.inv_scale[k] * st.mean[k] + srow[k];
      const double cd = st.inv_scale[len + k] * st.mean[len + k] + srow[len + k];
      const double w1 = st.inv_scale[k] * c1;
      const double wd = st.inv_scale[len + k] * cd;
      u[s * len + k] = w1 + wd;
      v[s * len + k] = w1 - wd;
      c2[s] += c1 * c1 + cd * cd;
    }
  }
  std::vector<double> pu(n * ns), pv(n * ns);
  for (std::size_t i = 0; i < n; ++i) {
    const auto cells = pop[i].cells();
    for (std::size_t s = 0; s < ns; ++s) {
      double du = 0.0, dv = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        du += u[s * len + k] * cells[k];
        dv += v[s * len + k] * cells[k];
      }
      pu[i * ns + s] = du;
      pv[i * ns + s] = dv;
    }
  }
  std::vector<double> d2(ns);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ca = pop[i].cells();
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto cb = pop[j].cells();
      double quad = 0.0;
      for (std::size_t k = 0; k < len; ++k) {
        const double sum = (ca[k] + cb[k]) * st.inv_scale[k];
        const double dif = (ca[k] - cb[k]) * st.inv_scale[len + k];
        quad += sum * sum + dif * dif;
      }
      for (std::size_t s = 0; s < ns; ++s) {
        d2[s] = quad - 2.0 * (pu[i * ns + s] + pv[j * ns + s]) + c2[s];
      }
      out[i * n + j] = classifier_.predict_from_sq_distances(d2);
    }
  }
  return out;
}

nlohmann::json ComparatorModel::to_json() const {
  return {{"n", qubits_},
          {"m", depth_},
          {"training_fingerprint", fingerprint_},
          {"training_size", training_size_},
          {"classifier", classifier_.to_json()}};
}

ComparatorModel ComparatorModel::from_json(const nlohmann::json& j) {
  try {
    ComparatorModel m;
    m.qubits_ = j.at("n").get<int>();
    m.depth_ = j.at("m").get<int>();
    m.fingerprint_ = j.at("training_fingerprint").get<std::uint64_t>();
    m.training_size_ = j.at("training_size").get<std::size_t>();
    m.classifier_ = svm::Classifier::from_json(j.at("classifier"));
    if (m.classifier_.dim() != static_cast<std::size_t>(2 * m.qubits_ * m.depth_)) {
      throw Error(Errc::parse_error, "classifier dimension does not match 2nm");
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad comparator JSON: ") + e.what());
  }
}

ComparatorModel train_comparator(const svm::Matrix& features, std::span<const int> labels,
                                 int qubits, int depth, const svm::Params& params) {
  const std::size_t dim = static_cast<std::size_t>(2 * qubits * depth);
  if (features.cols != dim) {
    throw Error(Errc::shape_mismatch, "features are not 2nm long");
  }
  ComparatorModel m;
  m.qubits_ = qubits;
  m.depth_ = depth;
  m.training_size_ = features.rows;
  std::uint64_t h = fnv1a(features.data.data(), features.data.size() * sizeof(double));
  m.fingerprint_ = fnv1a(labels.data(), labels.size() * sizeof(int), h);
  svm::Params p = params;
  if (p.gamma <= 0.0) p.gamma = 1.0 / static_cast<double>(dim);
  m.classifier_ = svm::Classifier::train(features, labels, p);
  if (m.classifier_.is_constant()) {
    std::cerr << "warning: comparator training data has a single class ("
              << m.classifier_.classes().front() << "); using a constant predictor\n";
  }
  return m;
}

ComparatorModel train_comparator(const TrainingSet& training, const svm::Params& params) {
  if (training.pairs.empty()) throw Error(Errc::empty_input, "no labelled pairs to train on");
  const Ansatz& shape = training.circuits.front().ansatz;
  return train_comparator(training.features(), training.labels(), shape.qubits(), shape.depth(),
                          params);
}

RefitResult refit(std::span<const Evaluated> archive, std::span<const Evaluated> elite,
                  double eps, std::size_t cap, std::uint64_t seed, const svm::Params& params) {
  std::vector<Evaluated> merged;
  std::map<Ansatz, std::size_t> slot;
  auto add = [&](const Evaluated& e) {
    auto [it, inserted] = slot.emplace(e.ansatz, merged.size());
    if (inserted) {
      merged.push_back(e);
    } else if (e.energy < merged[it->second].energy) {
      merged[it->second].energy = e.energy;
    }
  };
  for (const auto& e : elite) add(e);
  const std::size_t priority = merged.size();
  for (const auto& e : archive) add(e);

  RefitResult out;
  out.training = label_pairs(std::move(merged), eps, cap, priority, seed);
  out.model = train_comparator(out.training, params);
  return out;
}

}  // namespace qas
