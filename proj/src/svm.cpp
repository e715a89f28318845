#include "qas/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <map>

#include "qas/error.hpp"
#include "qas/kernels.hpp"

namespace qas::svm {

Standardizer Standardizer::fit(const Matrix& x) {
  if (x.rows == 0) throw Error(Errc::empty_input, "cannot standardize an empty sample");
  Standardizer s;
  s.mean.assign(x.cols, 0.0);
  s.inv_scale.assign(x.cols, 1.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < x.cols; ++k) s.mean[k] += r[k];
  }
  for (double& m : s.mean) m /= static_cast<double>(x.rows);
  std::vector<double> var(x.cols, 0.0);
  for (std::size_t i = 0; i < x.rows; ++i) {
    const auto r = x.row(i);
    for (std::size_t k = 0; k < x.cols; ++k) {
      const double d = r[k] - s.mean[k];
      var[k] += d * d;
    }
  }
  for (std::size_t k = 0; k < x.cols; ++k) {
    const double v = var[k] / static_cast<double>(x.rows);
    if (v > 1e-24) s.inv_scale[k] = 1.0 / std::sqrt(v);
  }
  return s;
}

void Standardizer::apply(std::span<const double> in, std::span<double> out) const {
  if (in.size() != mean.size() || out.size() != mean.size()) {
    throw Error(Errc::dimension_mismatch, "feature dimension differs from the training data");
  }
  for (std::size_t k = 0; k < in.size(); ++k) out[k] = (in[k] - mean[k]) * inv_scale[k];
}

Matrix Standardizer::apply(const Matrix& x) const {
  Matrix out(x.rows, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) apply(x.row(i), out.row(i));
  return out;
}

namespace {

constexpr double kTau = 1e-12;

// Kernel rows of one binary problem, least recently used rows evicted first.
class KernelCache {
 public:
  KernelCache(const Matrix& x, std::vector<std::size_t> members, double gamma,
              std::size_t budget_bytes)
      : x_(x), members_(std::move(members)), gamma_(gamma),
        slots_(members_.size(), lru_.end()) {
    const std::size_t row_bytes = std::max<std::size_t>(1, members_.size() * sizeof(float));
    capacity_ = std::max<std::size_t>(2, budget_bytes / row_bytes);
  }

  std::size_t size() const { return members_.size(); }

  const std::vector<float>& row(std::size_t i) {
    auto it = slots_[i];
    if (it != lru_.end()) {
      lru_.splice(lru_.begin(), lru_, it);
      return it->values;
    }
    if (lru_.size() >= capacity_) {
      slots_[lru_.back().index] = lru_.end();
      lru_.pop_back();
    }
    lru_.push_front({i, compute(i)});
    slots_[i] = lru_.begin();
    return lru_.front().values;
  }

 private:
  struct Entry {
    std::size_t index;
    std::vector<float> values;
  };

  std::vector<float> compute(std::size_t i) const {
    const auto& k = kernels::active();
    const double* xi = x_.row(members_[i]).data();
    std::vector<float> out(members_.size());
    for (std::size_t t = 0; t < members_.size(); ++t) {
      const double d2 = k.squared_distance(xi, x_.row(members_[t]).data(), x_.cols);
      out[t] = static_cast<float>(std::exp(-gamma_ * d2));
    }
    return out;
  }

  const Matrix& x_;
  std::vector<std::size_t> members_;
  double gamma_;
  std::size_t capacity_ = 2;
  std::list<Entry> lru_;
  std::vector<std::list<Entry>::iterator> slots_;
};

struct BinarySolution {
  std::vector<double> alpha;
  double rho = 0.0;
  std::uint64_t iterations = 0;
};

// Dual C-SVC: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0, Q_ij = y_i y_j K_ij.
BinarySolution solve_binary(KernelCache& cache, const std::vector<signed char>& y,
                            const Params& params) {
  const std::size_t l = y.size();
  const double c = params.c;
  const double eps = params.tolerance;
  std::vector<double> alpha(l, 0.0);
  std::vector<double> grad(l, -1.0);
  const std::uint64_t max_iter =
      params.max_iterations > 0
          ? params.max_iterations
          : std::max<std::uint64_t>(10'000'000, 100 * static_cast<std::uint64_t>(l));

  auto upper = [&](std::size_t t) { return alpha[t] >= c; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  std::uint64_t iter = 0;
  while (iter < max_iter) {
    // Maximal violating index i, then j by second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = l;
    for (std::size_t t = 0; t < l; ++t) {
      if (y[t] == 1) {
        if (!upper(t) && -grad[t] >= gmax) {
          gmax = -grad[t];
          i = t;
        }
      } else if (!lower(t) && grad[t] >= gmax) {
        gmax = grad[t];
        i = t;
      }
    }
    if (i == l) break;
    const std::vector<float>& ki = cache.row(i);
    double gmax2 = -std::numeric_limits<double>::infinity();
    double best_obj = std::numeric_limits<double>::infinity();
    std::size_t j = l;
    for (std::size_t t = 0; t < l; ++t) {
      const double kit = ki[t];
      if (y[t] == 1) {
        if (lower(t)) continue;
        const double diff = gmax + grad[t];
        gmax2 = std::max(gmax2, grad[t]);
        if (diff > 0) {
          double quad = 2.0 - 2.0 * y[i] * kit;
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      } else {
        if (upper(t)) continue;
        const double diff = gmax - grad[t];
        gmax2 = std::max(gmax2, -grad[t]);
        if (diff > 0) {
          double quad = 2.0 + 2.0 * y[i] * kit;
          if (quad <= 0) quad = kTau;
          const double obj = -(diff * diff) / quad;
          if (obj <= best_obj) {
            best_obj = obj;
            j = t;
          }
        }
      }
    }
    if (gmax + gmax2 < eps || j == l) break;
    ++iter;

    const std::vector<float>& kj = cache.row(j);
    const std::vector<float>& kir = cache.row(i);  // may have been evicted by row(j)
    const double qij = y[i] * y[j] * static_cast<double>(kir[j]);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    if (y[i] != y[j]) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0) {
        alpha[j] = 0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = sum;
      }
    }
    const double di = (alpha[i] - old_i) * y[i];
    const double dj = (alpha[j] - old_j) * y[j];
    for (std::size_t t = 0; t < l; ++t) {
      grad[t] += y[t] * (kir[t] * di + kj[t] * dj);
    }
  }

  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t free = 0;
  for (std::size_t t = 0; t < l; ++t) {
    const double yg = y[t] * grad[t];
    if (upper(t)) {
      if (y[t] == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++free;
      sum_free += yg;
    }
  }
  BinarySolution out;
  out.rho = free > 0 ? sum_free / static_cast<double>(free) : 0.5 * (ub + lb);
  out.alpha = std::move(alpha);
  out.iterations = iter;
  return out;
}

int vote(const std::vector<BinaryMachine>& machines, const std::vector<int>& classes,
         std::span<const double> decisions) {
  std::map<int, int> votes;
  for (int c : classes) votes[c] = 0;
  for (std::size_t p = 0; p < machines.size(); ++p) {
    ++votes[decisions[p] > 0 ? machines[p].class_pos : machines[p].class_neg];
  }
  int best = classes.front();
  int best_votes = -1;
  for (const auto& [label, count] : votes) {  // ascending label order
    if (count > best_votes) {
      best = label;
      best_votes = count;
    }
  }
  return best;
}

}  // namespace

Classifier Classifier::train(const Matrix& x, std::span<const int> labels, const Params& params) {
  if (x.rows == 0) throw Error(Errc::empty_input, "empty training set");
  if (labels.size() != x.rows) {
    throw Error(Errc::dimension_mismatch, "label count differs from sample count");
  }
  if (!(params.c > 0.0)) throw Error(Errc::invalid_argument, "C must be > 0");
  for (int label : labels) {
    if (label < 0) throw Error(Errc::invalid_argument, "labels must be non-negative");
  }

  Classifier model;
  model.c_ = params.c;
  model.gamma_ = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(std::max<std::size_t>(1, x.cols));
  model.standardizer_ = Standardizer::fit(x);
  model.classes_.assign(labels.begin(), labels.end());
  std::sort(model.classes_.begin(), model.classes_.end());
  model.classes_.erase(std::unique(model.classes_.begin(), model.classes_.end()),
                       model.classes_.end());
  model.support_ = Matrix(0, x.cols);
  if (model.classes_.size() < 2) return model;

  const Matrix z = model.standardizer_.apply(x);
  std::vector<std::ptrdiff_t> pool_slot(x.rows, -1);
  std::vector<std::size_t> pool_rows;

  for (std::size_t a = 0; a < model.classes_.size(); ++a) {
    for (std::size_t b = a + 1; b < model.classes_.size(); ++b) {
      std::vector<std::size_t> members;
      std::vector<signed char> y;
      for (std::size_t i = 0; i < x.rows; ++i) {
        if (labels[i] == model.classes_[a] || labels[i] == model.classes_[b]) {
          members.push_back(i);
          y.push_back(labels[i] == model.classes_[a] ? 1 : -1);
        }
      }
      KernelCache cache(z, members, model.gamma_, params.cache_bytes);
      const BinarySolution sol = solve_binary(cache, y, params);

      BinaryMachine m;
      m.class_pos = model.classes_[a];
      m.class_neg = model.classes_[b];
      m.rho = sol.rho;
      m.iterations = sol.iterations;
      for (std::size_t t = 0; t < members.size(); ++t) {
        if (sol.alpha[t] <= 0.0) continue;
        const std::size_t row = members[t];
        if (pool_slot[row] < 0) {
          pool_slot[row] = static_cast<std::ptrdiff_t>(pool_rows.size());
          pool_rows.push_back(row);
        }
        m.sv.push_back(static_cast<std::size_t>(pool_slot[row]));
        m.coef.push_back(sol.alpha[t] * y[t]);
      }
      model.machines_.push_back(std::move(m));
    }
  }

  model.support_ = Matrix(pool_rows.size(), x.cols);
  for (std::size_t s = 0; s < pool_rows.size(); ++s) {
    const auto src = z.row(pool_rows[s]);
    std::copy(src.begin(), src.end(), model.support_.row(s).begin());
  }
  return model;
}

int Classifier::predict_from_sq_distances(std::span<const double> sq_dist) const {
  if (is_constant()) return classes_.front();
  if (sq_dist.size() != support_.rows) {
    throw Error(Errc::dimension_mismatch, "distance count differs from support vector count");
  }
  std::vector<double> kvals(sq_dist.size());
  for (std::size_t s = 0; s < sq_dist.size(); ++s) {
    kvals[s] = std::exp(-gamma_ * std::max(0.0, sq_dist[s]));
  }
  std::vector<double> decisions(machines_.size());
  for (std::size_t p = 0; p < machines_.size(); ++p) {
    const auto& m = machines_[p];
    double f = -m.rho;
    for (std::size_t k = 0; k < m.sv.size(); ++k) f += m.coef[k] * kvals[m.sv[k]];
    decisions[p] = f;
  }
  return vote(machines_, classes_, decisions);
}

int Classifier::predict(std::span<const double> raw) const {
  if (raw.size() != dim()) {
    throw Error(Errc::dimension_mismatch, "feature dimension differs from the training data");
  }
  if (is_constant()) return classes_.front();
  std::vector<double> z(raw.size());
  standardizer_.apply(raw, z);
  const auto& k = kernels::active();
  std::vector<double> d2(support_.rows);
  for (std::size_t s = 0; s < support_.rows; ++s) {
    d2[s] = k.squared_distance(z.data(), support_.row(s).data(), z.size());
  }
  return predict_from_sq_distances(d2);
}

std::vector<int> Classifier::predict(const Matrix& raw) const {
  std::vector<int> out(raw.rows);
  for (std::size_t i = 0; i < raw.rows; ++i) out[i] = predict(raw.row(i));
  return out;
}

nlohmann::json Classifier::to_json() const {
  nlohmann::json machines = nlohmann::json::array();
  for (const auto& m : machines_) {
    machines.push_back({{"class_pos", m.class_pos},
                        {"class_neg", m.class_neg},
                        {"rho", m.rho},
                        {"sv", m.sv},
                        {"coef", m.coef}});
  }
  nlohmann::json sv = nlohmann::json::array();
  for (std::size_t s = 0; s < support_.rows; ++s) {
    const auto r = support_.row(s);
    sv.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return {{"kernel", "rbf"},
          {"gamma", gamma_},
          {"c", c_},
          {"classes", classes_},
          {"mean", standardizer_.mean},
          {"inv_scale", standardizer_.inv_scale},
          {"support", sv},
          {"machines", machines}};
}

Classifier Classifier::from_json(const nlohmann::json& j) {
  try {
    if (j.at("kernel").get<std::string>() != "rbf") {
      throw Error(Errc::parse_error, "unsupported kernel");
    }
    Classifier model;
    model.gamma_ = j.at("gamma").get<double>();
    model.c_ = j.at("c").get<double>();
    model.classes_ = j.at("classes").get<std::vector<int>>();
    model.standardizer_.mean = j.at("mean").get<std::vector<double>>();
    model.standardizer_.inv_scale = j.at("inv_scale").get<std::vector<double>>();
    const std::size_t dim = model.standardizer_.mean.size();
    if (model.classes_.empty() || model.standardizer_.inv_scale.size() != dim) {
      throw Error(Errc::parse_error, "inconsistent classifier JSON");
    }
    const auto& sv = j.at("support");
    model.support_ = Matrix(sv.size(), dim);
    for (std::size_t s = 0; s < sv.size(); ++s) {
      const auto r = sv[s].get<std::vector<double>>();
      if (r.size() != dim) throw Error(Errc::parse_error, "support vector has wrong dimension");
      std::copy(r.begin(), r.end(), model.support_.row(s).begin());
    }
    for (const auto& mj : j.at("machines")) {
      BinaryMachine m;
      m.class_pos = mj.at("class_pos").get<int>();
      m.class_neg = mj.at("class_neg").get<int>();
      m.rho = mj.at("rho").get<double>();
      m.sv = mj.at("sv").get<std::vector<std::size_t>>();
      m.coef = mj.at("coef").get<std::vector<double>>();
      if (m.sv.size() != m.coef.size()) throw Error(Errc::parse_error, "sv/coef length mismatch");
      for (std::size_t s : m.sv) {
        if (s >= sv.size()) throw Error(Errc::parse_error, "support index out of range");
      }
      model.machines_.push_back(std::move(m));
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad classifier JSON: ") + e.what());
  }
}

}  // namespace qas::svm
