#include <gtest/gtest.h>

#include <random>

#include "qas/svm.hpp"

using qas::svm::Classifier;
using qas::svm::Matrix;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

// Label 1 iff the first component is positive.
Data sign_problem(std::size_t count, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Data d{Matrix(count, dim), std::vector<int>(count)};
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t k = 0; k < dim; ++k) d.x.row(i)[k] = g(rng);
    d.y[i] = d.x.row(i)[0] > 0 ? 1 : 0;
  }
  return d;
}

// Three Gaussian blobs in the plane.
Data blobs(std::size_t per_class, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.5);
  const double centers[3][2] = {{0, 0}, {3, 0}, {0, 3}};
  Data d{Matrix(3 * per_class, 2), std::vector<int>(3 * per_class)};
  for (std::size_t i = 0; i < 3 * per_class; ++i) {
    const int c = static_cast<int>(i % 3);
    d.x.row(i)[0] = centers[c][0] + g(rng);
    d.x.row(i)[1] = centers[c][1] + g(rng);
    d.y[i] = c;
  }
  return d;
}

double accuracy(const Classifier& clf, const Data& d) {
  std::size_t ok = 0;
  const auto pred = clf.predict(d.x);
  for (std::size_t i = 0; i < pred.size(); ++i) ok += pred[i] == d.y[i];
  return static_cast<double>(ok) / static_cast<double>(pred.size());
}

}  // namespace

TEST(Standardizer, ZeroMeanUnitVarianceAndConstantColumns) {
  Matrix x(4, 2);
  const double v[4] = {1, 2, 3, 6};
  for (std::size_t i = 0; i < 4; ++i) {
    x.row(i)[0] = v[i];
    x.row(i)[1] = 7.0;
  }
  const auto s = qas::svm::Standardizer::fit(x);
  const Matrix z = s.apply(x);
  double mean = 0, sq = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    mean += z.row(i)[0];
    sq += z.row(i)[0] * z.row(i)[0];
    EXPECT_EQ(z.row(i)[1], 0.0);
  }
  EXPECT_NEAR(mean, 0.0, 1e-12);
  EXPECT_NEAR(sq / 4, 1.0, 1e-12);
  EXPECT_EQ(s.inv_scale[1], 1.0);
}

TEST(Classifier, SyntheticSignProblemHoldOut) {
  const Data train = sign_problem(500, 4, 1);
  const Data test = sign_problem(500, 4, 2);
  const auto clf = Classifier::train(train.x, train.y);
  EXPECT_FALSE(clf.is_constant());
  EXPECT_NEAR(clf.gamma(), 1.0 / 4.0, 1e-15);
  EXPECT_GE(accuracy(clf, test), 0.95);
}

// Reference values from libsvm (C = 1, gamma = 1/dim, tol 1e-3) on the same
// standardized samples.
TEST(Classifier, MatchesLibsvmReference) {
  struct Case {
    std::size_t dim;
    std::size_t support;
    double rho;
    double accuracy;
  };
  for (const Case c : {Case{6, 181, -0.05696504, 0.94}, Case{4, 147, -0.09752435, 0.972},
                       Case{2, 107, 0.08350417, 0.974}}) {
    const Data train = sign_problem(500, c.dim, 1);
    const Data test = sign_problem(500, c.dim, 2);
    const auto clf = Classifier::train(train.x, train.y);
    EXPECT_EQ(clf.support().rows, c.support) << c.dim;
    EXPECT_NEAR(clf.machines()[0].rho, c.rho, 5e-4) << c.dim;
    EXPECT_NEAR(accuracy(clf, test), c.accuracy, 1e-9) << c.dim;
  }
}

TEST(Classifier, ThreeClassBlobs) {
  const Data train = blobs(100, 3);
  const Data test = blobs(100, 4);
  const auto clf = Classifier::train(train.x, train.y);
  EXPECT_EQ(clf.classes(), (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(clf.machines().size(), 3u);
  EXPECT_GE(accuracy(clf, test), 0.97);
  EXPECT_GE(accuracy(clf, train), 0.97);
}

TEST(Classifier, SingleClassIsConstant) {
  Matrix x(5, 2);
  for (std::size_t i = 0; i < 5; ++i) x.row(i)[0] = static_cast<double>(i);
  const std::vector<int> y(5, 2);
  const auto clf = Classifier::train(x, y);
  EXPECT_TRUE(clf.is_constant());
  EXPECT_EQ(clf.predict(std::vector<double>{100.0, -3.0}), 2);
}

TEST(Classifier, RejectsBadInput) {
  Matrix x(3, 2);
  EXPECT_THROW(Classifier::train(x, std::vector<int>{0, 1}), std::exception);
  EXPECT_THROW(Classifier::train(x, std::vector<int>{0, -1, 1}), std::exception);
  EXPECT_THROW(Classifier::train(Matrix(0, 2), std::vector<int>{}), std::exception);
}

TEST(Classifier, DecisionSatisfiesKktOnTrainingSet) {
  // Free support vectors sit on the margin: |f(x_i)| = 1 within tolerance.
  const Data d = sign_problem(200, 3, 9);
  qas::svm::Params p;
  p.tolerance = 1e-5;
  const auto clf = Classifier::train(d.x, d.y, p);
  ASSERT_EQ(clf.machines().size(), 1u);
  const auto& m = clf.machines()[0];
  const auto& sv = clf.support();
  double coef_sum = 0;
  for (double c : m.coef) coef_sum += c;
  EXPECT_NEAR(coef_sum, 0.0, 1e-9);
  int free_checked = 0;
  for (std::size_t i = 0; i < m.sv.size(); ++i) {
    if (std::abs(m.coef[i]) >= clf.c() - 1e-9) continue;
    double f = -m.rho;
    for (std::size_t j = 0; j < m.sv.size(); ++j) {
      double d2 = 0;
      for (std::size_t k = 0; k < sv.cols; ++k) {
        const double diff = sv.row(m.sv[i])[k] - sv.row(m.sv[j])[k];
        d2 += diff * diff;
      }
      f += m.coef[j] * std::exp(-clf.gamma() * d2);
    }
    EXPECT_NEAR(std::abs(f), 1.0, 1e-3);
    ++free_checked;
  }
  EXPECT_GT(free_checked, 0);
}

TEST(Classifier, DeterministicAndJsonRoundTrip) {
  const Data d = blobs(40, 5);
  const auto a = Classifier::train(d.x, d.y);
  const auto b = Classifier::train(d.x, d.y);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
  const auto back = Classifier::from_json(a.to_json());
  const Data q = blobs(50, 6);
  EXPECT_EQ(back.predict(q.x), a.predict(q.x));
}

TEST(Classifier, PredictFromDistancesAgrees) {
  const Data d = blobs(30, 7);
  const auto clf = Classifier::train(d.x, d.y);
  const Data q = blobs(20, 8);
  const auto& sv = clf.support();
  for (std::size_t i = 0; i < q.x.rows; ++i) {
    std::vector<double> z(2);
    clf.standardizer().apply(q.x.row(i), z);
    std::vector<double> d2(sv.rows);
    for (std::size_t s = 0; s < sv.rows; ++s) {
      for (std::size_t k = 0; k < 2; ++k) d2[s] += (z[k] - sv.row(s)[k]) * (z[k] - sv.row(s)[k]);
    }
    EXPECT_EQ(clf.predict_from_sq_distances(d2), clf.predict(q.x.row(i)));
  }
}

TEST(Classifier, TinyCacheGivesSameModel) {
  const Data d = sign_problem(300, 4, 10);
  qas::svm::Params small;
  small.cache_bytes = 4096;
  const auto a = Classifier::train(d.x, d.y);
  const auto b = Classifier::train(d.x, d.y, small);
  EXPECT_EQ(a.to_json().dump(), b.to_json().dump());
}
