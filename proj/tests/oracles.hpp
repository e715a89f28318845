#pragma once

// Reference implementations used only by the tests. They share no code with
// the library's simulation kernels: states are built from full 2^n x 2^n
// gate matrices.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "qas/circuits.hpp"
#include "qas/pauli.hpp"
#include "qas/quantumsim.hpp"

namespace oracle {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using C = std::complex<double>;

inline Eigen::Matrix2cd single(char p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    default: m << 1, 0, 0, 1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Qubit k is bit k of the basis index, so qubit n-1 is the leftmost factor.
inline Mat embed(int n, int q, const Eigen::Matrix2cd& g) {
  Mat out = Mat::Identity(1, 1);
  for (int k = n - 1; k >= 0; --k) out = kron(out, k == q ? Mat(g) : Mat(Mat::Identity(2, 2)));
  return out;
}

inline Mat cnot(int n, int control, int target) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Mat out = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Eigen::Index j = ((i >> control) & 1) ? (i ^ (Eigen::Index{1} << target)) : i;
    out(j, i) = 1.0;
  }
  return out;
}

inline Eigen::Matrix2cd rotation(char axis, double t) {
  return (std::cos(t / 2) * Eigen::Matrix2cd::Identity() - C(0, std::sin(t / 2)) * single(axis));
}

inline Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

/// Column by column, rows top to bottom; angles consumed in that order.
inline Vec state(const qas::Ansatz& a, const std::vector<double>& params) {
  const int n = a.qubits();
  Vec psi = Vec::Zero(Eigen::Index{1} << n);
  psi(0) = 1.0;
  std::size_t p = 0;
  for (int col = 0; col < a.depth(); ++col) {
    for (int row = 0; row < n; ++row) {
      const int code = a.at(row, col);
      if (code == 0) continue;
      if (code == 1) psi = embed(n, row, rotation('X', params.at(p++))) * psi;
      else if (code == 2) psi = embed(n, row, rotation('Y', params.at(p++))) * psi;
      else if (code == 3) psi = embed(n, row, rotation('Z', params.at(p++))) * psi;
      else if (code == 4) psi = embed(n, row, hadamard()) * psi;
      else {
        const int k = code - 5;
        psi = cnot(n, row, k < row ? k : k + 1) * psi;
      }
    }
  }
  return psi;
}

inline Mat pauli_word(const std::string& word) {
  const int n = static_cast<int>(word.size());
  Mat out = Mat::Identity(1, 1);
  for (int k = n - 1; k >= 0; --k) out = kron(out, Mat(single(word[k])));
  return out;
}

inline Mat dense(const qas::PauliSum& h) {
  const Eigen::Index dim = Eigen::Index{1} << h.qubits();
  Mat out = Mat::Zero(dim, dim);
  for (const auto& t : h.terms()) out += t.coeff * pauli_word(t.word);
  return out;
}

inline Vec to_vec(const qas::StateVector& s) {
  Vec v(static_cast<Eigen::Index>(s.dim()));
  for (std::size_t i = 0; i < s.dim(); ++i) v(static_cast<Eigen::Index>(i)) = s[i];
  return v;
}

inline double fidelity(const Vec& a, const Vec& b) { return std::norm(a.dot(b)); }

inline qas::Ansatz random_ansatz(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> code(0, qas::code_count(n) - 1);
  std::vector<int> cells(static_cast<std::size_t>(n * m));
  for (int& c : cells) c = code(rng);
  return qas::Ansatz(n, m, cells);
}

inline std::vector<double> random_params(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  std::vector<double> p(static_cast<std::size_t>(count));
  for (double& x : p) x = u(rng);
  return p;
}

}  // namespace oracle
