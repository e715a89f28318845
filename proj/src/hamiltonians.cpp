#include "qas/hamiltonians.hpp"

#include <bit>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "qas/error.hpp"

namespace qas {
namespace {

std::string two_site(int n, int i, int j, char p) {
  std::string w(static_cast<std::size_t>(n), 'I');
  w[i] = p;
  w[j] = p;
  return w;
}

std::string one_site(int n, int i, char p) {
  std::string w(static_cast<std::size_t>(n), 'I');
  w[i] = p;
  return w;
}

void add_heisenberg_bond(PauliSum& h, int n, int i, int j, double c) {
  for (char p : {'X', 'Y', 'Z'}) h.add(c, two_site(n, i, j, p));
}

bool is_real(const PauliSum& h) {
  for (const auto& t : h.terms()) {
    if (t.y_count() % 2 != 0) return false;
  }
  return true;
}

}  // namespace

HamiltonianKind parse_hamiltonian_kind(std::string_view name) {
  if (name == "h1" || name == "H1") return HamiltonianKind::H1;
  if (name == "h2" || name == "H2") return HamiltonianKind::H2;
  if (name == "h3" || name == "H3") return HamiltonianKind::H3;
  if (name == "h4" || name == "H4") return HamiltonianKind::H4;
  throw Error(Errc::invalid_argument,
              "unknown Hamiltonian kind '" + std::string(name) + "'");
}

std::string_view to_string(HamiltonianKind kind) {
  switch (kind) {
    case HamiltonianKind::H1: return "h1";
    case HamiltonianKind::H2: return "h2";
    case HamiltonianKind::H3: return "h3";
    case HamiltonianKind::H4: return "h4";
  }
  return "?";
}

PauliSum build_hamiltonian(HamiltonianKind kind, int n) {
  const int min_n = kind == HamiltonianKind::H4 ? 3 : 2;
  if (n < min_n) {
    throw Error(Errc::invalid_qubit_count,
                std::string(to_string(kind)) + " needs at least " +
                    std::to_string(min_n) + " qubits");
  }
  PauliSum h(n);
  switch (kind) {
    case HamiltonianKind::H1:
      for (int i = 0; i + 1 < n; ++i) h.add(1.0, two_site(n, i, i + 1, 'Z'));
      for (int i = 0; i < n; ++i) h.add(2.0, one_site(n, i, 'X'));
      break;
    case HamiltonianKind::H2:
      for (int i = 0; i + 1 < n; ++i) add_heisenberg_bond(h, n, i, i + 1, 1.0);
      for (int i = 0; i < n; ++i) h.add(2.0, one_site(n, i, 'Z'));
      break;
    case HamiltonianKind::H3:
      // Bond b (0-based) is bond i = b + 1, so (-1)^(i-1) = (-1)^b.
      for (int b = 0; b + 1 < n; ++b) {
        add_heisenberg_bond(h, n, b, b + 1, 1.0 + 1.5 * (b % 2 == 0 ? 1.0 : -1.0));
      }
      for (int i = 0; i < n; ++i) h.add(2.0, one_site(n, i, 'X'));
      break;
    case HamiltonianKind::H4:
      for (int i = 0; i + 1 < n; ++i) add_heisenberg_bond(h, n, i, i + 1, 1.0);
      for (int i = 0; i + 2 < n; ++i) add_heisenberg_bond(h, n, i, i + 2, 3.0);
      break;
  }
  return h;
}

std::vector<cplx> dense_matrix(const PauliSum& h) {
  if (h.qubits() > kMaxDenseQubits) {
    throw Error(Errc::too_large, "dense matrix limited to " +
                                     std::to_string(kMaxDenseQubits) + " qubits");
  }
  const std::size_t dim = std::size_t{1} << h.qubits();
  std::vector<cplx> m(dim * dim, cplx{0.0, 0.0});
  // P|j> = i^#Y (-1)^popcount(j & z) |j ^ x>, so column j has one entry.
  for (const auto& t : h.terms()) {
    const std::uint64_t x = t.x_mask();
    const std::uint64_t z = t.z_mask();
    cplx phase{1.0, 0.0};
    for (int k = 0; k < t.y_count(); ++k) phase *= cplx{0.0, 1.0};
    for (std::size_t j = 0; j < dim; ++j) {
      const double sign = (std::popcount(j & z) & 1) ? -1.0 : 1.0;
      m[(j ^ x) * dim + j] += t.coeff * sign * phase;
    }
  }
  return m;
}

GroundState exact_ground_energy(const PauliSum& h) {
  if (h.qubits() < 1) throw Error(Errc::invalid_qubit_count, "empty register");
  if (h.qubits() > kMaxDenseQubits) {
    throw Error(Errc::too_large,
                "dense diagonalization limited to " +
                    std::to_string(kMaxDenseQubits) + " qubits");
  }
  const auto flat = dense_matrix(h);
  const Eigen::Index dim = Eigen::Index{1} << h.qubits();
  std::vector<cplx> vec(static_cast<std::size_t>(dim));
  double energy = 0.0;
  if (is_real(h)) {
    Eigen::MatrixXd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c].real();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    energy = solver.eigenvalues()(0);
    for (Eigen::Index r = 0; r < dim; ++r) vec[r] = solver.eigenvectors()(r, 0);
  } else {
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m);
    energy = solver.eigenvalues()(0);
    for (Eigen::Index r = 0; r < dim; ++r) vec[r] = solver.eigenvectors()(r, 0);
  }
  return {energy, StateVector(h.qubits(), std::move(vec))};
}

double spectral_span(const PauliSum& h) {
  if (h.qubits() <= 10 && !h.empty()) {
    const auto flat = dense_matrix(h);
    const Eigen::Index dim = Eigen::Index{1} << h.qubits();
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = flat[r * dim + c];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(dim - 1) - solver.eigenvalues()(0);
  }
  return 2.0 * h.coefficient_norm();
}

}  // namespace qas
