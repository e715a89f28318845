#include "qas/pauli.hpp"

#include <algorithm>
#include <cmath>

#include "qas/error.hpp"

namespace qas {

std::uint64_t PauliTerm::x_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] == 'X' || word[k] == 'Y') mask |= std::uint64_t{1} << k;
  }
  return mask;
}

std::uint64_t PauliTerm::z_mask() const {
  std::uint64_t mask = 0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    if (word[k] == 'Z' || word[k] == 'Y') mask |= std::uint64_t{1} << k;
  }
  return mask;
}

int PauliTerm::y_count() const {
  return static_cast<int>(std::count(word.begin(), word.end(), 'Y'));
}

PauliSum::PauliSum(int qubits, std::vector<PauliTerm> terms) : qubits_(qubits) {
  for (auto& t : terms) add(t.coeff, t.word);
}

void PauliSum::add(double coeff, const std::string& word) {
  if (static_cast<int>(word.size()) != qubits_) {
    throw Error(Errc::dimension_mismatch,
                "Pauli word '" + word + "' does not have " +
                    std::to_string(qubits_) + " letters");
  }
  for (char c : word) {
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z') {
      throw Error(Errc::invalid_argument, "bad Pauli letter in '" + word + "'");
    }
  }
  if (!std::isfinite(coeff)) {
    throw Error(Errc::invalid_argument, "non-finite Pauli coefficient");
  }
  auto it = std::find_if(terms_.begin(), terms_.end(),
                         [&](const PauliTerm& t) { return t.word == word; });
  if (it != terms_.end()) {
    it->coeff += coeff;
  } else {
    terms_.push_back({coeff, word});
  }
}

PauliSum PauliSum::scaled(double factor) const {
  PauliSum out(qubits_);
  for (const auto& t : terms_) out.add(t.coeff * factor, t.word);
  return out;
}

PauliSum PauliSum::shifted(double shift) const {
  PauliSum out = *this;
  out.add(shift, std::string(static_cast<std::size_t>(qubits_), 'I'));
  return out;
}

double PauliSum::coefficient_norm() const {
  double s = 0.0;
  for (const auto& t : terms_) s += std::abs(t.coeff);
  return s;
}

nlohmann::json to_json(const PauliSum& h) {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : h.terms()) {
    terms.push_back({{"coeff", t.coeff}, {"word", t.word}});
  }
  return {{"n", h.qubits()}, {"terms", terms}};
}

PauliSum pauli_sum_from_json(const nlohmann::json& j) {
  try {
    PauliSum h(j.at("n").get<int>());
    for (const auto& t : j.at("terms")) {
      h.add(t.at("coeff").get<double>(), t.at("word").get<std::string>());
    }
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("bad PauliSum JSON: ") + e.what());
  }
}

}  // namespace qas
