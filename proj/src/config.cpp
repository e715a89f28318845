#include "qas/config.hpp"

#include <cstdlib>

#include "qas/error.hpp"
#include "qas/hamiltonians.hpp"
#include "qas/persistence.hpp"

namespace qas {
namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

PauliSum RunConfig::build_hamiltonian() const {
  if (!hamiltonian_file.empty()) return pauli_sum_from_json(read_json(hamiltonian_file));
  try {
    return qas::build_hamiltonian(parse_hamiltonian_kind(hamiltonian), search.qubits);
  } catch (const Error& e) {
    throw Error(Errc::config_error, e.what());
  }
}

RunConfig run_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(Errc::config_error, "run config must be a JSON object");
  RunConfig cfg;
  nlohmann::json search = nlohmann::json::object();
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "hamiltonian") {
        cfg.hamiltonian = value.get<std::string>();
      } else if (key == "hamiltonian_file") {
        cfg.hamiltonian_file = resolve(base_dir, value.get<std::string>());
      } else if (key == "initial_population") {
        cfg.initial_population = resolve(base_dir, value.get<std::string>());
      } else if (key == "output_dir") {
        cfg.output_dir = resolve(base_dir, value.get<std::string>());
      } else {
        search[key] = value;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config_error, std::string("bad config value: ") + e.what());
  }
  cfg.search = search_config_from_json(search);
  if (cfg.hamiltonian_file.empty()) {
    try {
      parse_hamiltonian_kind(cfg.hamiltonian);
    } catch (const Error& e) {
      throw Error(Errc::config_error, e.what());
    }
  }
  return cfg;
}

nlohmann::json to_json(const RunConfig& cfg) {
  nlohmann::json j = to_json(cfg.search);
  j["hamiltonian"] = cfg.hamiltonian;
  if (!cfg.hamiltonian_file.empty()) j["hamiltonian_file"] = cfg.hamiltonian_file.string();
  if (!cfg.initial_population.empty()) j["initial_population"] = cfg.initial_population.string();
  j["output_dir"] = cfg.output_dir.string();
  return j;
}

RunConfig load_run_config(const std::filesystem::path& file) {
  nlohmann::json j;
  try {
    j = read_json(file);
  } catch (const Error& e) {
    throw Error(Errc::config_error, e.what());
  }
  RunConfig cfg = run_config_from_json(j, file.parent_path());
  if (const char* dir = std::getenv("QAS_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    cfg.output_dir = dir;
  }
  if (!cfg.initial_population.empty()) {
    try {
      cfg.search.initial = population_from_json(read_json(cfg.initial_population));
    } catch (const Error& e) {
      throw Error(Errc::config_error, e.what());
    }
  }
  cfg.search.validate();
  return cfg;
}

std::vector<Ansatz> population_from_json(const nlohmann::json& j) {
  const nlohmann::json& list = j.is_object() && j.contains("population") ? j.at("population") : j;
  if (!list.is_array()) throw Error(Errc::parse_error, "population must be a JSON array");
  std::vector<Ansatz> pop;
  for (const auto& item : list) pop.push_back(ansatz_from_json(item));
  return pop;
}

nlohmann::json population_to_json(std::span<const Ansatz> pop) {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& a : pop) list.push_back(to_json(a));
  return {{"population", list}};
}

}  // namespace qas
