#pragma once

// Run configuration: one flat JSON object holding every search setting plus
// the Hamiltonian, the optional seed population, and the output directory.
//
//   {"hamiltonian": "h1", "qubits": 4, "depth": 8, "population": 150,
//    "iterations": 50, "seed": 7, "output_dir": "runs/h1-n4"}
//
// Unlisted keys take the SearchConfig defaults. Relative paths are resolved
// against the directory of the config file. QAS_OUTPUT_DIR, when set,
// replaces output_dir.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qas/pauli.hpp"
#include "qas/search.hpp"

namespace qas {

struct RunConfig {
  SearchConfig search;
  std::string hamiltonian = "h1";        // h1..h4, ignored when a file is given
  std::filesystem::path hamiltonian_file;  // PauliSum JSON
  std::filesystem::path initial_population;  // population JSON
  std::filesystem::path output_dir = "qas-run";

  PauliSum build_hamiltonian() const;
};

/// Errc::config_error on unknown keys or bad values.
RunConfig run_config_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir = {});
nlohmann::json to_json(const RunConfig& cfg);

/// Reads, applies the environment override, loads the seed population and
/// validates.
RunConfig load_run_config(const std::filesystem::path& file);

/// A JSON array of ansatz objects, or {"population": [...]}.
std::vector<Ansatz> population_from_json(const nlohmann::json& j);
nlohmann::json population_to_json(std::span<const Ansatz> pop);

}  // namespace qas
