#pragma once

// File I/O for run artifacts.
//
// A run directory holds
//   config.json       the resolved run configuration
//   iterations.jsonl  one line per completed iteration
//   checkpoint.json   full search state after the last completed iteration
//   summary.json      final archive summary (best, lowest energy, Pareto front)
// Every file is rewritten whole through a temporary file and a rename, so an
// interrupted run never leaves a half-written artifact.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qas/config.hpp"
#include "qas/search.hpp"

namespace qas {

std::string read_text(const std::filesystem::path& file);
nlohmann::json read_json(const std::filesystem::path& file);

void write_text(const std::filesystem::path& file, const std::string& text);
/// Two-space indented, trailing newline.
void write_json(const std::filesystem::path& file, const nlohmann::json& j);

std::string iterations_jsonl(std::span<const IterationLog> logs);

class RunWriter {
 public:
  explicit RunWriter(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path checkpoint_path() const { return dir_ / "checkpoint.json"; }

  void write_config(const RunConfig& cfg) const;
  /// Checkpoint plus the iteration log.
  void write_progress(const SearchState& state) const;
  void write_summary(const RunRecord& record) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace qas
