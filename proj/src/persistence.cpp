#include "qas/persistence.hpp"

#include <fstream>
#include <sstream>

#include "qas/error.hpp"

namespace qas {

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json read_json(const std::filesystem::path& file) {
  const std::string text = read_text(file);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, file.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out << text;
    if (!out) throw Error(Errc::io_error, "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, file, ec);
  if (ec) throw Error(Errc::io_error, "cannot move " + tmp.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& file, const nlohmann::json& j) {
  write_text(file, j.dump(2) + "\n");
}

std::string iterations_jsonl(std::span<const IterationLog> logs) {
  std::string out;
  for (const auto& log : logs) out += to_json(log).dump() + "\n";
  return out;
}

RunWriter::RunWriter(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::io_error, "cannot create " + dir_.string() + ": " + ec.message());
}

void RunWriter::write_config(const RunConfig& cfg) const {
  nlohmann::json j = to_json(cfg);
  j.erase("output_dir");  // the location itself; keeps runs in different dirs comparable
  write_json(dir_ / "config.json", j);
}

void RunWriter::write_progress(const SearchState& state) const {
  write_json(checkpoint_path(), to_json(state));
  write_text(dir_ / "iterations.jsonl", iterations_jsonl(state.log));
}

void RunWriter::write_summary(const RunRecord& record) const {
  write_json(dir_ / "summary.json", summary_json(record));
}

}  // namespace qas
