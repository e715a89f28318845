#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qas {

enum class Errc {
  invalid_argument,
  invalid_qubit_count,
  parameter_length_mismatch,
  dimension_mismatch,
  index_out_of_range,
  too_large,
  shape_mismatch,
  empty_input,
  degenerate_data,
  config_error,
  io_error,
  parse_error,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::invalid_qubit_count: return "invalid-qubit-count";
    case Errc::parameter_length_mismatch: return "parameter-length-mismatch";
    case Errc::dimension_mismatch: return "dimension-mismatch";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::too_large: return "too-large";
    case Errc::shape_mismatch: return "shape-mismatch";
    case Errc::empty_input: return "empty-input";
    case Errc::degenerate_data: return "degenerate-data";
    case Errc::config_error: return "config-error";
    case Errc::io_error: return "io-error";
    case Errc::parse_error: return "parse-error";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace qas
