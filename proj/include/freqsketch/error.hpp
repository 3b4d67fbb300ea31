#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace freqsketch {

enum class ErrorCode {
  invalid_argument,
  negative_value,
  parse_error,
  io_error,
  duplicate_key,
  config_mismatch,
  zero_norm,
  format_error,
};

std::string_view error_code_name(ErrorCode code);

// All library failures are reported through this type so the CLI can map
// them to a stable machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace freqsketch
