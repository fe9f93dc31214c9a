#pragma once

#include <stdexcept>
#include <string>

namespace ufu {

enum class ErrorCode {
  invalid_argument,
  boundary_collision,
  malformed_multipart,
  timeout,
  connection_error,
  bind_error,
  no_file_part,
  dimension_out_of_range,
  method_mismatch,
  target_unreachable,
  lab_startup_failure,
  internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, std::string message) {
  throw Error(code, std::move(message));
}

} // namespace ufu
