#include "common/error.hpp"

namespace ufu {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::boundary_collision: return "boundary_collision";
    case ErrorCode::malformed_multipart: return "malformed_multipart";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::connection_error: return "connection_error";
    case ErrorCode::bind_error: return "bind_error";
    case ErrorCode::no_file_part: return "no_file_part";
    case ErrorCode::dimension_out_of_range: return "dimension_out_of_range";
    case ErrorCode::method_mismatch: return "method_mismatch";
    case ErrorCode::target_unreachable: return "target_unreachable";
    case ErrorCode::lab_startup_failure: return "lab_startup_failure";
    case ErrorCode::internal: return "internal";
  }
  return "unknown";
}

} // namespace ufu
