#pragma once

#include <stdexcept>
#include <string>

namespace fluentkb {

enum class ErrorCode {
  invalid_term,
  invalid_quad,
  parse_error,
  duplicate_resource,
  unknown_kind,
  unknown_entity,
  import_rejected,
  invalid_rule,
  invalid_interval,
  round_cap_exceeded,
  unknown_association,
  already_decided,
  invalid_argument,
  io_error,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_term: return "invalid_term";
    case ErrorCode::invalid_quad: return "invalid_quad";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::duplicate_resource: return "duplicate_resource";
    case ErrorCode::unknown_kind: return "unknown_kind";
    case ErrorCode::unknown_entity: return "unknown_entity";
    case ErrorCode::import_rejected: return "import_rejected";
    case ErrorCode::invalid_rule: return "invalid_rule";
    case ErrorCode::invalid_interval: return "invalid_interval";
    case ErrorCode::round_cap_exceeded: return "round_cap_exceeded";
    case ErrorCode::unknown_association: return "unknown_association";
    case ErrorCode::already_decided: return "already_decided";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io_error: return "io_error";
  }
  return "unknown";
}

/// Error raised by every fluentkb operation. Data-level findings (parse
/// diagnostics, consistency clashes) are returned as values instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fluentkb
