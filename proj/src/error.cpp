#include "temai/error.hpp"

#include <utility>

namespace temai {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::completeness: return "completeness";
    case ErrorCode::lookup: return "lookup";
    case ErrorCode::structural: return "structural";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::schema_version: return "schema_version";
    case ErrorCode::parse: return "parse";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::unauthorized: return "unauthorized";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::string field_path)
    : std::runtime_error(message), code_(code), field_path_(std::move(field_path)) {}

}  // namespace temai
