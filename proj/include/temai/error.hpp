#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace temai {

enum class ErrorCode {
  validation,
  completeness,
  lookup,
  structural,
  numerical,
  unsupported,
  schema_version,
  parse,
  not_found,
  conflict,
  unauthorized,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for every engine failure. `field_path` points at the
/// offending input location (e.g. "interventions[0].criterion") when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field_path = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  ErrorCode code_;
  std::string field_path_;
};

}  // namespace temai
