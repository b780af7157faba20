#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mubcert {

enum class ErrorKind {
  NotHermitian,
  NotPSD,
  NoConvergence,
  DimensionMismatch,
  NotProjective,
  NotMub,
  EmptyCell,
  OutOfRange,
  BelowThreshold,
  DenominatorNonpositive,
  BoundInapplicableInWindow,
  AllArmsBlocked,
  StabilizationFailed,
  InvalidArgument,
  InvalidConfig,
  ParseError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the kinds above so
// callers (the CLI in particular) can map it to a stable exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace mubcert
