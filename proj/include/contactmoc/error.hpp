#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contactmoc {

enum class ErrorKind {
  InvalidArgument,
  SonicLimit,
  NotSupersonic,
  StreamDataMismatch,
  OutOfRange,
  NoConvergence,
  Cavitation,
  Degenerate,
  Parse,
  InvariantViolation,
  JacobianDegenerate,
  LeftSupersonicRegime,
  LatticeMismatch,
  CflViolation,
  Io,
  Internal,
};

// Machine-readable category, printed by the CLI as error=<category>.
std::string_view error_category(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  std::string_view category() const noexcept { return error_category(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace contactmoc
