#pragma once

#include <stdexcept>
#include <string>

namespace mann {

// Error categories surfaced by the library. The CLI maps each to a distinct
// exit status.
enum class ErrorKind {
  BadFlag,
  Parse,
  Validation,
  NonPositiveMass,
  SingularMass,
  Diverged,
  EmptyWindow,
  MissingBaseline,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind);

}  // namespace mann
