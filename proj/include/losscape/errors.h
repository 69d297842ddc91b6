#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace losscape {

// Base class for every error the library raises. kind() is a stable,
// machine-readable name used by the CLI error JSON.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& message)
      : Error("SyntaxError", message),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

#define LOSSCAPE_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

LOSSCAPE_DEFINE_ERROR(UnknownVariable)
LOSSCAPE_DEFINE_ERROR(InvalidArgument)
LOSSCAPE_DEFINE_ERROR(InvalidRange)
LOSSCAPE_DEFINE_ERROR(LimitExceeded)
LOSSCAPE_DEFINE_ERROR(Unsatisfiable)
LOSSCAPE_DEFINE_ERROR(PrimeImplicantOverflow)
LOSSCAPE_DEFINE_ERROR(ZeroEvidence)
LOSSCAPE_DEFINE_ERROR(NotPossible)
LOSSCAPE_DEFINE_ERROR(InfeasibleInit)
LOSSCAPE_DEFINE_ERROR(InternalError)

#undef LOSSCAPE_DEFINE_ERROR

}  // namespace losscape
