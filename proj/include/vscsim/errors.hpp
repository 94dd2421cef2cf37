#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vscsim {

/// Machine-readable error categories. The CLI maps each to its own exit code.
enum class ErrorCategory {
  InvalidArgument = 2,
  Config = 3,
  Parse = 4,
  Validation = 5,
  Io = 6,
  Capability = 7,
  Protocol = 8,
};

std::string_view category_name(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorCategory::InvalidArgument, w) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCategory::Config, w) {}
};
/// Malformed input text (ragged rows, non-numeric fields, bad headers).
struct ParseError : Error {
  explicit ParseError(const std::string& w) : Error(ErrorCategory::Parse, w) {}
};
/// Well-formed input that breaks a domain invariant (e.g. negative energy).
struct ValidationError : Error {
  explicit ValidationError(const std::string& w) : Error(ErrorCategory::Validation, w) {}
};
struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCategory::Io, w) {}
};
/// Request exceeds what a solver is configured to handle (e.g. too many cells).
struct CapabilityError : Error {
  explicit CapabilityError(const std::string& w) : Error(ErrorCategory::Capability, w) {}
};
/// API called out of order (e.g. a learning update without a preceding select).
struct ProtocolError : Error {
  explicit ProtocolError(const std::string& w) : Error(ErrorCategory::Protocol, w) {}
};

}  // namespace vscsim
