#include "vscsim/errors.hpp"

namespace vscsim {

std::string_view category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::InvalidArgument: return "invalid-argument";
    case ErrorCategory::Config: return "config";
    case ErrorCategory::Parse: return "parse";
    case ErrorCategory::Validation: return "validation";
    case ErrorCategory::Io: return "io";
    case ErrorCategory::Capability: return "capability";
    case ErrorCategory::Protocol: return "protocol";
  }
  return "unknown";
}

}  // namespace vscsim
