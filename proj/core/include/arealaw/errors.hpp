#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace arealaw {

enum class ErrorKind {
  Domain,        // input outside an operation's mathematical domain
  Parameter,     // invalid construction parameter
  Capacity,      // dense dimension over the configured cap
  Convergence,   // iterative method did not converge
  Coverage,      // spectrum does not cover the requested range
  Precondition,  // caller-side precondition violated
  Configuration, // scenario/config validation
  Numeric,       // numeric failure (bracketing, quadrature disagreement)
  Corrupt,       // unreadable or inconsistent cache entry
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

#define AREALAW_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

AREALAW_DEFINE_ERROR(DomainError, Domain)
AREALAW_DEFINE_ERROR(ParameterError, Parameter)
AREALAW_DEFINE_ERROR(CapacityError, Capacity)
AREALAW_DEFINE_ERROR(ConvergenceError, Convergence)
AREALAW_DEFINE_ERROR(CoverageError, Coverage)
AREALAW_DEFINE_ERROR(PreconditionError, Precondition)
AREALAW_DEFINE_ERROR(ConfigError, Configuration)
AREALAW_DEFINE_ERROR(NumericError, Numeric)
AREALAW_DEFINE_ERROR(CorruptError, Corrupt)

#undef AREALAW_DEFINE_ERROR

}  // namespace arealaw
