#include "arealaw/errors.hpp"

namespace arealaw {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::Capacity: return "capacity error";
    case ErrorKind::Convergence: return "convergence error";
    case ErrorKind::Coverage: return "coverage error";
    case ErrorKind::Precondition: return "precondition error";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Numeric: return "numeric error";
    case ErrorKind::Corrupt: return "corrupt entry";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

}  // namespace arealaw
