#include "vlgreedy/error.hpp"

namespace vlg {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidExponent: return "invalid-exponent";
    case ErrorKind::AlignmentError: return "alignment-error";
    case ErrorKind::EmptyRegion: return "empty-region";
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidRange: return "invalid-range";
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::ContainmentError: return "containment-error";
    case ErrorKind::ResolutionError: return "resolution-error";
    case ErrorKind::UndefinedRatio: return "undefined-ratio";
    case ErrorKind::CapacityError: return "capacity-error";
    case ErrorKind::FitError: return "fit-error";
    case ErrorKind::ConfigError: return "config-error";
  }
  return "error";
}

}  // namespace vlg
