#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vlg {

enum class ErrorKind {
  InvalidExponent,
  AlignmentError,
  EmptyRegion,
  OutOfDomain,
  InvalidParameter,
  InvalidRange,
  InvalidInput,
  ContainmentError,
  ResolutionError,
  UndefinedRatio,
  CapacityError,
  FitError,
  ConfigError,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the extremal family constructors; carries the largest N that fits.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t max_feasible)
      : Error(ErrorKind::CapacityError, what), max_feasible_(max_feasible) {}

  std::size_t max_feasible() const noexcept { return max_feasible_; }

 private:
  std::size_t max_feasible_;
};

}  // namespace vlg
