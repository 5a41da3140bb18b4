#pragma once

#include <stdexcept>
#include <string>

namespace stpm {

// Base of every error thrown by the library. The CLI maps subclasses onto
// process exit codes (see exit_code()).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments, configs or files.
class UsageError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public UsageError {
 public:
  using UsageError::UsageError;
};

// Two inputs disagree in length or pattern dimensions.
class DimensionError : public UsageError {
 public:
  using UsageError::UsageError;
};

// A workload does not fit the array or string it is mapped onto.
class CapacityError : public Error {
 public:
  CapacityError(std::string dimension, const std::string& what)
      : Error(what), dimension_(std::move(dimension)) {}

  // Which bound was violated ("wl", "blocks", "slots", ...).
  const std::string& dimension() const noexcept { return dimension_; }

 private:
  std::string dimension_;
};

// The in-memory matcher and the brute-force reference produced different
// match sets.
class DisagreementError : public Error {
 public:
  using Error::Error;
};

enum class ExitCode : int { kOk = 0, kUsage = 1, kCapacity = 2, kDisagreement = 3 };

inline ExitCode exit_code(const Error& e) noexcept {
  if (dynamic_cast<const CapacityError*>(&e) != nullptr) return ExitCode::kCapacity;
  if (dynamic_cast<const DisagreementError*>(&e) != nullptr) return ExitCode::kDisagreement;
  return ExitCode::kUsage;
}

}  // namespace stpm
