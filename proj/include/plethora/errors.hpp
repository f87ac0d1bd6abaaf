#pragma once

#include <stdexcept>
#include <string>

namespace plethora {

// Structured computational failures. Callers that want machine-readable
// reports catch these by type; the CLI maps them to exit code 1.

struct NonUnitError : std::runtime_error {
  explicit NonUnitError(const std::string& what) : std::runtime_error(what) {}
};

struct NotDivisibleError : std::runtime_error {
  explicit NotDivisibleError(const std::string& what) : std::runtime_error(what) {}
};

struct NotDivisibleByDError : std::runtime_error {
  std::string obstruction;
  explicit NotDivisibleByDError(const std::string& what, std::string obstr = {})
      : std::runtime_error(what), obstruction(std::move(obstr)) {}
};

struct WindowExceededError : std::runtime_error {
  explicit WindowExceededError(const std::string& what) : std::runtime_error(what) {}
};

struct SplittingFailureError : std::runtime_error {
  explicit SplittingFailureError(const std::string& what) : std::runtime_error(what) {}
};

struct OracleMismatchError : std::runtime_error {
  explicit OracleMismatchError(const std::string& what) : std::runtime_error(what) {}
};

// Stability protocol violation: a result changed when recomputed at higher
// truncation precision. Always a hard failure.
struct StabilityError : std::runtime_error {
  explicit StabilityError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace plethora
