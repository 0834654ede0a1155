#pragma once

#include <stdexcept>
#include <string>

namespace ldpbdp {

// Raised when an input violates a documented precondition. The CLI maps it to
// exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// A rate function returned a non-finite or negative value at a visited state.
class ModelEvaluationError : public std::runtime_error {
 public:
  ModelEvaluationError(long long state, const std::string& message)
      : std::runtime_error("state " + std::to_string(state) + ": " + message), state_(state) {}

  long long state() const noexcept { return state_; }

 private:
  long long state_;
};

}  // namespace ldpbdp
