#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ttsa {

enum class ErrorKind {
  InvalidArgument,
  Config,
  SingularMatrix,
  NotPositive,
  NotErgodic,
  InsufficientData,
  NonPositive,
  NonFinite,
  NotFound,
  Diverges,
  Overflow,
  BudgetExceeded,
  FeatureScale,
};

std::string_view to_string(ErrorKind kind);

// Numerical failures map to CLI exit code 3; argument and config
// problems map to 2.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ttsa
