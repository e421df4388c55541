#include "ttsa/error.hpp"

namespace ttsa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::NotErgodic: return "NotErgodic";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::NonPositive: return "NonPositive";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::Diverges: return "Diverges";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::FeatureScale: return "FeatureScale";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  return kind != ErrorKind::InvalidArgument && kind != ErrorKind::Config;
}

}  // namespace ttsa
