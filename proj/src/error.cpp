#include "ttsa/error.hpp"

namespace ttsa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::DivergentRatio: return "DivergentRatio";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::SingularPencil: return "SingularPencil";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::SingularA22: return "SingularA22";
    case ErrorKind::SingularDelta: return "SingularDelta";
    case ErrorKind::NotHurwitz: return "NotHurwitz";
    case ErrorKind::AssumptionViolation: return "AssumptionViolation";
    case ErrorKind::SingularStep: return "SingularStep";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::SingularPrediction: return "SingularPrediction";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what,
             std::optional<std::uint64_t> step,
             std::optional<std::uint64_t> replica)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind),
      step_(step),
      replica_(replica) {}

}  // namespace ttsa
