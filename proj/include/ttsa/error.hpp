#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ttsa {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  DivergentRatio,
  NonFinite,
  SingularPencil,
  NotPSD,
  SingularSystem,
  SingularA22,
  SingularDelta,
  NotHurwitz,
  AssumptionViolation,
  SingularStep,
  Diverged,
  InsufficientSamples,
  SingularPrediction,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library. `step` is set for errors tied to an
// iteration index (SingularStep, Diverged); `replica` for ensemble failures.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what,
        std::optional<std::uint64_t> step = std::nullopt,
        std::optional<std::uint64_t> replica = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::uint64_t> step() const noexcept { return step_; }
  std::optional<std::uint64_t> replica() const noexcept { return replica_; }

 private:
  ErrorKind kind_;
  std::optional<std::uint64_t> step_;
  std::optional<std::uint64_t> replica_;
};

}  // namespace ttsa
