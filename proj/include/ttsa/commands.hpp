#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "ttsa/config.hpp"

namespace ttsa {

enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitFailure = 2,       // assumption or tolerance failure
  kExitInconsistent = 3,  // solver disagreement
};

/// Mode-specific pass thresholds.
inline constexpr double kPropagateTolerance = 0.05;
inline constexpr double kEnsembleRelTolerance = 0.10;
inline constexpr double kEnsembleSeTolerance = 4.0;
inline constexpr double kTransformedTolerance = 1e-8;
inline constexpr double kPredictConsistency = 1e-8;

/// Command-line overrides for the config's "run" block.
struct CommandOptions {
  std::string config_path;
  std::string mode;
  std::optional<std::uint64_t> replicas;
  std::optional<std::uint64_t> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> stride;
  std::optional<unsigned> jobs;
  std::string out;
  std::string format = "csv";
  bool skip_validate = false;
};

/// Applies CommandOptions overrides on top of the config's run block.
RunParams effective_run(const RunParams& base, const CommandOptions& opts);

/// Validation of a raw config: schedule checks, system construction
/// failures (reported as failed checks) and the matrix assumptions.
ValidationReport validate_config(const RunConfig& config);

int cmd_validate(const CommandOptions& opts, std::ostream& out,
                 std::ostream& err);
int cmd_predict(const CommandOptions& opts, std::ostream& out,
                std::ostream& err);
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_averaging(const CommandOptions& opts, std::ostream& out,
                  std::ostream& err);

/// Polyak-Ruppert demonstration: prediction A^{-1} Gamma A^{-T} against the
/// ensemble estimate of (k+1) E[theta^ theta^'] at k = K.
struct AveragingOutcome {
  Matrix predicted;    // predict_reduced with beta_bar = 1
  Matrix closed_form;  // A^{-1} Gamma A^{-T}
  Matrix empirical;
  Matrix standard_error;
  std::uint64_t steps = 0;
  std::uint64_t replicas = 0;
  bool passed = false;
};

/// Slow schedule 1/(k+1), fast schedule from the config.
AveragingOutcome run_averaging(const AveragingConfig& config,
                               const RunParams& run);

}  // namespace ttsa
