#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ttsa/engine.hpp"
#include "ttsa/estimator.hpp"
#include "ttsa/model.hpp"
#include "ttsa/schedules.hpp"
#include "ttsa/theory.hpp"

namespace ttsa {

/// Command parameters that may live in the config under "run" and be
/// overridden on the command line.
struct RunParams {
  std::uint64_t replicas = 4000;
  std::uint64_t steps = 100000;
  std::vector<std::uint64_t> checkpoints;  // empty: geometric grid
  std::uint64_t seed = 1;
  std::uint64_t stride = 1000;
  unsigned jobs = 1;
  std::string out;

  bool operator==(const RunParams&) const = default;
};

/// Parsed config file. The system itself is kept as raw matrices so that
/// assumption failures (singular A22, indefinite noise) can be reported
/// instead of aborting the parse.
struct RunConfig {
  Matrix a11, a12, a21, a22;
  Vector b1, b2;
  Matrix gamma11, gamma12, gamma22;
  NoiseDistribution distribution = NoiseDistribution::Gaussian;
  ScheduleParams beta;
  ScheduleParams gamma;
  std::optional<Vector> init_theta;
  std::optional<Vector> init_r;
  RunParams run;

  bool operator==(const RunConfig&) const;

  /// Throws ttsa::Error from the SystemSpec constructor.
  SystemSpec system() const;
  /// Throws ttsa::Error for invalid or incompatible schedules.
  SchedulePair schedules() const;
  InitialState initial_state() const;
};

/// Throws Error(Parse) on malformed JSON, missing keys or shape mismatches.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical serialization; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& config);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const char* name);
Vector vector_from_json(const nlohmann::json& j, const char* name);

/// Averaging demonstration input: {"A": [[..]], "b": [..], "Gamma": [[..]],
/// optional "gamma": {base, tau, alpha}, optional "run": {...}}.
struct AveragingConfig {
  Matrix a;
  Vector b;
  Matrix gamma;
  ScheduleParams fast{1.0, 1.0, 0.7};
  RunParams run;
};
AveragingConfig parse_averaging_config(const nlohmann::json& j);
AveragingConfig load_averaging_config(const std::string& path);

// CSV helpers. Floats are written with 17 significant digits.

std::string format_double(double v);

/// Rows "name,row,col,value" for a named matrix.
void write_matrix_rows(std::ostream& os, const std::string& name,
                       const Matrix& m);

/// Named matrices parsed back from "name,row,col,value" rows (header
/// optional). Order of first appearance is preserved.
std::vector<std::pair<std::string, Matrix>> read_matrix_rows(std::istream& is);

struct PredictionBundle {
  CovariancePrediction full;
  Matrix sigma11_reduced;
  OptimalGain optimal;
};

void write_prediction_csv(std::ostream& os, const PredictionBundle& p);
PredictionBundle read_prediction_csv(std::istream& is);
nlohmann::json prediction_to_json(const PredictionBundle& p);

void write_trajectory_csv(std::ostream& os,
                          const std::vector<TrajectoryState>& states);
void write_propagation_csv(std::ostream& os,
                           const std::vector<CovarianceCheckpoint>& rows);

struct EnsembleStatsRow {
  std::uint64_t k = 0;
  double beta = 0.0;
  double gamma = 0.0;
  ScaledCovariances estimate;
  std::optional<ScaledCovariances> se;
};
void write_ensemble_csv(std::ostream& os,
                        const std::vector<EnsembleStatsRow>& rows);

}  // namespace ttsa
