#pragma once

#include <cstdint>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/model.hpp"
#include "ttsa/schedules.hpp"

namespace ttsa {

/// Limits of beta_k^{-1} E[th th'], beta_k^{-1} E[th rh'], gamma_k^{-1} E[rh rh']
/// for the epsilon = 0 regime, plus the objects they are built from.
struct CovariancePrediction {
  Matrix sigma11;
  Matrix sigma12;
  Matrix sigma22;
  Matrix delta;
  Matrix q;  // noise-equivalent covariance of V - A12 A22^{-1} W
  double beta_bar = 0.0;

  /// [[S11, S12], [S12^T, S22]]
  Matrix block() const;
};

/// Solves the coupled system
///   A22 S22 + S22 A22' = G22
///   A12 S22 + S12 A22' = G12
///   Delta S11 + S11 Delta' - beta_bar S11 + A12 S21 + S12 A12' = G11
/// in that order. Throws Error(AssumptionViolation) if -A22 or
/// -(Delta - beta_bar/2 I) is not Hurwitz.
CovariancePrediction predict_full(const SystemSpec& spec, double beta_bar);

/// Solves Delta S + S Delta' - beta_bar S = Q directly, with Q the
/// noise-equivalent covariance. Agrees with predict_full(...).sigma11.
Matrix predict_reduced(const SystemSpec& spec, double beta_bar);

/// Q = G11 - C G21 - G12 C' + C G22 C' with C = A12 A22^{-1}, i.e. the
/// covariance of V - C W.
Matrix noise_equivalent_covariance(const SystemSpec& spec);

struct OptimalGain {
  Matrix sigma11;  // Delta^{-1} Q Delta^{-T}
  Matrix g1;       // Delta^{-1}
  Matrix g;        // A^{-1}
};

/// Best achievable asymptotic covariance of beta_k^{-1/2} theta_k over gain
/// matrices, with the gains attaining it. Throws Error(SingularDelta) or
/// Error(SingularSystem).
OptimalGain optimal_gain_covariance(const SystemSpec& spec);

/// Asymptotic covariance of the slow iterate when its update is
/// premultiplied by G1. Eliminating the fast iterate leaves
///   theta <- theta + beta_k G1 (-Delta theta + V - A12 A22^{-1} W),
/// whose scaled covariance solves
///   (G1 Delta) S + S (G1 Delta)' - beta_bar S = G1 Q G1'.
/// Throws Error(AssumptionViolation) unless -(G1 Delta - beta_bar/2 I) is
/// Hurwitz.
Matrix gained_reduced_covariance(const SystemSpec& spec, const Matrix& g1,
                                 double beta_bar);

/// Residuals of the three block equations above for a candidate solution,
/// each measured as max-abs entry.
struct PredictionResiduals {
  double eq11 = 0.0;
  double eq12 = 0.0;
  double eq22 = 0.0;
};
PredictionResiduals prediction_residuals(const SystemSpec& spec,
                                         const CovariancePrediction& p);

/// Decoupling sequence L_k (m x n) chosen so that the transformed fast
/// iterate r~ = L_k th + rh does not see the slow one:
///   L_{k0} = 0,
///   L_{k+1} = (L_k - gamma_k A22 L_k + beta_k A22^{-1} A21 B_k)
///             (I - beta_k B_k)^{-1},   B_k = Delta - A12 L_k.
/// values[i] is L_{k0+i} for i = 0 .. K-k0; norms[i] its spectral norm.
struct LSequence {
  std::uint64_t k0 = 0;
  std::vector<Matrix> values;
  std::vector<double> norms;

  std::uint64_t last_index() const { return k0 + values.size() - 1; }
  const Matrix& at(std::uint64_t k) const;
};

/// Throws Error(SingularStep, step=k) when I - beta_k B_k is numerically
/// singular.
LSequence l_sequence(const SystemSpec& spec, const SchedulePair& pair,
                     std::uint64_t k0, std::uint64_t last);

/// Tries k0 = 0, 1, 2, 4, ..., 1024 until the recursion is well defined.
LSequence l_sequence_auto(const SystemSpec& spec, const SchedulePair& pair,
                          std::uint64_t last);

}  // namespace ttsa
