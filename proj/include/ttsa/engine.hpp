#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/model.hpp"
#include "ttsa/noise.hpp"
#include "ttsa/schedules.hpp"
#include "ttsa/theory.hpp"

namespace ttsa {

/// Iterates whose Euclidean norm exceeds this abort with Error(Diverged).
inline constexpr double kDivergenceNorm = 1e12;

struct TrajectoryState {
  std::uint64_t k = 0;
  Vector theta;
  Vector r;
};

struct InitialState {
  Vector theta;
  Vector r;
};

/// The origin, which is the default starting point.
InitialState origin(const SystemSpec& spec);

/// theta <- theta + beta_k G1 (...); r keeps its ordinary update.
struct SlowGain {
  Matrix g1;
};
/// z <- z + beta_k G (b - A z + U_k) with gamma_k replaced by beta_k.
struct FullGain {
  Matrix g;
};
using Gain = std::variant<SlowGain, FullGain>;

/// Runs K steps. States are recorded at k = 0, stride, 2 stride, ... and at
/// k = K. Step k consumes noise.draw(k).
std::vector<TrajectoryState> simulate(const SystemSpec& spec,
                                      const SchedulePair& pair,
                                      const InitialState& init,
                                      std::uint64_t steps, NoiseStream& noise,
                                      std::uint64_t record_stride = 1);

std::vector<TrajectoryState> simulate_gained(
    const SystemSpec& spec, const SchedulePair& pair, const Gain& gain,
    const InitialState& init, std::uint64_t steps, NoiseStream& noise,
    std::uint64_t record_stride = 1);

/// (theta~, r~) = (theta^, L_k theta^ + r^).
struct TransformedState {
  std::uint64_t k = 0;
  Vector theta;
  Vector r;
};

/// Runs the decoupled recursion
///   th~ <- th~ - beta_k (B11 th~ + A12 r~) + beta_k V_k
///   r~  <- r~ - gamma_k B22 r~ + gamma_k W_k + beta_k M_{k+1} V_k
/// with B11 = Delta - A12 L_k, M_k = L_k + A22^{-1} A21,
/// B22 = (beta_k/gamma_k) M_{k+1} A12 + A22, starting at k0 = lseq.k0 from
/// the hat coordinates of `at_k0` (an original-coordinate state at step k0).
std::vector<TransformedState> simulate_transformed(
    const SystemSpec& spec, const SchedulePair& pair, const LSequence& lseq,
    const TrajectoryState& at_k0, std::uint64_t steps, NoiseStream& noise,
    std::uint64_t record_stride = 1);

/// Inverse of the transformation: back to original (theta, r).
TrajectoryState reconstruct(const SystemSpec& spec, const FixedPoint& fp,
                            const LSequence& lseq, const TransformedState& s);

struct TransformedCheck {
  double max_relative_error = 0.0;  // |x_rec - x| / (1 + |x|), max over k
  std::uint64_t k0 = 0;
  std::uint64_t steps = 0;
  double final_l_norm = 0.0;
};

/// Runs simulate and simulate_transformed on the same noise stream and
/// compares them at every step in [k0, K].
TransformedCheck transformed_check(const SystemSpec& spec,
                                   const SchedulePair& pair,
                                   const InitialState& init,
                                   std::uint64_t steps, NoiseStream& noise);

struct CovarianceCheckpoint {
  std::uint64_t k = 0;
  double beta = 0.0;
  double gamma = 0.0;
  Matrix sigma11;
  Matrix sigma12;
  Matrix sigma22;

  Matrix block() const;
};

/// Exact second-moment recursion of z^ = z - z*:
///   C_{k+1} = (I - D_k A) C_k (I - D_k A)' + D_k G D_k',
///   D_k = diag(beta_k I_n, gamma_k I_m),
/// reported at each checkpoint in hat coordinates and scaled by
/// beta_k^{-1} (11 and 12 blocks) and gamma_k^{-1} (22 block).
std::vector<CovarianceCheckpoint> propagate_covariance(
    const SystemSpec& spec, const SchedulePair& pair, const Matrix& c0,
    std::uint64_t steps, std::vector<std::uint64_t> checkpoints);

/// Second moment of z^_0 for a deterministic start.
Matrix initial_second_moment(const SystemSpec& spec, const InitialState& init);

/// {10^2, 10^3, ..., K}, always ending at K.
std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t steps);

struct EnsembleOptions {
  std::uint64_t replicas = 1000;
  std::uint64_t steps = 10000;
  std::vector<std::uint64_t> checkpoints;  // empty: geometric grid
  std::uint64_t base_seed = 1;
  unsigned jobs = 1;  // 0: hardware concurrency
  std::optional<InitialState> init;  // default: origin
  std::optional<Gain> gain;
};

/// Samples of (theta^, r^) across replicas at each checkpoint. Row i of each
/// sample matrix belongs to replica i.
struct EnsembleResult {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> beta;
  std::vector<double> gamma;
  std::vector<Matrix> theta_hat;  // replicas x n
  std::vector<Matrix> r_hat;      // replicas x m

  std::size_t replicas() const {
    return theta_hat.empty() ? 0 : static_cast<std::size_t>(theta_hat[0].rows());
  }
  bool operator==(const EnsembleResult&) const;
};

/// Replica i uses NoiseStream(base_seed, i). Results do not depend on jobs.
/// Throws Error(Diverged) carrying the lowest failing replica id.
EnsembleResult run_ensemble(const SystemSpec& spec, const SchedulePair& pair,
                            const EnsembleOptions& options);

}  // namespace ttsa
