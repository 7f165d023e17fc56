#pragma once

#include <utility>

#include "ttsa/linalg.hpp"
#include "ttsa/schedules.hpp"
#include "ttsa/validation.hpp"

namespace ttsa {

enum class NoiseDistribution { Gaussian, ScaledRademacher };

const char* to_string(NoiseDistribution d);
NoiseDistribution parse_distribution(const std::string& name);

/// Covariance of the joint noise (V_k, W_k). gamma12 is E[V W^T].
struct NoiseSpec {
  Matrix gamma11;
  Matrix gamma12;
  Matrix gamma22;
  NoiseDistribution distribution = NoiseDistribution::Gaussian;

  /// [[G11, G12], [G12^T, G22]]
  Matrix joint() const;
};

/// Coupled linear iteration
///   theta <- theta + beta_k (b1 - A11 theta - A12 r + V_k)
///   r     <- r     + gamma_k (b2 - A21 theta - A22 r + W_k)
///
/// Construction checks dimensions, A22 invertibility (condition number at
/// most 1e12) and that the joint noise covariance is PSD.
class SystemSpec {
 public:
  SystemSpec(Matrix a11, Matrix a12, Matrix a21, Matrix a22, Vector b1,
             Vector b2, NoiseSpec noise);

  Eigen::Index n() const noexcept { return a11_.rows(); }
  Eigen::Index m() const noexcept { return a22_.rows(); }

  const Matrix& a11() const noexcept { return a11_; }
  const Matrix& a12() const noexcept { return a12_; }
  const Matrix& a21() const noexcept { return a21_; }
  const Matrix& a22() const noexcept { return a22_; }
  const Vector& b1() const noexcept { return b1_; }
  const Vector& b2() const noexcept { return b2_; }
  const NoiseSpec& noise() const noexcept { return noise_; }

  const Matrix& a22_inverse() const noexcept { return a22_inv_; }
  /// Full (n+m)x(n+m) block matrix A.
  Matrix block_matrix() const;
  /// Stacked offset (b1, b2).
  Vector block_offset() const;

 private:
  Matrix a11_, a12_, a21_, a22_;
  Vector b1_, b2_;
  NoiseSpec noise_;
  Matrix a22_inv_;
};

inline constexpr double kMaxA22Condition = 1e12;

struct FixedPoint {
  Vector theta;
  Vector r;
};

/// Unique solution of A11 theta + A12 r = b1, A21 theta + A22 r = b2.
/// Throws Error(SingularSystem).
FixedPoint fixed_point(const SystemSpec& spec);

/// A11 - A12 A22^{-1} A21.
Matrix delta_matrix(const SystemSpec& spec);

/// Reports -A22 Hurwitz, -Delta Hurwitz, -(Delta - beta_bar/2 I) Hurwitz,
/// joint noise PSD, merged with the schedule checks.
ValidationReport validate_system(const SystemSpec& spec,
                                 const SchedulePair& pair);
ValidationReport validate_system(const SystemSpec& spec, double beta_bar);

/// Polyak-Ruppert averaging r <- r + gamma_k (b - A r + W),
/// theta <- theta + beta_k (r - theta) written as a two-time-scale system.
/// Throws Error(NotHurwitz) unless -A is Hurwitz.
SystemSpec averaging_system(const Matrix& a, const Vector& b,
                            const Matrix& gamma);

struct HatState {
  Vector theta;  // theta - theta*
  Vector r;      // r - A22^{-1}(b2 - A21 theta)
};

HatState hat_transform(const SystemSpec& spec, const Vector& theta,
                       const Vector& r);
/// Same, with a precomputed fixed point.
HatState hat_transform(const SystemSpec& spec, const FixedPoint& fp,
                       const Vector& theta, const Vector& r);

}  // namespace ttsa
