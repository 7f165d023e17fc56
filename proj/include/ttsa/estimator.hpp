#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ttsa/linalg.hpp"

namespace ttsa {

/// beta^{-1} mean(th th'), beta^{-1} mean(th r'), gamma^{-1} mean(r r').
/// Moments are uncentered: hat samples are already deviations from the
/// deterministic fixed point.
struct ScaledCovariances {
  Matrix sigma11;
  Matrix sigma12;
  Matrix sigma22;
};

/// Rows of theta_hat / r_hat are replicas. Throws
/// Error(InsufficientSamples) below 2 rows.
ScaledCovariances scaled_covariances(const Matrix& theta_hat,
                                     const Matrix& r_hat, double beta,
                                     double gamma);

/// Entrywise standard errors of scaled_covariances: sample standard
/// deviation of the per-replica outer-product entry over sqrt(N), times the
/// same scaling. Needs at least 30 rows.
ScaledCovariances standard_errors(const Matrix& theta_hat, const Matrix& r_hat,
                                  double beta, double gamma);

struct NormalityReport {
  double ks_statistic = 0.0;
  Vector skewness;
  Vector excess_kurtosis;
  std::size_t sample_count = 0;

  std::string to_key_value() const;
  static std::string csv_header(Eigen::Index n);
  std::string csv_row() const;
};

struct NormalityThresholds {
  double ks = 0.0;        // 1.63 / sqrt(N), the 1% KS critical value
  double skewness = 0.0;  // 4 sqrt(6/N)
  double kurtosis = 0.0;  // 4 sqrt(24/N)

  static NormalityThresholds for_samples(std::size_t n);
};

bool passes(const NormalityReport& report, const NormalityThresholds& t);
bool passes(const NormalityReport& report);

/// Standardizes x_i = beta^{-1/2} th_i, compares d_i^2 = x_i' S^{-1} x_i to
/// the chi-square law with n degrees of freedom (KS distance) and reports
/// per-coordinate skewness and excess kurtosis of the whitened x.
/// Throws Error(InsufficientSamples) below 100 rows and
/// Error(SingularPrediction) if sigma11_pred is not positive definite.
NormalityReport normality_check(const Matrix& theta_hat, double beta,
                                const Matrix& sigma11_pred);

/// sup_x |F_N(x) - F(x)| for the chi-square law with dof degrees of freedom.
double ks_statistic_chi_square(std::vector<double> samples, double dof);

double chi_square_cdf(double x, double dof);


/// How a relative band and a standard-error band combine per entry.
enum class ToleranceRule {
  Sum,  // |est - pred| <= rel |pred| + k se
  Max,  // |est - pred| <= max(rel |pred|, k se)
};

/// Entrywise tolerance check of an estimate against a prediction.
bool within_tolerance(const Matrix& estimate, const Matrix& prediction,
                      const Matrix& se, double rel, double k_se,
                      ToleranceRule rule);

}  // namespace ttsa
