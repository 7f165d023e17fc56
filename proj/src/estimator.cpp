#include "ttsa/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void require_rows(const Matrix& a, const Matrix& b, Eigen::Index min_rows,
                  const char* what) {
  if (a.rows() != b.rows())
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": theta and r sample counts differ");
  if (a.rows() < min_rows)
    throw Error(ErrorKind::InsufficientSamples,
                std::string(what) + ": need at least " +
                    std::to_string(min_rows) + " samples, got " +
                    std::to_string(a.rows()));
}

// Mean of x_r x_r' style products, accumulated in replica order.
Matrix mean_outer(const Matrix& x, const Matrix& y) {
  Matrix acc = Matrix::Zero(x.cols(), y.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    acc.noalias() += x.row(r).transpose() * y.row(r);
  return acc / static_cast<double>(x.rows());
}

Matrix outer_entry_se(const Matrix& x, const Matrix& y) {
  const auto n = x.rows();
  const Matrix mean = mean_outer(x, y);
  Matrix ss = Matrix::Zero(x.cols(), y.cols());
  for (Eigen::Index r = 0; r < n; ++r) {
    const Matrix dev = x.row(r).transpose() * y.row(r) - mean;
    ss.array() += dev.array().square();
  }
  const double nn = static_cast<double>(n);
  return (ss / (nn - 1.0)).cwiseSqrt() / std::sqrt(nn);
}

}  // namespace

ScaledCovariances scaled_covariances(const Matrix& theta_hat,
                                     const Matrix& r_hat, double beta,
                                     double gamma) {
  require_rows(theta_hat, r_hat, 2, "scaled_covariances");
  return {symmetrize(mean_outer(theta_hat, theta_hat)) / beta,
          mean_outer(theta_hat, r_hat) / beta,
          symmetrize(mean_outer(r_hat, r_hat)) / gamma};
}

ScaledCovariances standard_errors(const Matrix& theta_hat, const Matrix& r_hat,
                                  double beta, double gamma) {
  require_rows(theta_hat, r_hat, 30, "standard_errors");
  return {outer_entry_se(theta_hat, theta_hat) / beta,
          outer_entry_se(theta_hat, r_hat) / beta,
          outer_entry_se(r_hat, r_hat) / gamma};
}

double chi_square_cdf(double x, double dof) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(0.5 * dof, 0.5 * x);
}

double ks_statistic_chi_square(std::vector<double> samples, double dof) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = chi_square_cdf(samples[i], dof);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - f, f - lo});
  }
  return d;
}

NormalityThresholds NormalityThresholds::for_samples(std::size_t n) {
  const double nn = static_cast<double>(n);
  return {1.63 / std::sqrt(nn), 4.0 * std::sqrt(6.0 / nn),
          4.0 * std::sqrt(24.0 / nn)};
}

bool passes(const NormalityReport& r, const NormalityThresholds& t) {
  if (!(r.ks_statistic < t.ks)) return false;
  for (Eigen::Index i = 0; i < r.skewness.size(); ++i) {
    if (!(std::abs(r.skewness(i)) < t.skewness)) return false;
    if (!(std::abs(r.excess_kurtosis(i)) < t.kurtosis)) return false;
  }
  return true;
}

bool passes(const NormalityReport& r) {
  return passes(r, NormalityThresholds::for_samples(r.sample_count));
}

NormalityReport normality_check(const Matrix& theta_hat, double beta,
                                const Matrix& sigma11_pred) {
  const auto n_samples = theta_hat.rows();
  const auto dim = theta_hat.cols();
  if (n_samples < 100)
    throw Error(ErrorKind::InsufficientSamples,
                "normality_check: need at least 100 samples, got " +
                    std::to_string(n_samples));
  if (sigma11_pred.rows() != dim || sigma11_pred.cols() != dim)
    throw Error(ErrorKind::InvalidArgument,
                "normality_check: prediction has wrong size");
  Eigen::LLT<Matrix> llt(symmetrize(sigma11_pred));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::SingularPrediction,
                "normality_check: predicted covariance is not positive definite");

  // Whitened samples w_i = L^{-1} beta^{-1/2} th_i, one per row.
  const Matrix x = theta_hat / std::sqrt(beta);
  const Matrix w =
      llt.matrixL().solve(x.transpose()).transpose();

  NormalityReport report;
  report.sample_count = static_cast<std::size_t>(n_samples);
  std::vector<double> d2(static_cast<std::size_t>(n_samples));
  for (Eigen::Index i = 0; i < n_samples; ++i)
    d2[static_cast<std::size_t>(i)] = w.row(i).squaredNorm();
  report.ks_statistic = ks_statistic_chi_square(std::move(d2),
                                                static_cast<double>(dim));

  report.skewness.resize(dim);
  report.excess_kurtosis.resize(dim);
  const double nn = static_cast<double>(n_samples);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto col = w.col(j);
    const double mu = col.mean();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Eigen::Index i = 0; i < n_samples; ++i) {
      const double e = col(i) - mu;
      const double e2 = e * e;
      m2 += e2;
      m3 += e2 * e;
      m4 += e2 * e2;
    }
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (m2 > 0.0) {
      report.skewness(j) = m3 / std::pow(m2, 1.5);
      report.excess_kurtosis(j) = m4 / (m2 * m2) - 3.0;
    } else {
      report.skewness(j) = std::numeric_limits<double>::quiet_NaN();
      report.excess_kurtosis(j) = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return report;
}

std::string NormalityReport::to_key_value() const {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto t = NormalityThresholds::for_samples(sample_count);
  os << "sample_count=" << sample_count << '\n'
     << "ks_statistic=" << ks_statistic << '\n'
     << "ks_threshold=" << t.ks << '\n';
  for (Eigen::Index i = 0; i < skewness.size(); ++i)
    os << "skewness_" << i << '=' << skewness(i) << '\n';
  os << "skewness_threshold=" << t.skewness << '\n';
  for (Eigen::Index i = 0; i < excess_kurtosis.size(); ++i)
    os << "excess_kurtosis_" << i << '=' << excess_kurtosis(i) << '\n';
  os << "excess_kurtosis_threshold=" << t.kurtosis << '\n'
     << "passed=" << (passes(*this) ? "true" : "false") << '\n';
  return os.str();
}

std::string NormalityReport::csv_header(Eigen::Index n) {
  std::ostringstream os;
  os << "sample_count,ks_statistic";
  for (Eigen::Index i = 0; i < n; ++i) os << ",skewness_" << i;
  for (Eigen::Index i = 0; i < n; ++i) os << ",excess_kurtosis_" << i;
  os << ",passed";
  return os.str();
}

std::string NormalityReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(17) << sample_count << ',' << ks_statistic;
  for (Eigen::Index i = 0; i < skewness.size(); ++i) os << ',' << skewness(i);
  for (Eigen::Index i = 0; i < excess_kurtosis.size(); ++i)
    os << ',' << excess_kurtosis(i);
  os << ',' << (passes(*this) ? 1 : 0);
  return os.str();
}


bool within_tolerance(const Matrix& estimate, const Matrix& prediction,
                      const Matrix& se, double rel, double k_se,
                      ToleranceRule rule) {
  if (estimate.rows() != prediction.rows() || estimate.cols() != prediction.cols() ||
      se.rows() != prediction.rows() || se.cols() != prediction.cols())
    throw Error(ErrorKind::InvalidArgument, "within_tolerance: shape mismatch");
  for (Eigen::Index i = 0; i < estimate.rows(); ++i)
    for (Eigen::Index j = 0; j < estimate.cols(); ++j) {
      const double gap = std::abs(estimate(i, j) - prediction(i, j));
      const double a = rel * std::abs(prediction(i, j));
      const double b = k_se * se(i, j);
      const double bound = rule == ToleranceRule::Sum ? a + b : std::max(a, b);
      if (!(gap <= bound)) return false;
    }
  return true;
}

}  // namespace ttsa
