#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "ttsa/error.hpp"
#include "ttsa/estimator.hpp"

using namespace ttsa;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

Matrix gaussian_samples(test::Rng& rng, Eigen::Index rows, const Matrix& cov) {
  const Matrix f = factor_covariance(cov);
  return test::random_matrix(rng, rows, cov.rows()) * f.transpose();
}

}  // namespace

TEST_CASE("scaled covariances") {
  const auto zero = scaled_covariances(Matrix::Zero(5, 2), Matrix::Zero(5, 3), 0.1, 0.2);
  CHECK(max_abs(zero.sigma11) == 0.0);
  CHECK(max_abs(zero.sigma12) == 0.0);
  CHECK(max_abs(zero.sigma22) == 0.0);
  CHECK(zero.sigma12.rows() == 2);
  CHECK(zero.sigma12.cols() == 3);

  const double a = 0.3;
  Matrix th(2, 1);
  th << a, -a;
  const auto two = scaled_covariances(th, Matrix::Zero(2, 1), a * a, 1.0);
  CHECK(two.sigma11(0, 0) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(kind_of([] { scaled_covariances(Matrix::Zero(1, 1), Matrix::Zero(1, 1), 1, 1); }) ==
        ErrorKind::InsufficientSamples);
}

TEST_CASE("property: permutation invariance and PSD") {
  test::Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix th = test::random_matrix(rng, 200, 3);
    const Matrix rh = test::random_matrix(rng, 200, 2);
    std::vector<Eigen::Index> perm(200);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Matrix pth(200, 3), prh(200, 2);
    for (Eigen::Index i = 0; i < 200; ++i) {
      pth.row(i) = th.row(perm[static_cast<std::size_t>(i)]);
      prh.row(i) = rh.row(perm[static_cast<std::size_t>(i)]);
    }
    const auto a = scaled_covariances(th, rh, 0.01, 0.1);
    const auto b = scaled_covariances(pth, prh, 0.01, 0.1);
    CHECK(relative_frobenius(b.sigma11, a.sigma11) <= 1e-14);
    CHECK(relative_frobenius(b.sigma22, a.sigma22) <= 1e-14);
    CHECK(min_eigenvalue_symmetric(a.sigma11) >= -1e-12);
    CHECK(min_eigenvalue_symmetric(a.sigma22) >= -1e-12);
    // Same rows in the same order: bit-identical.
    CHECK(scaled_covariances(th, rh, 0.01, 0.1).sigma11 == a.sigma11);
  }
}

TEST_CASE("standard errors") {
  const auto constant =
      standard_errors(Matrix::Constant(40, 1, 2.0), Matrix::Constant(40, 1, -1.0), 1, 1);
  CHECK(max_abs(constant.sigma11) == 0.0);
  CHECK(max_abs(constant.sigma22) == 0.0);

  // Variance estimate of N standard normals has SE sqrt(2/N).
  test::Rng rng(42);
  const Eigen::Index n = 100000;
  const double v = 2.5;
  const Matrix x = std::sqrt(v) * test::random_matrix(rng, n, 1);
  const auto se = standard_errors(x, x, 1.0, 1.0);
  CHECK(se.sigma11(0, 0) == doctest::Approx(v * std::sqrt(2.0 / n)).epsilon(0.2));

  CHECK(kind_of([] { standard_errors(Matrix::Zero(10, 1), Matrix::Zero(10, 1), 1, 1); }) ==
        ErrorKind::InsufficientSamples);
}

TEST_CASE("chi-square CDF") {
  // closed forms: dof 2 -> 1 - exp(-x/2); dof 1 -> erf(sqrt(x/2))
  for (double x : {0.1, 1.0, 3.0, 10.0}) {
    CHECK(chi_square_cdf(x, 2) == doctest::Approx(1 - std::exp(-x / 2)).epsilon(1e-12));
    CHECK(chi_square_cdf(x, 1) == doctest::Approx(std::erf(std::sqrt(x / 2))).epsilon(1e-12));
  }
  CHECK(chi_square_cdf(0.0, 3) == 0.0);
  CHECK(chi_square_cdf(-1.0, 3) == 0.0);
}

TEST_CASE("KS statistic") {
  // A single sample at the median of chi-square(2): F = 1/2, D = 1/2.
  CHECK(ks_statistic_chi_square({2 * std::log(2.0)}, 2) == doctest::Approx(0.5));
  // Quantile grid (i - 1/2)/N gives D = 1/(2N).
  std::vector<double> grid;
  const int n = 100;
  for (int i = 1; i <= n; ++i) grid.push_back(-2 * std::log(1 - (i - 0.5) / n));
  CHECK(ks_statistic_chi_square(grid, 2) == doctest::Approx(0.5 / n).epsilon(1e-9));
}

TEST_CASE("normality check") {
  test::Rng rng(43);
  Matrix cov(2, 2);
  cov << 1.5, 0.4, 0.4, 0.8;
  const double beta = 0.01;

  SUBCASE("exact Gaussian passes in nearly every seed") {
    int passed = 0;
    for (int seed = 0; seed < 100; ++seed) {
      test::Rng r(1000 + static_cast<std::uint64_t>(seed));
      const Matrix th = std::sqrt(beta) * gaussian_samples(r, 10000, cov);
      const auto report = normality_check(th, beta, cov);
      CHECK(report.ks_statistic >= 0.0);
      CHECK(report.ks_statistic <= 1.0);
      if (passes(report)) ++passed;
    }
    CHECK(passed >= 97);
  }

  SUBCASE("uniform input is flagged by its kurtosis") {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Matrix th(10000, 1);
    for (Eigen::Index i = 0; i < th.rows(); ++i) th(i, 0) = std::sqrt(3.0) * u(rng);
    const auto report = normality_check(th, 1.0, Matrix::Identity(1, 1));
    CHECK(report.excess_kurtosis(0) == doctest::Approx(-1.2).epsilon(0.05));
    CHECK_FALSE(passes(report));
  }

  SUBCASE("contract errors") {
    CHECK(kind_of([&] { normality_check(Matrix::Zero(50, 2), beta, cov); }) ==
          ErrorKind::InsufficientSamples);
    Matrix singular(2, 2);
    singular << 1, 1, 1, 1;
    CHECK(kind_of([&] { normality_check(Matrix::Ones(200, 2), beta, singular); }) ==
          ErrorKind::SingularPrediction);
  }

  SUBCASE("serialization") {
    const Matrix th = std::sqrt(beta) * gaussian_samples(rng, 500, cov);
    const auto report = normality_check(th, beta, cov);
    const std::string kv = report.to_key_value();
    CHECK(kv.find("ks_statistic=") != std::string::npos);
    CHECK(kv.find("excess_kurtosis_1=") != std::string::npos);
    CHECK(NormalityReport::csv_header(2) ==
          "sample_count,ks_statistic,skewness_0,skewness_1,excess_kurtosis_0,"
          "excess_kurtosis_1,passed");
    CHECK(report.csv_row().rfind("500,", 0) == 0);
  }
}

TEST_CASE("tolerance rules") {
  const Matrix pred = Matrix::Constant(1, 1, 1.0);
  const Matrix se = Matrix::Constant(1, 1, 0.01);
  const Matrix est = Matrix::Constant(1, 1, 1.13);
  CHECK(within_tolerance(est, pred, se, 0.1, 4, ToleranceRule::Sum));
  CHECK_FALSE(within_tolerance(est, pred, se, 0.1, 4, ToleranceRule::Max));
  CHECK(within_tolerance(Matrix::Constant(1, 1, 1.09), pred, se, 0.1, 4, ToleranceRule::Max));
}
