#include <doctest.h>

#include <cmath>

#include "support.hpp"
#include "ttsa/error.hpp"
#include "ttsa/theory.hpp"

using namespace ttsa;

namespace {

Matrix scalar(double v) { return Matrix::Constant(1, 1, v); }

double gamma_norm(const SystemSpec& s) { return max_abs(s.noise().joint()); }

}  // namespace

TEST_CASE("predict_full on the scalar system") {
  const SystemSpec a = test::sys_a();
  const auto p0 = predict_full(a, 0.0);
  CHECK(p0.sigma22(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p0.sigma12(0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(p0.sigma11(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p0.q(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p0.delta(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const auto p1 = predict_full(a, 1.0);
  CHECK(p1.sigma11(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p1.sigma12(0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(p1.sigma22(0, 0) == doctest::Approx(0.5).epsilon(1e-14));

  // (2 - 0.1) S11 = 2
  CHECK(predict_full(a, 0.1).sigma11(0, 0) == doctest::Approx(2.0 / 1.9).epsilon(1e-14));

  try {
    predict_full(a, 3.0);
    FAIL("expected AssumptionViolation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AssumptionViolation);
  }
}

TEST_CASE("predict_full decoupled") {
  test::Rng rng(7);
  const SystemSpec r = test::random_spec(rng, 4, 0.0);
  NoiseSpec noise = r.noise();
  noise.gamma12.setZero();
  // Without coupling Delta is A11 itself, so it has to be stable on its own.
  const Matrix a11 = test::random_stable(rng, r.n(), 0.5);
  const SystemSpec d(a11, Matrix::Zero(r.n(), r.m()), Matrix::Zero(r.m(), r.n()), r.a22(),
                     r.b1(), r.b2(), noise);
  const auto p = predict_full(d, 0.0);
  CHECK(max_abs(p.sigma12) < 1e-14);
  const Matrix lyap = solve_sylvester(a11, a11.transpose(), noise.gamma11);
  CHECK(max_abs(p.sigma11 - lyap) < 1e-12);
}

TEST_CASE("predict_reduced") {
  CHECK(predict_reduced(test::sys_a(), 0.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const SystemSpec avg = averaging_system(scalar(1), Vector::Zero(1), scalar(1));
  CHECK(predict_reduced(avg, 1.0)(0, 0) == doctest::Approx(1.0).epsilon(1e-14));

  const SystemSpec silent = test::with_noise(
      test::sys_a(), NoiseSpec{scalar(0), scalar(0), scalar(0), NoiseDistribution::Gaussian});
  CHECK(max_abs(predict_reduced(silent, 0.0)) == 0.0);
  CHECK(max_abs(predict_full(silent, 0.0).block()) == 0.0);
}

TEST_CASE("noise-equivalent covariance") {
  CHECK(noise_equivalent_covariance(test::sys_a())(0, 0) == doctest::Approx(2.0));

  test::Rng rng(8);
  const SystemSpec r = test::random_spec(rng, 5, 0.0);
  const SystemSpec no_a12(r.a11(), Matrix::Zero(r.n(), r.m()), r.a21(), r.a22(), r.b1(),
                          r.b2(), r.noise());
  CHECK(max_abs(noise_equivalent_covariance(no_a12) - r.noise().gamma11) < 1e-14);

  // V = C W exactly: Q vanishes.
  const Matrix c = r.a12() * r.a22_inverse();
  const Matrix g22 = r.noise().gamma22;
  NoiseSpec correlated{symmetrize(c * g22 * c.transpose()), c * g22, g22,
                       NoiseDistribution::Gaussian};
  const SystemSpec s = test::with_noise(r, correlated);
  CHECK(max_abs(noise_equivalent_covariance(s)) <= 1e-10 * (1 + max_abs(correlated.gamma11)));
}

TEST_CASE("optimal gain") {
  const auto opt = optimal_gain_covariance(test::sys_a());
  CHECK(opt.sigma11(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(opt.g1(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  // A = [[2, 1], [1, 1]], A^{-1} = [[1, -1], [-1, 2]]
  CHECK(max_abs(opt.g - (Matrix(2, 2) << 1, -1, -1, 2).finished()) < 1e-14);

  test::Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    const Matrix a = test::random_stable(rng, d, 0.2);
    const Matrix g = test::random_psd(rng, d, 0.1);
    const auto o = optimal_gain_covariance(averaging_system(a, Vector::Zero(d), g));
    const Matrix ai = a.inverse();
    const Matrix expected = ai * g * ai.transpose();
    CHECK(max_abs(o.sigma11 - expected) <= 1e-10 * (1 + max_abs(expected)));
  }

  const SystemSpec silent = test::with_noise(
      test::sys_a(), NoiseSpec{scalar(0), scalar(0), scalar(0), NoiseDistribution::Gaussian});
  CHECK(max_abs(optimal_gain_covariance(silent).sigma11) == 0.0);
}

TEST_CASE("gained reduced covariance: scalar closed form") {
  // (g Delta) S + S (g Delta) - S = g^2 Q  =>  S = 2 g^2 / (2 g - 1)
  const SystemSpec a = test::sys_a();
  for (double g : {0.6, 0.8, 1.0, 1.5, 3.0}) {
    CHECK(gained_reduced_covariance(a, scalar(g), 1.0)(0, 0) ==
          doctest::Approx(2 * g * g / (2 * g - 1)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(gained_reduced_covariance(a, scalar(0.4), 1.0), Error);
}

TEST_CASE("property: full and reduced predictors agree on random specs") {
  test::Rng rng(10);
  for (int trial = 0; trial < 100; ++trial) {
    const double beta_bar = std::array{0.0, 0.5, 1.0}[trial % 3];
    const SystemSpec s = test::random_spec(rng, 6, beta_bar);
    const auto full = predict_full(s, beta_bar);
    const Matrix reduced = predict_reduced(s, beta_bar);
    CHECK(relative_frobenius(reduced, full.sigma11) <= 1e-8);

    const auto res = prediction_residuals(s, full);
    const double tol = 1e-8 * (1 + gamma_norm(s));
    CHECK(res.eq11 <= tol);
    CHECK(res.eq12 <= tol);
    CHECK(res.eq22 <= tol);
    CHECK(min_eigenvalue_symmetric(full.sigma11) >= -1e-8);
    CHECK(min_eigenvalue_symmetric(full.sigma22) >= -1e-8);
  }
}

TEST_CASE("property: averaging recovers A^-1 Gamma A^-T") {
  test::Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index d = 1 + trial % 4;
    const Matrix a = test::random_stable(rng, d, 0.2);
    const Matrix g = test::random_psd(rng, d, 0.1);
    const Matrix ai = a.inverse();
    const Matrix expected = ai * g * ai.transpose();
    const Matrix got = predict_reduced(averaging_system(a, Vector::Zero(d), g), 1.0);
    CHECK(relative_frobenius(got, expected) <= 1e-8);
  }
}

TEST_CASE("property: optimal gain dominates in PSD order") {
  test::Rng rng(13);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const SystemSpec s = test::random_spec(rng, 4, 0.0);
    const auto opt = optimal_gain_covariance(s);
    const Eigen::Index n = s.n();
    // G1 = Delta^{-1} (I + E) with E small keeps -(G1 Delta - I/2) Hurwitz.
    Matrix e(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) e(i, j) = 0.3 * unit(rng) / double(n);
    const Matrix g1 = (Matrix::Identity(n, n) + e) * opt.g1;
    if (!is_hurwitz(-(g1 * opt.g1.inverse() - 0.5 * Matrix::Identity(n, n)))) continue;
    const Matrix sigma = gained_reduced_covariance(s, g1, 1.0);
    CHECK(min_eigenvalue_symmetric(sigma - opt.sigma11) >= -1e-8 * (1 + max_abs(opt.sigma11)));
    const Matrix at_opt = gained_reduced_covariance(s, opt.g1, 1.0);
    CHECK(max_abs(at_opt - opt.sigma11) <= 1e-8 * (1 + max_abs(opt.sigma11)));
  }
}

TEST_CASE("L sequence") {
  const SchedulePair pair(StepSchedule(0.1, 10, 1), StepSchedule(0.5, 10, 0.7));

  SUBCASE("A21 = 0 keeps L at zero") {
    test::Rng rng(14);
    const SystemSpec r = test::random_spec(rng, 4, 0.0);
    const SystemSpec s(r.a11(), r.a12(), Matrix::Zero(r.m(), r.n()), r.a22(), r.b1(), r.b2(),
                       r.noise());
    const auto seq = l_sequence(s, pair, 0, 1000);
    for (double v : seq.norms) CHECK(v == 0.0);
  }

  SUBCASE("recursion residual and quasi-static level") {
    const SystemSpec a = test::sys_a();
    const std::uint64_t last = 100000;
    const auto seq = l_sequence(a, pair, 0, last);
    REQUIRE(seq.values.size() == last + 1);
    CHECK(seq.norms.front() == 0.0);
    const Matrix delta = delta_matrix(a);
    const Matrix c = a.a22_inverse() * a.a21();
    double worst = 0.0;
    for (std::uint64_t k = 0; k < last; k += 997) {
      const Matrix& l = seq.at(k);
      const Matrix b = delta - a.a12() * l;
      const Matrix lhs = seq.at(k + 1) * (Matrix::Identity(1, 1) - pair.beta(k) * b);
      const Matrix rhs = l - pair.gamma(k) * a.a22() * l + pair.beta(k) * c * b;
      worst = std::max(worst, max_abs(lhs - rhs));
    }
    CHECK(worst <= 1e-12);

    // Balancing gamma A22 L against beta A22^{-1} A21 Delta gives
    // L ~ (beta/gamma) A22^{-2} A21 Delta = beta/gamma for this system.
    const double ratio = pair.beta(last) / pair.gamma(last);
    CHECK(seq.norms.back() == doctest::Approx(ratio).epsilon(0.02));

    double early = 0.0;
    double late = 0.0;
    for (std::uint64_t k = 0; k <= last; ++k)
      (k <= last / 2 ? early : late) = std::max(k <= last / 2 ? early : late, seq.norms[k]);
    CHECK(late < early);
  }

  SUBCASE("auto start recovers from singular steps") {
    // beta_0 Delta = 1 makes I - beta_0 B singular at k = 0.
    const SchedulePair hard(StepSchedule(1.0, 10, 1), StepSchedule(1.0, 10, 0.7));
    try {
      l_sequence(test::sys_a(), hard, 0, 10);
      FAIL("expected SingularStep");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SingularStep);
      CHECK(e.step() == std::optional<std::uint64_t>(0));
    }
    const auto seq = l_sequence_auto(test::sys_a(), hard, 100);
    CHECK(seq.k0 >= 1);
    CHECK(seq.last_index() == 100);
  }
}
