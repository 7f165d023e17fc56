#include "ttsa/model.hpp"

#include <string>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols,
                   const char* name) {
  if (m.rows() != rows || m.cols() != cols)
    throw Error(ErrorKind::InvalidArgument,
                std::string(name) + " is " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  if (!m.allFinite())
    throw Error(ErrorKind::NonFinite, std::string(name) + " has non-finite entries");
}

double condition_number(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin == 0.0 ? INFINITY : s(0) / smin;
}

}  // namespace

const char* to_string(NoiseDistribution d) {
  return d == NoiseDistribution::Gaussian ? "gaussian" : "scaled-rademacher";
}

NoiseDistribution parse_distribution(const std::string& name) {
  if (name == "gaussian") return NoiseDistribution::Gaussian;
  if (name == "scaled-rademacher" || name == "rademacher")
    return NoiseDistribution::ScaledRademacher;
  throw Error(ErrorKind::Parse, "unknown noise distribution '" + name + "'");
}

Matrix NoiseSpec::joint() const {
  const auto n = gamma11.rows();
  const auto m = gamma22.rows();
  Matrix g(n + m, n + m);
  g << gamma11, gamma12, gamma12.transpose(), gamma22;
  return g;
}

SystemSpec::SystemSpec(Matrix a11, Matrix a12, Matrix a21, Matrix a22,
                       Vector b1, Vector b2, NoiseSpec noise)
    : a11_(std::move(a11)),
      a12_(std::move(a12)),
      a21_(std::move(a21)),
      a22_(std::move(a22)),
      b1_(std::move(b1)),
      b2_(std::move(b2)),
      noise_(std::move(noise)) {
  const auto n = a11_.rows();
  const auto m = a22_.rows();
  if (n == 0 || m == 0)
    throw Error(ErrorKind::InvalidArgument, "dimensions n and m must be positive");
  require_shape(a11_, n, n, "A11");
  require_shape(a12_, n, m, "A12");
  require_shape(a21_, m, n, "A21");
  require_shape(a22_, m, m, "A22");
  require_shape(b1_, n, 1, "b1");
  require_shape(b2_, m, 1, "b2");
  require_shape(noise_.gamma11, n, n, "Gamma11");
  require_shape(noise_.gamma12, n, m, "Gamma12");
  require_shape(noise_.gamma22, m, m, "Gamma22");

  const double cond = condition_number(a22_);
  if (!(cond <= kMaxA22Condition))
    throw Error(ErrorKind::SingularA22,
                "A22 condition number " + std::to_string(cond) + " exceeds 1e12");
  a22_inv_ = a22_.partialPivLu().inverse();

  const Matrix g = noise_.joint();
  if (!is_symmetric(g, kPsdTol))
    throw Error(ErrorKind::NotPSD, "noise covariance blocks are not symmetric");
  const double lmin = min_eigenvalue_symmetric(g);
  if (lmin < -kPsdTol * (1.0 + max_abs(g)))
    throw Error(ErrorKind::NotPSD, "joint noise covariance has eigenvalue " +
                                       std::to_string(lmin));
}

Matrix SystemSpec::block_matrix() const {
  Matrix a(n() + m(), n() + m());
  a << a11_, a12_, a21_, a22_;
  return a;
}

Vector SystemSpec::block_offset() const {
  Vector b(n() + m());
  b << b1_, b2_;
  return b;
}

FixedPoint fixed_point(const SystemSpec& spec) {
  const Matrix a = spec.block_matrix();
  const Vector b = spec.block_offset();
  Eigen::PartialPivLU<Matrix> lu(a);
  if (!(lu.rcond() > 1e-13))
    throw Error(ErrorKind::SingularSystem,
                "block matrix A is numerically singular (rcond=" +
                    std::to_string(lu.rcond()) + ")");
  Vector z = lu.solve(b);
  z += lu.solve(b - a * z);
  return {z.head(spec.n()), z.tail(spec.m())};
}

Matrix delta_matrix(const SystemSpec& spec) {
  return spec.a11() - spec.a12() * spec.a22_inverse() * spec.a21();
}

ValidationReport validate_system(const SystemSpec& spec, double beta_bar) {
  ValidationReport report;
  const Matrix delta = delta_matrix(spec);

  const double fast_abscissa = spectral_abscissa(-spec.a22());
  report.add({"hurwitz:-A22", fast_abscissa < -kDefaultHurwitzMargin,
              fast_abscissa, -kDefaultHurwitzMargin,
              "spectral abscissa of -A22"});
  const double slow_abscissa = spectral_abscissa(-delta);
  report.add({"hurwitz:-Delta", slow_abscissa < -kDefaultHurwitzMargin,
              slow_abscissa, -kDefaultHurwitzMargin,
              "spectral abscissa of -Delta"});
  const Matrix shifted =
      -(delta - 0.5 * beta_bar * Matrix::Identity(spec.n(), spec.n()));
  const double shifted_abscissa = spectral_abscissa(shifted);
  report.add({"hurwitz:shifted-Delta", shifted_abscissa < -kDefaultHurwitzMargin,
              shifted_abscissa, -kDefaultHurwitzMargin,
              "spectral abscissa of -(Delta - beta_bar/2 I), beta_bar=" +
                  std::to_string(beta_bar)});
  const Matrix g = spec.noise().joint();
  const double lmin = min_eigenvalue_symmetric(g);
  const double tol = -kPsdTol * (1.0 + max_abs(g));
  report.add({"noise-psd", lmin >= tol, lmin, tol,
              "min eigenvalue of joint noise covariance"});
  return report;
}

ValidationReport validate_system(const SystemSpec& spec,
                                 const SchedulePair& pair) {
  ValidationReport report = validate_schedules(pair);
  report.merge(validate_system(spec, pair.beta_bar()));
  return report;
}

SystemSpec averaging_system(const Matrix& a, const Vector& b,
                            const Matrix& gamma) {
  if (a.rows() != a.cols())
    throw Error(ErrorKind::InvalidArgument, "averaging_system: A must be square");
  const auto d = a.rows();
  if (!is_hurwitz(-a))
    throw Error(ErrorKind::NotHurwitz, "averaging_system: -A is not Hurwitz");
  const Matrix eye = Matrix::Identity(d, d);
  const Matrix zero = Matrix::Zero(d, d);
  NoiseSpec noise{zero, zero, gamma, NoiseDistribution::Gaussian};
  // The slow equation theta' = r - theta is b1 - A11 theta - A12 r with
  // A11 = I, A12 = -I. The fast equation is the Robbins-Monro update for
  // A r = b, so A22 = A and A21 = 0.
  return SystemSpec(eye, -eye, zero, a, Vector::Zero(d), b, std::move(noise));
}

HatState hat_transform(const SystemSpec& spec, const FixedPoint& fp,
                       const Vector& theta, const Vector& r) {
  return {theta - fp.theta,
          r - spec.a22_inverse() * (spec.b2() - spec.a21() * theta)};
}

HatState hat_transform(const SystemSpec& spec, const Vector& theta,
                       const Vector& r) {
  return hat_transform(spec, fixed_point(spec), theta, r);
}

}  // namespace ttsa
