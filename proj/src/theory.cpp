#include "ttsa/theory.hpp"

#include <string>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.size() == 1) return std::abs(m(0, 0));
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Matrix shifted_delta(const Matrix& delta, double beta_bar) {
  return delta - 0.5 * beta_bar * Matrix::Identity(delta.rows(), delta.cols());
}

void require_stable_shift(const Matrix& shifted, const char* what) {
  if (!is_hurwitz(-shifted))
    throw Error(ErrorKind::AssumptionViolation,
                std::string(what) + ": -(" + "Delta - beta_bar/2 I) is not "
                "Hurwitz (abscissa " +
                    std::to_string(spectral_abscissa(-shifted)) + ")");
}

}  // namespace

Matrix CovariancePrediction::block() const {
  const auto n = sigma11.rows();
  const auto m = sigma22.rows();
  Matrix s(n + m, n + m);
  s << sigma11, sigma12, sigma12.transpose(), sigma22;
  return s;
}

Matrix noise_equivalent_covariance(const SystemSpec& spec) {
  const Matrix c = spec.a12() * spec.a22_inverse();
  const auto& g = spec.noise();
  const Matrix q = g.gamma11 - c * g.gamma12.transpose() -
                   g.gamma12 * c.transpose() +
                   c * g.gamma22 * c.transpose();
  return symmetrize(q);
}

CovariancePrediction predict_full(const SystemSpec& spec, double beta_bar) {
  if (!is_hurwitz(-spec.a22()))
    throw Error(ErrorKind::AssumptionViolation,
                "predict_full: -A22 is not Hurwitz");
  CovariancePrediction p;
  p.beta_bar = beta_bar;
  p.delta = delta_matrix(spec);
  p.q = noise_equivalent_covariance(spec);
  const Matrix shifted = shifted_delta(p.delta, beta_bar);
  require_stable_shift(shifted, "predict_full");

  const auto& g = spec.noise();
  const Matrix& a12 = spec.a12();
  const Matrix& a22 = spec.a22();

  p.sigma22 = symmetrize(solve_sylvester(a22, a22.transpose(), g.gamma22));
  // A12 S22 + S12 A22' = G12 is one-sided in S12.
  p.sigma12 = (g.gamma12 - a12 * p.sigma22) * spec.a22_inverse().transpose();
  const Matrix rhs = g.gamma11 - a12 * p.sigma12.transpose() -
                     p.sigma12 * a12.transpose();
  p.sigma11 =
      symmetrize(solve_sylvester(shifted, shifted.transpose(), symmetrize(rhs)));
  return p;
}

PredictionResiduals prediction_residuals(const SystemSpec& spec,
                                         const CovariancePrediction& p) {
  const auto& g = spec.noise();
  const Matrix& a12 = spec.a12();
  const Matrix& a22 = spec.a22();
  PredictionResiduals r;
  r.eq22 = max_abs(a22 * p.sigma22 + p.sigma22 * a22.transpose() - g.gamma22);
  r.eq12 = max_abs(a12 * p.sigma22 + p.sigma12 * a22.transpose() - g.gamma12);
  r.eq11 = max_abs(p.delta * p.sigma11 + p.sigma11 * p.delta.transpose() -
                   p.beta_bar * p.sigma11 + a12 * p.sigma12.transpose() +
                   p.sigma12 * a12.transpose() - g.gamma11);
  return r;
}

Matrix predict_reduced(const SystemSpec& spec, double beta_bar) {
  const Matrix shifted = shifted_delta(delta_matrix(spec), beta_bar);
  require_stable_shift(shifted, "predict_reduced");
  return symmetrize(solve_sylvester(shifted, shifted.transpose(),
                                    noise_equivalent_covariance(spec)));
}

OptimalGain optimal_gain_covariance(const SystemSpec& spec) {
  OptimalGain out;
  out.g1 = checked_inverse(delta_matrix(spec), ErrorKind::SingularDelta, 1e-13,
                           "Delta");
  out.g = checked_inverse(spec.block_matrix(), ErrorKind::SingularSystem, 1e-13,
                          "block matrix A");
  out.sigma11 = symmetrize(out.g1 * noise_equivalent_covariance(spec) *
                           out.g1.transpose());
  return out;
}

Matrix gained_reduced_covariance(const SystemSpec& spec, const Matrix& g1,
                                 double beta_bar) {
  if (g1.rows() != spec.n() || g1.cols() != spec.n())
    throw Error(ErrorKind::InvalidArgument, "gain G1 must be n x n");
  const Matrix shifted = shifted_delta(g1 * delta_matrix(spec), beta_bar);
  if (!is_hurwitz(-shifted))
    throw Error(ErrorKind::AssumptionViolation,
                "gained_reduced_covariance: -(G1 Delta - beta_bar/2 I) is not "
                "Hurwitz");
  const Matrix rhs = g1 * noise_equivalent_covariance(spec) * g1.transpose();
  return symmetrize(solve_sylvester(shifted, shifted.transpose(), rhs));
}

const Matrix& LSequence::at(std::uint64_t k) const {
  if (k < k0 || k > last_index())
    throw Error(ErrorKind::InvalidArgument,
                "L_k requested outside [" + std::to_string(k0) + ", " +
                    std::to_string(last_index()) + "]");
  return values[k - k0];
}

LSequence l_sequence(const SystemSpec& spec, const SchedulePair& pair,
                     std::uint64_t k0, std::uint64_t last) {
  if (last < k0)
    throw Error(ErrorKind::InvalidArgument, "l_sequence: K must be >= k0");
  const auto n = spec.n();
  const auto m = spec.m();
  const Matrix delta = delta_matrix(spec);
  const Matrix coupling = spec.a22_inverse() * spec.a21();  // A22^{-1} A21
  const Matrix eye_n = Matrix::Identity(n, n);

  LSequence seq;
  seq.k0 = k0;
  seq.values.reserve(last - k0 + 1);
  seq.norms.reserve(last - k0 + 1);
  seq.values.push_back(Matrix::Zero(m, n));
  seq.norms.push_back(0.0);

  Matrix b11(n, n);
  Matrix numer(m, n);
  for (std::uint64_t k = k0; k < last; ++k) {
    const Matrix& lk = seq.values.back();
    const double beta = pair.beta(k);
    const double gamma = pair.gamma(k);
    b11.noalias() = delta - spec.a12() * lk;
    numer.noalias() = lk - gamma * spec.a22() * lk + beta * coupling * b11;
    // X (I - beta B) = numer  <=>  (I - beta B)' X' = numer'
    Eigen::PartialPivLU<Matrix> lu((eye_n - beta * b11).transpose());
    if (!(lu.rcond() > 1e-12))
      throw Error(ErrorKind::SingularStep,
                  "I - beta_k B11^k is singular; increase k0", k);
    Matrix next = lu.solve(numer.transpose()).transpose();
    seq.norms.push_back(spectral_norm(next));
    seq.values.push_back(std::move(next));
  }
  return seq;
}

LSequence l_sequence_auto(const SystemSpec& spec, const SchedulePair& pair,
                          std::uint64_t last) {
  std::uint64_t k0 = 0;
  for (;;) {
    try {
      return l_sequence(spec, pair, k0, std::max(last, k0));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SingularStep || k0 >= 1024) throw;
      k0 = k0 == 0 ? 1 : 2 * k0;
    }
  }
}

}  // namespace ttsa
