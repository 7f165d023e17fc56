#include "ttsa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorKind::InvalidArgument,
                std::string(what) + ": matrix is " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()) + ", expected square");
}

}  // namespace

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = b.norm();
  const double diff = (a - b).norm();
  return denom == 0.0 ? diff : diff / denom;
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.transpose()) <= tol * (1.0 + max_abs(m));
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue_symmetric(const Matrix& m) {
  require_square(m, "min_eigenvalue_symmetric");
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double spectral_abscissa(const Matrix& m) {
  require_square(m, "spectral_abscissa");
  if (!m.allFinite())
    throw Error(ErrorKind::NonFinite, "spectral_abscissa: non-finite entry");
  if (m.size() == 0) return -INFINITY;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success)
    throw Error(ErrorKind::NonFinite, "spectral_abscissa: QR iteration failed");
  return es.eigenvalues().real().maxCoeff();
}

bool is_hurwitz(const Matrix& m, double margin) {
  return spectral_abscissa(m) < -margin;
}

Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c) {
  require_square(a, "solve_sylvester(A)");
  require_square(b, "solve_sylvester(B)");
  const Eigen::Index p = a.rows();
  const Eigen::Index q = b.rows();
  if (c.rows() != p || c.cols() != q)
    throw Error(ErrorKind::InvalidArgument,
                "solve_sylvester: C must be " + std::to_string(p) + "x" +
                    std::to_string(q));
  if (!a.allFinite() || !b.allFinite() || !c.allFinite())
    throw Error(ErrorKind::NonFinite, "solve_sylvester: non-finite input");
  if (p == 0 || q == 0) return Matrix::Zero(p, q);

  // Column-major vec: vec(AX) = (I (x) A) vec X, vec(XB) = (B^T (x) I) vec X.
  const Eigen::Index n = p * q;
  Matrix kron = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < q; ++j) {
    kron.block(j * p, j * p, p, p) += a;
    for (Eigen::Index l = 0; l < q; ++l) {
      const double blj = b(l, j);
      if (blj == 0.0) continue;
      kron.block(j * p, l * p, p, p).diagonal().array() += blj;
    }
  }
  Eigen::PartialPivLU<Matrix> lu(kron);
  if (!(lu.rcond() > 1e-14) || std::abs(lu.determinant()) == 0.0)
    throw Error(ErrorKind::SingularPencil,
                "solve_sylvester: spectra of A and -B intersect (rcond=" +
                    std::to_string(lu.rcond()) + ")");
  const Eigen::Map<const Vector> rhs(c.data(), n);
  Vector x = lu.solve(rhs);
  // One round of iterative refinement keeps the residual near machine level
  // for moderately conditioned pencils.
  x += lu.solve(rhs - kron * x);
  return Eigen::Map<Matrix>(x.data(), p, q);
}

Matrix factor_covariance(const Matrix& gamma) {
  require_square(gamma, "factor_covariance");
  if (!gamma.allFinite())
    throw Error(ErrorKind::NonFinite, "factor_covariance: non-finite entry");
  const Eigen::Index d = gamma.rows();
  if (d == 0) return Matrix(0, 0);
  const double scale = 1.0 + max_abs(gamma);
  if (!is_symmetric(gamma, kPsdTol))
    throw Error(ErrorKind::NotPSD, "factor_covariance: matrix not symmetric");
  const Matrix sym = symmetrize(gamma);

  Eigen::LLT<Matrix> llt(sym);
  if (llt.info() == Eigen::Success) {
    Matrix f = llt.matrixL();
    if (max_abs(f * f.transpose() - sym) <= 1e-12 * scale) return f;
  }

  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  const Vector& lambda = es.eigenvalues();
  if (lambda.minCoeff() < -kPsdTol * scale)
    throw Error(ErrorKind::NotPSD,
                "factor_covariance: eigenvalue " +
                    std::to_string(lambda.minCoeff()) + " below tolerance");
  Vector root = lambda.cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal();
}

Matrix checked_inverse(const Matrix& m, ErrorKind kind, double rcond_floor,
                       const char* what) {
  require_square(m, what);
  if (!m.allFinite()) throw Error(ErrorKind::NonFinite, what);
  if (m.size() == 0) return Matrix(0, 0);
  Eigen::PartialPivLU<Matrix> lu(m);
  const double rc = lu.rcond();
  if (!(rc >= rcond_floor) || lu.determinant() == 0.0)
    throw Error(kind, std::string(what) + " is numerically singular (rcond=" +
                          std::to_string(rc) + ")");
  return lu.inverse();
}

}  // namespace ttsa
