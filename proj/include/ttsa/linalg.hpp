#pragma once

#include <Eigen/Dense>

#include "ttsa/error.hpp"

namespace ttsa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Tolerances in this module are relative to (1 + norm of the data).
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kDefaultHurwitzMargin = 1e-9;

/// Largest real part over the eigenvalues of a square matrix.
/// Throws Error(NonFinite) on NaN/Inf entries, Error(InvalidArgument) if
/// the matrix is not square.
double spectral_abscissa(const Matrix& m);

/// True iff spectral_abscissa(m) < -margin.
bool is_hurwitz(const Matrix& m, double margin = kDefaultHurwitzMargin);

/// Solves A X + X B = C through the (pq x pq) system
/// (I_q (x) A + B^T (x) I_p) vec(X) = vec(C).
/// Throws Error(SingularPencil) if some eigenvalue of A equals minus an
/// eigenvalue of B (numerically).
Matrix solve_sylvester(const Matrix& a, const Matrix& b, const Matrix& c);

/// Returns F with F F^T = gamma. Uses a Cholesky factor when gamma is
/// positive definite and a clipped eigen-decomposition otherwise.
/// Throws Error(NotPSD) if an eigenvalue is below -kPsdTol (1 + |gamma|).
Matrix factor_covariance(const Matrix& gamma);

bool is_symmetric(const Matrix& m, double tol = kSymmetryTol);
double min_eigenvalue_symmetric(const Matrix& m);
Matrix symmetrize(const Matrix& m);

/// Max-abs-entry norm, used for the relative tolerances above.
double max_abs(const Matrix& m);

/// Relative Frobenius distance |a - b|_F / |b|_F (absolute if b = 0).
double relative_frobenius(const Matrix& a, const Matrix& b);

/// Inverse via LU; throws Error(kind) if the reciprocal condition estimate
/// is below rcond_floor.
Matrix checked_inverse(const Matrix& m, ErrorKind kind, double rcond_floor,
                       const char* what);

}  // namespace ttsa
