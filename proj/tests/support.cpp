#include "support.hpp"

#include <algorithm>

#include "ttsa/linalg.hpp"

namespace ttsa::test {

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  return m;
}

Vector random_vector(Rng& rng, Eigen::Index size) {
  return random_matrix(rng, size, 1).col(0);
}

Matrix random_stable(Rng& rng, Eigen::Index n, double margin) {
  Matrix m = random_matrix(rng, n, n);
  const double shift = std::max(0.0, spectral_abscissa(-m) + margin);
  m.diagonal().array() += shift;
  return m;
}

Matrix random_psd(Rng& rng, Eigen::Index n, double ridge) {
  const Matrix b = random_matrix(rng, n, n);
  Matrix p = b * b.transpose();
  p.diagonal().array() += ridge;
  return symmetrize(p);
}

SystemSpec random_spec(Rng& rng, Eigen::Index max_dim, double beta_bar) {
  std::uniform_int_distribution<Eigen::Index> dim(1, max_dim);
  const Eigen::Index n = dim(rng);
  const Eigen::Index m = dim(rng);
  const Matrix a22 = random_stable(rng, m, 0.5);
  const Matrix a12 = random_matrix(rng, n, m);
  const Matrix a21 = random_matrix(rng, m, n);
  Matrix delta = random_stable(rng, n, 0.5);
  delta.diagonal().array() += beta_bar / 2.0;
  const Matrix a11 = delta + a12 * a22.inverse() * a21;
  const Matrix joint = random_psd(rng, n + m, 0.1);
  NoiseSpec noise{joint.topLeftCorner(n, n), joint.topRightCorner(n, m),
                  joint.bottomRightCorner(m, m), NoiseDistribution::Gaussian};
  return SystemSpec(a11, a12, a21, a22, random_vector(rng, n),
                    random_vector(rng, m), noise);
}

SystemSpec sys_a(NoiseDistribution dist) {
  const Matrix one = Matrix::Constant(1, 1, 1.0);
  NoiseSpec noise{one, Matrix::Zero(1, 1), one, dist};
  return SystemSpec(Matrix::Constant(1, 1, 2.0), one, one, one,
                    Vector::Constant(1, 1.0), Vector::Constant(1, 2.0), noise);
}

SystemSpec with_noise(const SystemSpec& spec, const NoiseSpec& noise) {
  return SystemSpec(spec.a11(), spec.a12(), spec.a21(), spec.a22(), spec.b1(),
                    spec.b2(), noise);
}

}  // namespace ttsa::test
