#pragma once

#include <cstdint>
#include <random>

#include "ttsa/model.hpp"

namespace ttsa::test {

using Rng = std::mt19937_64;

Matrix random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
Vector random_vector(Rng& rng, Eigen::Index size);

/// M with spectral_abscissa(-M) <= -margin, i.e. -M Hurwitz.
Matrix random_stable(Rng& rng, Eigen::Index n, double margin);

/// B B' + ridge I with B square Gaussian.
Matrix random_psd(Rng& rng, Eigen::Index n, double ridge = 0.0);

/// Spec with random dimensions in [1, max_dim] satisfying the Hurwitz
/// conditions for the given beta_bar, A22 well conditioned and a joint PSD
/// noise covariance with nonzero cross block.
SystemSpec random_spec(Rng& rng, Eigen::Index max_dim, double beta_bar);

/// The scalar test system: A11 = 2, A12 = A21 = A22 = 1, b = (1, 2),
/// Gamma = I.
SystemSpec sys_a(NoiseDistribution dist = NoiseDistribution::Gaussian);

SystemSpec with_noise(const SystemSpec& spec, const NoiseSpec& noise);

}  // namespace ttsa::test
