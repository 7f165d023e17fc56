#include "ttsa/noise.hpp"

#include <boost/random/normal_distribution.hpp>

#include "ttsa/error.hpp"

namespace ttsa {

NoiseStream::NoiseStream(std::uint64_t base_seed, std::uint64_t replica,
                         NoiseDistribution distribution, const Matrix& factor)
    : seed_(base_seed),
      replica_(replica),
      dist_(distribution),
      dim_(factor.rows()),
      rank_(0) {
  if (replica > 0xFFFFFFFFull)
    throw Error(ErrorKind::InvalidArgument, "replica index must fit in 32 bits");
  // Columns that are exactly zero contribute nothing; skip their draws.
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < factor.cols(); ++j)
    if (factor.col(j).cwiseAbs().maxCoeff() > 0.0) cols.push_back(j);
  rank_ = static_cast<Eigen::Index>(cols.size());
  zero_ = rank_ == 0;
  factor_.resize(static_cast<std::size_t>(dim_ * rank_));
  for (Eigen::Index i = 0; i < dim_; ++i)
    for (Eigen::Index j = 0; j < rank_; ++j)
      factor_[static_cast<std::size_t>(i * rank_ + j)] = factor(i, cols[j]);
  z_.resize(static_cast<std::size_t>(rank_));
}

NoiseStream::NoiseStream(std::uint64_t base_seed, std::uint64_t replica,
                         const SystemSpec& spec)
    : NoiseStream(base_seed, replica, spec.noise().distribution,
                  factor_covariance(spec.noise().joint())) {}

void NoiseStream::draw(std::uint64_t k, double* out) {
  if (zero_) {
    for (Eigen::Index i = 0; i < dim_; ++i) out[i] = 0.0;
    return;
  }
  CounterEngine eng(seed_, replica_, k);
  if (dist_ == NoiseDistribution::Gaussian) {
    boost::random::normal_distribution<double> normal;
    for (auto& z : z_) z = normal(eng);
  } else {
    std::uint64_t bits = 0;
    int left = 0;
    for (auto& z : z_) {
      if (left == 0) {
        bits = eng();
        left = 64;
      }
      z = (bits & 1u) ? 1.0 : -1.0;
      bits >>= 1;
      --left;
    }
  }
  const double* f = factor_.data();
  for (Eigen::Index i = 0; i < dim_; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < rank_; ++j) acc += f[j] * z_[j];
    out[i] = acc;
    f += rank_;
  }
}

Vector NoiseStream::draw(std::uint64_t k) {
  Vector v(dim_);
  draw(k, v.data());
  return v;
}

}  // namespace ttsa
