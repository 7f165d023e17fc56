#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <vector>

#include "ttsa/linalg.hpp"
#include "ttsa/model.hpp"

namespace ttsa {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3").
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) noexcept {
    constexpr std::uint64_t kMul0 = 0xD2511F53u;
    constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = kMul0 * ctr[0];
      const std::uint64_t p1 = kMul1 * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

/// UniformRandomBitGenerator over the Philox blocks for one
/// (seed, replica, step) triple. Successive calls walk the block index in the
/// last counter word, so the words produced are a pure function of the triple.
class CounterEngine {
 public:
  using result_type = std::uint64_t;

  CounterEngine(std::uint64_t seed, std::uint64_t replica,
                std::uint64_t step) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        ctr_{static_cast<std::uint32_t>(step),
             static_cast<std::uint32_t>(step >> 32),
             static_cast<std::uint32_t>(replica), 0u} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept {
    if (used_ == 2) refill();
    return buf_[used_++];
  }

 private:
  void refill() noexcept {
    const auto out = Philox4x32::generate(ctr_, key_);
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    ++ctr_[3];
    used_ = 0;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  std::array<std::uint64_t, 2> buf_{};
  int used_ = 2;
};

/// Per-replica source of the joint noise (V_k, W_k).
///
/// Draw k is F z where z has i.i.d. unit-variance coordinates (standard
/// normal or +-1), F is a factor of the joint covariance, and z depends only
/// on (base_seed, replica, k).
class NoiseStream {
 public:
  NoiseStream(std::uint64_t base_seed, std::uint64_t replica,
              NoiseDistribution distribution, const Matrix& factor);
  /// Factors spec.noise().joint() and uses spec.noise().distribution.
  NoiseStream(std::uint64_t base_seed, std::uint64_t replica,
              const SystemSpec& spec);

  std::uint64_t base_seed() const noexcept { return seed_; }
  std::uint64_t replica() const noexcept { return replica_; }
  NoiseDistribution distribution() const noexcept { return dist_; }
  Eigen::Index dim() const noexcept { return dim_; }

  /// Writes dim() values into out.
  void draw(std::uint64_t k, double* out);
  Vector draw(std::uint64_t k);

 private:
  std::uint64_t seed_;
  std::uint64_t replica_;
  NoiseDistribution dist_;
  Eigen::Index dim_;
  Eigen::Index rank_;
  std::vector<double> factor_;  // row-major dim_ x rank_
  std::vector<double> z_;
  bool zero_ = false;
};

}  // namespace ttsa
