#include "ttsa/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

// Hot loop for the original and gained iterations on raw row-major buffers;
// the systems are small enough that Eigen's dynamic-size overhead dominates.
class Stepper {
 public:
  Stepper(const SystemSpec& spec, const Gain* gain)
      : n_(static_cast<std::size_t>(spec.n())),
        d_(static_cast<std::size_t>(spec.n() + spec.m())),
        a_(row_major(spec.block_matrix())),
        b_(row_major(spec.block_offset())),
        u_(d_),
        tmp_(d_) {
    if (gain == nullptr) return;
    if (const auto* slow = std::get_if<SlowGain>(gain)) {
      if (slow->g1.rows() != spec.n() || slow->g1.cols() != spec.n())
        throw Error(ErrorKind::InvalidArgument, "gain G1 must be n x n");
      mode_ = Mode::Slow;
      g_ = row_major(slow->g1);
    } else {
      const auto& full = std::get<FullGain>(*gain);
      if (full.g.rows() != spec.n() + spec.m() || full.g.cols() != full.g.rows())
        throw Error(ErrorKind::InvalidArgument, "gain G must be (n+m) x (n+m)");
      mode_ = Mode::Full;
      g_ = row_major(full.g);
    }
  }

  std::size_t dim() const { return d_; }

  // Advances z from step k to k+1.
  void step(double* z, std::uint64_t k, double beta, double gamma,
            NoiseStream& noise) {
    if (mode_ == Mode::Full) gamma = beta;
    noise.draw(k, u_.data());
    const double* a = a_.data();
    for (std::size_t i = 0; i < d_; ++i, a += d_) {
      double acc = b_[i] + u_[i];
      for (std::size_t j = 0; j < d_; ++j) acc -= a[j] * z[j];
      u_[i] = acc;
    }
    switch (mode_) {
      case Mode::Plain:
        for (std::size_t i = 0; i < n_; ++i) z[i] += beta * u_[i];
        for (std::size_t i = n_; i < d_; ++i) z[i] += gamma * u_[i];
        break;
      case Mode::Slow:
        apply_gain(n_);
        for (std::size_t i = 0; i < n_; ++i) z[i] += beta * tmp_[i];
        for (std::size_t i = n_; i < d_; ++i) z[i] += gamma * u_[i];
        break;
      case Mode::Full:
        apply_gain(d_);
        for (std::size_t i = 0; i < d_; ++i) z[i] += beta * tmp_[i];
        break;
    }
    double norm2 = 0.0;
    for (std::size_t i = 0; i < d_; ++i) norm2 += z[i] * z[i];
    if (!(norm2 <= kDivergenceNorm * kDivergenceNorm))
      throw Error(ErrorKind::Diverged,
                  "iterate norm exceeded 1e12 at step " + std::to_string(k + 1),
                  k + 1);
  }

 private:
  enum class Mode { Plain, Slow, Full };

  static std::vector<double> row_major(const Matrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return out;
  }

  void apply_gain(std::size_t size) {
    const double* g = g_.data();
    for (std::size_t i = 0; i < size; ++i, g += size) {
      double acc = 0.0;
      for (std::size_t j = 0; j < size; ++j) acc += g[j] * u_[j];
      tmp_[i] = acc;
    }
  }

  std::size_t n_;
  std::size_t d_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> g_;
  std::vector<double> u_;
  std::vector<double> tmp_;
  Mode mode_ = Mode::Plain;
};

void check_init(const SystemSpec& spec, const InitialState& init) {
  if (init.theta.size() != spec.n() || init.r.size() != spec.m())
    throw Error(ErrorKind::InvalidArgument,
                "initial state has wrong dimensions");
}

std::vector<TrajectoryState> run_trajectory(const SystemSpec& spec,
                                            const SchedulePair& pair,
                                            const Gain* gain,
                                            const InitialState& init,
                                            std::uint64_t steps,
                                            NoiseStream& noise,
                                            std::uint64_t stride) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  if (stride < 1)
    throw Error(ErrorKind::InvalidArgument, "record_stride must be >= 1");
  check_init(spec, init);
  Stepper stepper(spec, gain);
  const auto n = spec.n();
  const auto m = spec.m();
  Vector z(n + m);
  z << init.theta, init.r;

  std::vector<TrajectoryState> out;
  out.reserve(steps / stride + 2);
  auto record = [&](std::uint64_t k) {
    out.push_back({k, z.head(n), z.tail(m)});
  };
  record(0);
  for (std::uint64_t k = 0; k < steps; ++k) {
    stepper.step(z.data(), k, pair.beta(k), pair.gamma(k), noise);
    if ((k + 1) % stride == 0 || k + 1 == steps) record(k + 1);
  }
  return out;
}

std::vector<std::uint64_t> normalize_checkpoints(std::vector<std::uint64_t> cps,
                                                 std::uint64_t steps) {
  if (cps.empty()) return geometric_checkpoints(steps);
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  if (cps.back() > steps)
    throw Error(ErrorKind::InvalidArgument,
                "checkpoint " + std::to_string(cps.back()) + " exceeds K");
  return cps;
}

}  // namespace

InitialState origin(const SystemSpec& spec) {
  return {Vector::Zero(spec.n()), Vector::Zero(spec.m())};
}

std::vector<TrajectoryState> simulate(const SystemSpec& spec,
                                      const SchedulePair& pair,
                                      const InitialState& init,
                                      std::uint64_t steps, NoiseStream& noise,
                                      std::uint64_t record_stride) {
  return run_trajectory(spec, pair, nullptr, init, steps, noise, record_stride);
}

std::vector<TrajectoryState> simulate_gained(
    const SystemSpec& spec, const SchedulePair& pair, const Gain& gain,
    const InitialState& init, std::uint64_t steps, NoiseStream& noise,
    std::uint64_t record_stride) {
  return run_trajectory(spec, pair, &gain, init, steps, noise, record_stride);
}

std::vector<TransformedState> simulate_transformed(
    const SystemSpec& spec, const SchedulePair& pair, const LSequence& lseq,
    const TrajectoryState& at_k0, std::uint64_t steps, NoiseStream& noise,
    std::uint64_t record_stride) {
  if (record_stride < 1)
    throw Error(ErrorKind::InvalidArgument, "record_stride must be >= 1");
  const std::uint64_t k0 = lseq.k0;
  if (at_k0.k != k0)
    throw Error(ErrorKind::InvalidArgument,
                "reference state must be taken at step k0");
  if (steps < k0 || lseq.last_index() < steps)
    throw Error(ErrorKind::InvalidArgument,
                "L sequence does not cover [k0, K]");
  const auto n = spec.n();
  const auto m = spec.m();
  const Matrix delta = delta_matrix(spec);
  const Matrix coupling = spec.a22_inverse() * spec.a21();
  const FixedPoint fp = fixed_point(spec);

  const HatState hat = hat_transform(spec, fp, at_k0.theta, at_k0.r);
  Vector th = hat.theta;
  Vector rt = lseq.at(k0) * hat.theta + hat.r;

  std::vector<TransformedState> out;
  out.push_back({k0, th, rt});
  Vector u(n + m);
  Matrix b11(n, n), m_next(m, n), b22(m, m);
  Vector th_next(n), rt_next(m);
  for (std::uint64_t k = k0; k < steps; ++k) {
    const double beta = pair.beta(k);
    const double gamma = pair.gamma(k);
    noise.draw(k, u.data());
    const auto v = u.head(n);
    const auto w = u.tail(m);
    b11.noalias() = delta - spec.a12() * lseq.at(k);
    m_next.noalias() = lseq.at(k + 1) + coupling;
    b22.noalias() = (beta / gamma) * m_next * spec.a12() + spec.a22();
    th_next.noalias() = th - beta * (b11 * th + spec.a12() * rt) + beta * v;
    rt_next.noalias() =
        rt - gamma * (b22 * rt) + gamma * w + beta * (m_next * v);
    th.swap(th_next);
    rt.swap(rt_next);
    if ((k + 1 - k0) % record_stride == 0 || k + 1 == steps)
      out.push_back({k + 1, th, rt});
  }
  return out;
}

TrajectoryState reconstruct(const SystemSpec& spec, const FixedPoint& fp,
                            const LSequence& lseq, const TransformedState& s) {
  TrajectoryState out;
  out.k = s.k;
  out.theta = s.theta + fp.theta;
  const Vector r_hat = s.r - lseq.at(s.k) * s.theta;
  out.r = r_hat + spec.a22_inverse() * (spec.b2() - spec.a21() * out.theta);
  return out;
}

TransformedCheck transformed_check(const SystemSpec& spec,
                                   const SchedulePair& pair,
                                   const InitialState& init,
                                   std::uint64_t steps, NoiseStream& noise) {
  const LSequence lseq = l_sequence_auto(spec, pair, steps);
  const auto original = simulate(spec, pair, init, std::max<std::uint64_t>(steps, 1),
                                 noise, 1);
  const std::uint64_t k0 = lseq.k0;
  TransformedCheck result;
  result.k0 = k0;
  result.steps = steps;
  result.final_l_norm = lseq.norms.back();
  if (k0 >= steps) return result;
  const auto transformed =
      simulate_transformed(spec, pair, lseq, original[k0], steps, noise, 1);
  const FixedPoint fp = fixed_point(spec);
  for (const auto& t : transformed) {
    const TrajectoryState rec = reconstruct(spec, fp, lseq, t);
    const auto& ref = original[t.k];
    const double err = std::sqrt((rec.theta - ref.theta).squaredNorm() +
                                 (rec.r - ref.r).squaredNorm());
    const double scale =
        1.0 + std::sqrt(ref.theta.squaredNorm() + ref.r.squaredNorm());
    result.max_relative_error = std::max(result.max_relative_error, err / scale);
  }
  return result;
}

Matrix CovarianceCheckpoint::block() const {
  const auto n = sigma11.rows();
  const auto m = sigma22.rows();
  Matrix s(n + m, n + m);
  s << sigma11, sigma12, sigma12.transpose(), sigma22;
  return s;
}

Matrix initial_second_moment(const SystemSpec& spec, const InitialState& init) {
  check_init(spec, init);
  const FixedPoint fp = fixed_point(spec);
  Vector z(spec.n() + spec.m());
  z << init.theta - fp.theta, init.r - fp.r;
  return z * z.transpose();
}

std::vector<std::uint64_t> geometric_checkpoints(std::uint64_t steps) {
  std::vector<std::uint64_t> cps;
  for (std::uint64_t k = 100; k < steps; k *= 10) cps.push_back(k);
  cps.push_back(steps);
  return cps;
}

std::vector<CovarianceCheckpoint> propagate_covariance(
    const SystemSpec& spec, const SchedulePair& pair, const Matrix& c0,
    std::uint64_t steps, std::vector<std::uint64_t> checkpoints) {
  const auto n = spec.n();
  const auto m = spec.m();
  const auto d = n + m;
  if (c0.rows() != d || c0.cols() != d)
    throw Error(ErrorKind::InvalidArgument, "C0 must be (n+m) x (n+m)");
  checkpoints = normalize_checkpoints(std::move(checkpoints), steps);

  const Matrix a = spec.block_matrix();
  const Matrix g = spec.noise().joint();
  Matrix t = Matrix::Identity(d, d);
  t.bottomLeftCorner(m, n) = spec.a22_inverse() * spec.a21();

  Matrix c = symmetrize(c0);
  Matrix mk(d, d), tmp(d, d), noise(d, d);
  Vector s(d);
  std::vector<CovarianceCheckpoint> out;
  out.reserve(checkpoints.size());
  auto cp = checkpoints.begin();
  for (std::uint64_t k = 0;; ++k) {
    if (cp != checkpoints.end() && *cp == k) {
      const double beta = pair.beta(k);
      const double gamma = pair.gamma(k);
      const Matrix h = t * c * t.transpose();
      out.push_back({k, beta, gamma, h.topLeftCorner(n, n) / beta,
                     h.topRightCorner(n, m) / beta,
                     h.bottomRightCorner(m, m) / gamma});
      ++cp;
    }
    if (k == steps) break;
    s.head(n).setConstant(pair.beta(k));
    s.tail(m).setConstant(pair.gamma(k));
    mk.noalias() = -(s.asDiagonal() * a);
    mk.diagonal().array() += 1.0;
    tmp.noalias() = mk * c;
    c.noalias() = tmp * mk.transpose();
    c.noalias() += s.asDiagonal() * g * s.asDiagonal();
    if (!(c.trace() <= kDivergenceNorm * kDivergenceNorm))
      throw Error(ErrorKind::Diverged,
                  "second moment exceeded 1e24 at step " + std::to_string(k + 1),
                  k + 1);
  }
  return out;
}

bool EnsembleResult::operator==(const EnsembleResult& o) const {
  if (checkpoints != o.checkpoints || beta != o.beta || gamma != o.gamma ||
      theta_hat.size() != o.theta_hat.size() || r_hat.size() != o.r_hat.size())
    return false;
  for (std::size_t i = 0; i < theta_hat.size(); ++i)
    if (theta_hat[i] != o.theta_hat[i] || r_hat[i] != o.r_hat[i]) return false;
  return true;
}

EnsembleResult run_ensemble(const SystemSpec& spec, const SchedulePair& pair,
                            const EnsembleOptions& options) {
  if (options.replicas < 2)
    throw Error(ErrorKind::InvalidArgument, "ensemble needs at least 2 replicas");
  if (options.steps < 1) throw Error(ErrorKind::InvalidArgument, "K must be >= 1");
  const InitialState init = options.init.value_or(origin(spec));
  check_init(spec, init);
  const auto n = spec.n();
  const auto m = spec.m();
  const auto replicas = static_cast<Eigen::Index>(options.replicas);

  EnsembleResult result;
  result.checkpoints = normalize_checkpoints(options.checkpoints, options.steps);
  for (auto k : result.checkpoints) {
    result.beta.push_back(pair.beta(k));
    result.gamma.push_back(pair.gamma(k));
    result.theta_hat.emplace_back(replicas, n);
    result.r_hat.emplace_back(replicas, m);
  }

  const FixedPoint fp = fixed_point(spec);
  const Matrix coupling = spec.a22_inverse() * spec.a21();
  const Matrix factor = factor_covariance(spec.noise().joint());
  const Gain* gain = options.gain ? &*options.gain : nullptr;
  static_cast<void>(Stepper(spec, gain));  // validates the gain up front

  // Shared across replicas; pow() per step would dominate the step cost.
  std::vector<double> beta_table(options.steps), gamma_table(options.steps);
  for (std::uint64_t k = 0; k < options.steps; ++k) {
    beta_table[k] = pair.beta(k);
    gamma_table[k] = pair.gamma(k);
  }

  std::mutex error_mutex;
  std::optional<Error> first_error;
  auto run_replica = [&](std::uint64_t replica) {
    try {
      Stepper stepper(spec, gain);
      NoiseStream noise(options.base_seed, replica, spec.noise().distribution,
                        factor);
      Vector z(n + m);
      z << init.theta, init.r;
      std::uint64_t k = 0;
      for (std::size_t c = 0; c < result.checkpoints.size(); ++c) {
        for (; k < result.checkpoints[c]; ++k)
          stepper.step(z.data(), k, beta_table[k], gamma_table[k], noise);
        const Vector th = z.head(n) - fp.theta;
        const Vector rh = (z.tail(m) - fp.r) + coupling * th;
        const auto row = static_cast<Eigen::Index>(replica);
        result.theta_hat[c].row(row) = th.transpose();
        result.r_hat[c].row(row) = rh.transpose();
      }
    } catch (const Error& e) {
      std::lock_guard lock(error_mutex);
      if (!first_error || first_error->replica() > replica)
        first_error.emplace(e.kind(),
                            std::string(e.what()) + " (replica " +
                                std::to_string(replica) + ")",
                            e.step(), replica);
    }
  };

  unsigned jobs = options.jobs == 0 ? std::thread::hardware_concurrency()
                                    : options.jobs;
  jobs = std::max(1u, std::min<unsigned>(
                          jobs, static_cast<unsigned>(options.replicas)));
  if (jobs == 1) {
    for (std::uint64_t i = 0; i < options.replicas; ++i) run_replica(i);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::jthread> workers;
    workers.reserve(jobs);
    for (unsigned w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::uint64_t i = next++; i < options.replicas; i = next++)
          run_replica(i);
      });
  }
  if (first_error) throw *first_error;
  return result;
}

}  // namespace ttsa
