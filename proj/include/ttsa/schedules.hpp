#pragma once

#include <cstdint>

#include "ttsa/validation.hpp"

namespace ttsa {

// Raw power-family parameters, as read from a config file. Not validated.
struct ScheduleParams {
  double base = 1.0;
  double tau = 1.0;
  double alpha = 1.0;

  bool operator==(const ScheduleParams&) const = default;
};

/// Step size sequence base / (1 + k/tau)^alpha with alpha in (1/2, 1].
///
/// Every value is positive and nonincreasing in k; the sequence tends to zero
/// and is not summable, so it satisfies the standard Robbins-Monro conditions.
class StepSchedule {
 public:
  /// Throws Error(InvalidArgument) unless base > 0, tau > 0 and
  /// 1/2 < alpha <= 1 (all finite).
  StepSchedule(double base, double horizon_scale, double exponent);
  explicit StepSchedule(const ScheduleParams& p)
      : StepSchedule(p.base, p.tau, p.alpha) {}

  double value(std::uint64_t k) const;
  double operator()(std::uint64_t k) const { return value(k); }

  double base() const noexcept { return base_; }
  double horizon_scale() const noexcept { return tau_; }
  double exponent() const noexcept { return alpha_; }
  ScheduleParams params() const noexcept { return {base_, tau_, alpha_}; }

 private:
  double base_;
  double tau_;
  double alpha_;
};

double step_value(const StepSchedule& schedule, std::uint64_t k);

/// lim (1/beta_{k+1} - 1/beta_k): 1/(tau*base) for exponent 1, else 0.
double beta_bar_limit(const StepSchedule& schedule);

/// lim beta_k/gamma_k. Throws Error(DivergentRatio) if slow decays more
/// slowly than fast.
double epsilon_limit(const StepSchedule& slow, const StepSchedule& fast);

/// Slow schedule (beta, drives theta) and fast schedule (gamma, drives r).
class SchedulePair {
 public:
  /// Throws Error(DivergentRatio) if beta_k/gamma_k has no finite limit.
  SchedulePair(StepSchedule slow, StepSchedule fast);

  const StepSchedule& slow() const noexcept { return slow_; }
  const StepSchedule& fast() const noexcept { return fast_; }
  double epsilon() const noexcept { return epsilon_; }
  double beta_bar() const noexcept { return beta_bar_; }
  double beta(std::uint64_t k) const { return slow_.value(k); }
  double gamma(std::uint64_t k) const { return fast_.value(k); }

 private:
  StepSchedule slow_;
  StepSchedule fast_;
  double epsilon_;
  double beta_bar_;
};

double epsilon_limit(const SchedulePair& pair);

/// Checks the step-size assumptions (positivity, monotonicity, divergent
/// sums, vanishing steps, ratio limit, inverse-increment limits). Failures
/// are reported, never thrown.
ValidationReport validate_schedules(const ScheduleParams& slow,
                                    const ScheduleParams& fast);
ValidationReport validate_schedules(const SchedulePair& pair);

}  // namespace ttsa
