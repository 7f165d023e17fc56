#include "ttsa/schedules.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

std::optional<std::string> param_problem(const ScheduleParams& p) {
  if (!std::isfinite(p.base) || !std::isfinite(p.tau) ||
      !std::isfinite(p.alpha))
    return "non-finite parameter";
  if (p.base <= 0.0) return "base must be positive";
  if (p.tau <= 0.0) return "tau must be positive";
  if (!(p.alpha > 0.5 && p.alpha <= 1.0)) return "alpha must lie in (1/2, 1]";
  return std::nullopt;
}

}  // namespace

StepSchedule::StepSchedule(double base, double horizon_scale, double exponent)
    : base_(base), tau_(horizon_scale), alpha_(exponent) {
  if (auto problem = param_problem(params()))
    throw Error(ErrorKind::InvalidArgument, "step schedule: " + *problem);
}

double StepSchedule::value(std::uint64_t k) const {
  const double x = 1.0 + static_cast<double>(k) / tau_;
  return alpha_ == 1.0 ? base_ / x : base_ / std::pow(x, alpha_);
}

double step_value(const StepSchedule& schedule, std::uint64_t k) {
  return schedule.value(k);
}

double beta_bar_limit(const StepSchedule& schedule) {
  // 1/beta_k = (1 + k/tau)^alpha / base; its increments tend to
  // alpha/(tau*base) * (1+k/tau)^(alpha-1), which vanishes unless alpha = 1.
  if (schedule.exponent() == 1.0)
    return 1.0 / (schedule.horizon_scale() * schedule.base());
  return 0.0;
}

double epsilon_limit(const StepSchedule& slow, const StepSchedule& fast) {
  if (slow.exponent() > fast.exponent()) return 0.0;
  if (slow.exponent() < fast.exponent())
    throw Error(ErrorKind::DivergentRatio,
                "beta_k/gamma_k diverges (slow exponent " +
                    std::to_string(slow.exponent()) + " < fast exponent " +
                    std::to_string(fast.exponent()) + ")");
  // (b_s/b_f) * ((1+k/tau_f)/(1+k/tau_s))^alpha -> (b_s/b_f) (tau_s/tau_f)^alpha
  return slow.base() / fast.base() *
         std::pow(slow.horizon_scale() / fast.horizon_scale(), slow.exponent());
}

SchedulePair::SchedulePair(StepSchedule slow, StepSchedule fast)
    : slow_(slow),
      fast_(fast),
      epsilon_(epsilon_limit(slow, fast)),
      beta_bar_(beta_bar_limit(slow)) {}

double epsilon_limit(const SchedulePair& pair) { return pair.epsilon(); }

ValidationReport validate_schedules(const ScheduleParams& slow,
                                    const ScheduleParams& fast) {
  ValidationReport report;
  const auto slow_problem = param_problem(slow);
  const auto fast_problem = param_problem(fast);
  report.add({"beta-steps", !slow_problem, slow.alpha, 0.5,
              slow_problem ? *slow_problem
                           : "positive, nonincreasing, sum diverges, -> 0"});
  report.add({"gamma-steps", !fast_problem, fast.alpha, 0.5,
              fast_problem ? *fast_problem
                           : "positive, nonincreasing, sum diverges, -> 0"});
  if (slow_problem || fast_problem) return report;

  const StepSchedule beta(slow);
  const StepSchedule gamma(fast);
  double eps = 0.0;
  try {
    eps = epsilon_limit(beta, gamma);
    report.add({"step-ratio", true, eps, 0.0,
                eps > 0.0 ? "single-time-scale regime" : "two-time-scale"});
  } catch (const Error& e) {
    report.add({"step-ratio", false, INFINITY, 0.0, e.what()});
    return report;
  }

  report.add({"beta-bar", true, beta_bar_limit(beta), 0.0, "beta_bar"});
  if (eps == 0.0) {
    const double fast_increment = beta_bar_limit(gamma);
    report.add({"gamma-increment", fast_increment == 0.0, fast_increment, 0.0,
                "lim(1/gamma_{k+1} - 1/gamma_k)"});
  } else {
    report.add({"gamma-increment", true, 0.0, 0.0, "not required when eps > 0"});
  }
  return report;
}

ValidationReport validate_schedules(const SchedulePair& pair) {
  return validate_schedules(pair.slow().params(), pair.fast().params());
}

}  // namespace ttsa
