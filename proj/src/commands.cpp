#include "ttsa/commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "ttsa/error.hpp"

namespace ttsa {

namespace {

// Malformed input or unusable arguments, as opposed to a failed assumption.
bool is_io_error(const Error& e) {
  return e.kind() == ErrorKind::Parse || e.kind() == ErrorKind::InvalidArgument ||
         e.kind() == ErrorKind::InsufficientSamples;
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what();
  if (e.step()) err << " [step " << *e.step() << "]";
  if (e.replica()) err << " [replica " << *e.replica() << "]";
  err << '\n';
  return is_io_error(e) ? kExitIo : kExitFailure;
}

// Writes via `emit` to the --out file, or to `fallback` if none was given.
template <class Emit>
bool write_output(const std::string& path, std::ostream& fallback,
                  std::ostream& err, Emit emit) {
  if (path.empty()) {
    emit(fallback);
    return true;
  }
  std::ofstream file(path);
  if (!file) {
    err << "error: cannot write '" << path << "'\n";
    return false;
  }
  emit(file);
  return static_cast<bool>(file);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

void print_matrix(std::ostream& os, const char* label, const Matrix& m) {
  os << label << " =";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    os << (i == 0 ? " [" : "; ");
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      os << (j == 0 ? "" : " ") << fmt(m(i, j));
  }
  os << "]\n";
}

// Returns true if validation passed (or was skipped); prints the report on
// failure.
bool validate_first(const RunConfig& config, const CommandOptions& opts,
                    std::ostream& out) {
  if (opts.skip_validate) return true;
  const ValidationReport report = validate_config(config);
  if (report.all_passed()) return true;
  out << report.to_text() << "validation failed; use --skip-validate to force\n";
  return false;
}

int run_propagate(const RunConfig& config, const RunParams& run,
                  std::ostream& out, std::ostream& err) {
  const SystemSpec spec = config.system();
  const SchedulePair pair = config.schedules();
  const Matrix c0 = initial_second_moment(spec, config.initial_state());
  const auto rows =
      propagate_covariance(spec, pair, c0, run.steps, run.checkpoints);
  if (!write_output(run.out, out, err,
                    [&](std::ostream& os) { write_propagation_csv(os, rows); }))
    return kExitIo;
  const CovariancePrediction pred = predict_full(spec, pair.beta_bar());
  const auto& last = rows.back();
  const double e11 = relative_frobenius(last.sigma11, pred.sigma11);
  const double e12 = relative_frobenius(last.sigma12, pred.sigma12);
  const double e22 = relative_frobenius(last.sigma22, pred.sigma22);
  const double eall = relative_frobenius(last.block(), pred.block());
  out << "# propagate k=" << last.k << " rel_err_sigma11=" << fmt(e11)
      << " rel_err_sigma12=" << fmt(e12) << " rel_err_sigma22=" << fmt(e22)
      << " rel_err_block=" << fmt(eall) << " tolerance(sigma11)="
      << kPropagateTolerance << '\n';
  return e11 < kPropagateTolerance ? kExitOk : kExitFailure;
}

int run_ensemble_mode(const RunConfig& config, const RunParams& run,
                      std::ostream& out, std::ostream& err) {
  const SystemSpec spec = config.system();
  const SchedulePair pair = config.schedules();
  EnsembleOptions eo;
  eo.replicas = run.replicas;
  eo.steps = run.steps;
  eo.checkpoints = run.checkpoints;
  eo.base_seed = run.seed;
  eo.jobs = run.jobs;
  eo.init = config.initial_state();
  const EnsembleResult ens = run_ensemble(spec, pair, eo);
  std::vector<EnsembleStatsRow> rows;
  for (std::size_t c = 0; c < ens.checkpoints.size(); ++c) {
    EnsembleStatsRow row{ens.checkpoints[c], ens.beta[c], ens.gamma[c],
                         scaled_covariances(ens.theta_hat[c], ens.r_hat[c],
                                            ens.beta[c], ens.gamma[c]),
                         std::nullopt};
    if (ens.replicas() >= 30)
      row.se = standard_errors(ens.theta_hat[c], ens.r_hat[c], ens.beta[c],
                               ens.gamma[c]);
    rows.push_back(std::move(row));
  }
  if (!write_output(run.out, out, err,
                    [&](std::ostream& os) { write_ensemble_csv(os, rows); }))
    return kExitIo;
  const CovariancePrediction pred = predict_full(spec, pair.beta_bar());
  const auto& last = rows.back();
  if (!last.se) {
    out << "# ensemble: fewer than 30 replicas, no tolerance check\n";
    return kExitFailure;
  }
  const bool ok11 = within_tolerance(last.estimate.sigma11, pred.sigma11,
                                     last.se->sigma11, kEnsembleRelTolerance,
                                     kEnsembleSeTolerance, ToleranceRule::Sum);
  const bool ok22 = within_tolerance(last.estimate.sigma22, pred.sigma22,
                                     last.se->sigma22, kEnsembleRelTolerance,
                                     kEnsembleSeTolerance, ToleranceRule::Sum);
  out << "# ensemble k=" << last.k << " N=" << ens.replicas() << '\n';
  print_matrix(out, "# Sigma11_hat", last.estimate.sigma11);
  print_matrix(out, "# Sigma11_se ", last.se->sigma11);
  print_matrix(out, "# Sigma11    ", pred.sigma11);
  print_matrix(out, "# Sigma22_hat", last.estimate.sigma22);
  print_matrix(out, "# Sigma22_se ", last.se->sigma22);
  print_matrix(out, "# Sigma22    ", pred.sigma22);
  out << "# within 10% + 4 SE: sigma11=" << (ok11 ? "yes" : "no")
      << " sigma22=" << (ok22 ? "yes" : "no") << '\n';
  return ok11 && ok22 ? kExitOk : kExitFailure;
}

int run_normality_mode(const RunConfig& config, const RunParams& run,
                       std::ostream& out, std::ostream& err) {
  const SystemSpec spec = config.system();
  const SchedulePair pair = config.schedules();
  EnsembleOptions eo;
  eo.replicas = run.replicas;
  eo.steps = run.steps;
  eo.checkpoints = {run.steps};
  eo.base_seed = run.seed;
  eo.jobs = run.jobs;
  eo.init = config.initial_state();
  const EnsembleResult ens = run_ensemble(spec, pair, eo);
  const CovariancePrediction pred = predict_full(spec, pair.beta_bar());
  const NormalityReport report =
      normality_check(ens.theta_hat.back(), ens.beta.back(), pred.sigma11);
  out << report.to_key_value();
  if (!run.out.empty() &&
      !write_output(run.out, out, err, [&](std::ostream& os) {
        os << NormalityReport::csv_header(spec.n()) << '\n'
           << report.csv_row() << '\n';
      }))
    return kExitIo;
  return passes(report) ? kExitOk : kExitFailure;
}

int run_transformed_mode(const RunConfig& config, const RunParams& run,
                         std::ostream& out) {
  const SystemSpec spec = config.system();
  const SchedulePair pair = config.schedules();
  NoiseStream noise(run.seed, 0, spec);
  const TransformedCheck check =
      transformed_check(spec, pair, config.initial_state(), run.steps, noise);
  out << "max_relative_error=" << format_double(check.max_relative_error)
      << "\nk0=" << check.k0 << "\nsteps=" << check.steps
      << "\nfinal_L_norm=" << format_double(check.final_l_norm)
      << "\ntolerance=" << kTransformedTolerance << '\n';
  return check.max_relative_error <= kTransformedTolerance ? kExitOk
                                                           : kExitFailure;
}

}  // namespace

RunParams effective_run(const RunParams& base, const CommandOptions& opts) {
  RunParams r = base;
  if (opts.replicas) r.replicas = *opts.replicas;
  if (opts.steps) r.steps = *opts.steps;
  if (opts.seed) r.seed = *opts.seed;
  if (opts.stride) r.stride = *opts.stride;
  if (opts.jobs) r.jobs = *opts.jobs;
  if (!opts.out.empty()) r.out = opts.out;
  return r;
}

ValidationReport validate_config(const RunConfig& config) {
  ValidationReport report = validate_schedules(config.beta, config.gamma);
  double beta_bar = 0.0;
  try {
    beta_bar = config.schedules().beta_bar();
  } catch (const Error&) {
    // already reported by validate_schedules
  }
  try {
    report.merge(validate_system(config.system(), beta_bar));
  } catch (const Error& e) {
    report.add({"system", false, 0.0, 0.0, e.what()});
  }
  return report;
}

int cmd_validate(const CommandOptions& opts, std::ostream& out,
                 std::ostream& err) {
  try {
    const RunConfig config = load_config(opts.config_path);
    const ValidationReport report = validate_config(config);
    out << report.to_text();
    out << (report.all_passed() ? "all assumptions hold\n"
                                : "assumption check failed\n");
    return report.all_passed() ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_predict(const CommandOptions& opts, std::ostream& out,
                std::ostream& err) {
  RunConfig config;
  try {
    config = load_config(opts.config_path);
    if (!validate_first(config, opts, out)) return kExitFailure;
  } catch (const Error& e) {
    return report_error(e, err);
  }
  try {
    const SystemSpec spec = config.system();
    const SchedulePair pair = config.schedules();
    PredictionBundle p;
    p.full = predict_full(spec, pair.beta_bar());
    p.sigma11_reduced = predict_reduced(spec, pair.beta_bar());
    p.optimal = optimal_gain_covariance(spec);
    const double gap = relative_frobenius(p.sigma11_reduced, p.full.sigma11);
    const std::string path = effective_run(config.run, opts).out;
    const bool wrote = write_output(path, out, err, [&](std::ostream& os) {
      if (opts.format == "json")
        os << prediction_to_json(p).dump(2) << '\n';
      else
        write_prediction_csv(os, p);
    });
    if (!wrote) return kExitIo;
    out << "# full-vs-reduced sigma11 discrepancy=" << format_double(gap)
        << " (limit " << kPredictConsistency << ")\n";
    return gap < kPredictConsistency ? kExitOk : kExitInconsistent;
  } catch (const Error& e) {
    if (opts.skip_validate) return report_error(e, err);
    err << "error: " << e.what() << " after validation passed\n";
    return kExitInconsistent;
  }
}

int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig config = load_config(opts.config_path);
    RunParams run = effective_run(config.run, opts);
    if (opts.mode != "propagate" && opts.mode != "ensemble" &&
        opts.mode != "normality" && opts.mode != "transformed-check") {
      err << "error: unknown mode '" << opts.mode
          << "' (propagate | ensemble | normality | transformed-check)\n";
      return kExitIo;
    }
    if (!validate_first(config, opts, out)) return kExitFailure;
    if (opts.mode == "propagate") return run_propagate(config, run, out, err);
    if (opts.mode == "ensemble") return run_ensemble_mode(config, run, out, err);
    if (opts.mode == "normality") return run_normality_mode(config, run, out, err);
    return run_transformed_mode(config, run, out);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Diverged && e.step())
      out << "Diverged(" << *e.step() << ")\n";
    return report_error(e, err);
  }
}

AveragingOutcome run_averaging(const AveragingConfig& config,
                               const RunParams& run) {
  const SystemSpec spec = averaging_system(config.a, config.b, config.gamma);
  const SchedulePair pair(StepSchedule(1.0, 1.0, 1.0), StepSchedule(config.fast));

  AveragingOutcome o;
  o.steps = run.steps;
  o.replicas = run.replicas;
  o.predicted = predict_reduced(spec, pair.beta_bar());
  const Matrix a_inv = config.a.inverse();
  o.closed_form = a_inv * config.gamma * a_inv.transpose();

  EnsembleOptions eo;
  eo.replicas = run.replicas;
  eo.steps = run.steps;
  eo.checkpoints = {run.steps};
  eo.base_seed = run.seed;
  eo.jobs = run.jobs;
  const EnsembleResult ens = run_ensemble(spec, pair, eo);
  const auto est = scaled_covariances(ens.theta_hat[0], ens.r_hat[0],
                                      ens.beta[0], ens.gamma[0]);
  const auto se = standard_errors(ens.theta_hat[0], ens.r_hat[0], ens.beta[0],
                                  ens.gamma[0]);
  o.empirical = est.sigma11;
  o.standard_error = se.sigma11;
  o.passed = within_tolerance(o.empirical, o.predicted, o.standard_error,
                              kEnsembleRelTolerance, kEnsembleSeTolerance,
                              ToleranceRule::Sum);
  return o;
}

int cmd_averaging(const CommandOptions& opts, std::ostream& out,
                  std::ostream& err) {
  try {
    const AveragingConfig config = load_averaging_config(opts.config_path);
    const RunParams run = effective_run(config.run, opts);
    const AveragingOutcome o = run_averaging(config, run);
    const bool wrote = run.out.empty() ||
                       write_output(run.out, out, err, [&](std::ostream& os) {
                         os << "name,row,col,value\n";
                         write_matrix_rows(os, "predicted", o.predicted);
                         write_matrix_rows(os, "closed_form", o.closed_form);
                         write_matrix_rows(os, "empirical", o.empirical);
                         write_matrix_rows(os, "standard_error", o.standard_error);
                       });
    if (!wrote) return kExitIo;
    out << "averaging: N=" << o.replicas << " K=" << o.steps << '\n';
    print_matrix(out, "predicted A^-1 Gamma A^-T", o.predicted);
    print_matrix(out, "closed form              ", o.closed_form);
    print_matrix(out, "empirical (K+1) E[th th']", o.empirical);
    print_matrix(out, "standard error           ", o.standard_error);
    out << "within 10% + 4 SE: " << (o.passed ? "yes" : "no") << '\n';
    return o.passed ? kExitOk : kExitFailure;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

}  // namespace ttsa
