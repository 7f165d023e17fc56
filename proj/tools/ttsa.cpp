#include <iostream>

#include <CLI11.hpp>

#include "ttsa/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Two-time-scale linear stochastic approximation toolkit"};
  app.require_subcommand(1);

  ttsa::CommandOptions opts;
  auto add_common = [&opts](CLI::App* sub) {
    sub->add_option("--config", opts.config_path, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_run = [&opts](CLI::App* sub) {
    sub->add_option("--replicas", opts.replicas, "number of replicas");
    sub->add_option("--steps", opts.steps, "number of iterations K");
    sub->add_option("--seed", opts.seed, "base seed");
    sub->add_option("--stride", opts.stride, "trajectory record stride");
    sub->add_option("--jobs", opts.jobs, "worker threads (0: all cores)");
    sub->add_option("--out", opts.out, "output file (default: stdout)");
  };

  CLI::App* validate = app.add_subcommand("validate", "check the assumptions");
  add_common(validate);

  CLI::App* predict =
      app.add_subcommand("predict", "solve for the limiting covariances");
  add_common(predict);
  predict->add_option("--out", opts.out, "output file (default: stdout)");
  predict->add_option("--format", opts.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  predict->add_flag("--skip-validate", opts.skip_validate);

  CLI::App* run = app.add_subcommand("run", "simulate or propagate");
  add_common(run);
  add_run(run);
  run->add_option("--mode", opts.mode,
                  "propagate | ensemble | normality | transformed-check")
      ->required();
  run->add_flag("--skip-validate", opts.skip_validate);

  CLI::App* averaging =
      app.add_subcommand("averaging", "Polyak-Ruppert averaging demo");
  add_common(averaging);
  add_run(averaging);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ttsa::kExitOk : ttsa::kExitIo;
  }

  if (validate->parsed()) return ttsa::cmd_validate(opts, std::cout, std::cerr);
  if (predict->parsed()) return ttsa::cmd_predict(opts, std::cout, std::cerr);
  if (run->parsed()) return ttsa::cmd_run(opts, std::cout, std::cerr);
  return ttsa::cmd_averaging(opts, std::cout, std::cerr);
}
