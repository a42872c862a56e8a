#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "greenwalk/taskrunner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Green function and recurrence toolkit for lattice walks"};
  app.require_subcommand(1);

  greenwalk::RunOptions opts;
  std::string config_path;
  std::string measure_json;

  CLI::App* run = app.add_subcommand("run", "execute the tasks in a config file");
  run->add_option("config", config_path, "JSON task config")->required();
  run->add_flag("--strict", opts.strict,
                "fail (exit 2) when any verdict is undetermined");
  run->add_flag("--no-timestamp", opts.no_timestamp,
                "omit timestamps so reruns are byte-identical");
  run->add_option("--workers", opts.workers,
                  "worker threads (default: GREENWALK_WORKERS, else 1)");
  run->add_option("--out", opts.out_dir, "report output directory");

  CLI::App* classify =
      app.add_subcommand("classify", "classify an inline step measure");
  classify->add_option("--measure", measure_json, "measure spec as JSON")
      ->required();
  classify->add_flag("--strict", opts.strict,
                     "fail (exit 2) when the verdict is undetermined");
  classify->add_flag("--no-timestamp", opts.no_timestamp,
                     "omit the timestamp from the report");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return greenwalk::run_config(config_path, opts, std::cout);
  return greenwalk::classify_inline(measure_json, opts, std::cout);
}
