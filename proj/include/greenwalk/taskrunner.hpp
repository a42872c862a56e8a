#pragma once

#include <iosfwd>
#include <string>

namespace greenwalk {

struct RunOptions {
  bool strict = false;        // undetermined verdicts fail the run (exit 2)
  bool no_timestamp = false;  // omit timestamps so reruns are byte-identical
  int workers = 0;            // 0: take GREENWALK_WORKERS, else 1
  std::string out_dir = ".";
};

// Exit codes: 0 success; 1 schema violation or execution error (diagnosed to
// log with the config path of the offending field); 2 when --strict and any
// task came back undetermined.
int run_config(const std::string& config_path, const RunOptions& opts,
               std::ostream& log);

// One-shot homogeneous classification of an inline measure spec (the same
// JSON sub-format the config files use).
int classify_inline(const std::string& measure_json, const RunOptions& opts,
                    std::ostream& log);

int resolve_workers(const RunOptions& opts);

}  // namespace greenwalk
