#pragma once

#include <string>
#include <vector>

namespace greenwalk {

enum class Regime { transient, null_recurrent, positive_recurrent, undetermined };

const char* to_string(Regime r);

// One piece of numerical evidence feeding a verdict: a named value with its
// error bar and the algorithm that produced it.
struct Evidence {
  std::string name;
  double value = 0.0;
  double error = 0.0;
  std::string provenance;
  std::string note;
};

struct ClassificationReport {
  Regime regime = Regime::undetermined;
  std::vector<Evidence> evidence;
  std::string inputs_echo;  // human-readable echo of the classified object
};

}  // namespace greenwalk
