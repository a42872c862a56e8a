#pragma once

#include <vector>

namespace greenwalk {

// Limit of a sequence sampled at geometrically spaced checkpoints (dyadic
// horizons, delta-schedules, s-schedules). When the increments decay at a
// stable geometric rate r the tail is summed as d*r/(1-r); the error estimate
// is the spread between the extrapolations from the last two measured ratios.
struct SequenceLimit {
  enum class Verdict { converged, extrapolated, diverging, stalled, empty };
  Verdict verdict = Verdict::empty;
  double value = 0.0;         // best limit estimate (last partial if diverging)
  double error = 0.0;         // estimated distance to the true limit
  double last_partial = 0.0;
  double last_increment = 0.0;
  double ratio = 0.0;         // measured increment ratio
};

SequenceLimit limit_from_schedule(const std::vector<double>& partials,
                                  double abs_floor = 1e-14);

const char* to_string(SequenceLimit::Verdict v);

}  // namespace greenwalk
