#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "greenwalk/rng.hpp"
#include "greenwalk/walk.hpp"

namespace greenwalk {

// One sampled path. If a step drew the unmaterialized tail of a windowed
// family the walk stops there and censored is set: tail jumps are never
// silently truncated.
struct SampledPath {
  std::vector<long long> positions;  // positions[0] = origin
  bool censored = false;
  long long censor_step = -1;
};

SampledPath simulate_walk(const WalkSpec& walk, long long steps, uint64_t seed,
                          uint64_t trial = 0, long long origin = 0);

enum class EventKind { return_frequency, hitting_probability, occupation_count };

struct SimulationConfig {
  WalkSpec spec;
  long long trials = 10'000;
  long long horizon = 1'000;
  uint64_t seed = 1;
  EventKind event = EventKind::return_frequency;
  long long origin = 0;
  long long target = 0;                    // hitting_probability
  long long site = 0;                      // occupation_count: count visits here
  std::optional<long long> stop_at;        // occupation_count: stop when hit
  int workers = 1;
};

struct EstimateResult {
  double mean = 0.0;
  double sigma = 0.0;     // standard error of the mean
  double ci3_lo = 0.0;    // mean -/+ 3 sigma
  double ci3_hi = 0.0;
  double censored_fraction = 0.0;  // trials cut by horizon or tail events
  long long trials = 0;
};

EstimateResult estimate_event(const SimulationConfig& config);

// Presampled CDF for repeated draws from one measure; draws report tail
// events (mass beyond the materialized window) explicitly.
class MeasureSampler {
 public:
  explicit MeasureSampler(const LatticeMeasure& m);
  // returns false on a tail event; k receives the jump otherwise
  bool draw(CounterRng& rng, long long& k) const;
  double tail_probability() const { return tail_p_; }

 private:
  long long support_min_;
  std::vector<double> cdf_;
  double tail_p_;
  double total_;
};

}  // namespace greenwalk
