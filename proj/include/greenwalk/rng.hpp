#pragma once

#include <cstdint>

namespace greenwalk {

// Counter-based stream: value i of stream (seed, trial) is a pure function of
// (seed, trial, i), so trial results never depend on scheduling.
struct CounterRng {
  uint64_t key = 0;
  uint64_t counter = 0;

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static CounterRng for_trial(uint64_t seed, uint64_t trial) {
    CounterRng r;
    r.key = mix(seed ^ mix(trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
    return r;
  }

  uint64_t next_u64() { return mix(key + (++counter) * 0x9e3779b97f4a7c15ULL); }

  // uniform in [0, 1)
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
};

}  // namespace greenwalk
