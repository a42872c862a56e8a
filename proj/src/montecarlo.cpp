#include "greenwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>
#include <variant>
#include <vector>

namespace greenwalk {

MeasureSampler::MeasureSampler(const LatticeMeasure& m)
    : support_min_(m.support_min), tail_p_(m.tail_mass) {
  cdf_.reserve(m.weights.size());
  double acc = 0.0;
  for (double w : m.weights) {
    acc += w;
    cdf_.push_back(acc);
  }
  total_ = acc + tail_p_;
}

bool MeasureSampler::draw(CounterRng& rng, long long& k) const {
  double u = rng.next_double();
  if (cdf_.empty() || u >= cdf_.back()) return false;
  size_t idx = static_cast<size_t>(
      std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
  k = support_min_ + static_cast<long long>(idx);
  return true;
}

namespace {

// law_at(walk, pos), presampled: lo rules sites <= 0, hi the rest
struct SideSamplers {
  MeasureSampler lo;
  MeasureSampler hi;

  explicit SideSamplers(const WalkSpec& walk)
      : lo(law_at(walk, 0)), hi(law_at(walk, 1)) {}

  bool draw(long long pos, CounterRng& rng, long long& k) const {
    return (pos <= 0 ? lo : hi).draw(rng, k);
  }
};

struct TrialOutcome {
  long long value = 0;
  bool censored = false;
};

TrialOutcome run_trial(const SideSamplers& samplers, const SimulationConfig& cfg,
                       uint64_t trial) {
  CounterRng rng = CounterRng::for_trial(cfg.seed, trial);
  long long pos = cfg.origin;
  TrialOutcome out;
  switch (cfg.event) {
    case EventKind::return_frequency:
    case EventKind::hitting_probability: {
      const long long goal = cfg.event == EventKind::return_frequency
                                 ? cfg.origin
                                 : cfg.target;
      for (long long i = 1; i <= cfg.horizon; ++i) {
        long long k = 0;
        if (!samplers.draw(pos, rng, k)) break;
        pos += k;
        if (pos == goal) {
          out.value = 1;
          return out;
        }
      }
      out.censored = true;  // unresolved: the event may still lie beyond
      return out;
    }
    case EventKind::occupation_count: {
      if (pos == cfg.site) out.value = 1;
      for (long long i = 1; i <= cfg.horizon; ++i) {
        long long k = 0;
        if (!samplers.draw(pos, rng, k)) {
          out.censored = true;
          return out;
        }
        pos += k;
        // the stop site ends the trial before it can be counted
        if (cfg.stop_at && pos == *cfg.stop_at) return out;
        if (pos == cfg.site) ++out.value;
      }
      // a full window is the answer itself unless a stopping time was wanted
      out.censored = cfg.stop_at.has_value();
      return out;
    }
  }
  return out;
}

}  // namespace

SampledPath simulate_walk(const WalkSpec& walk, long long steps, uint64_t seed,
                          uint64_t trial, long long origin) {
  if (steps < 0) throw std::invalid_argument("simulate_walk needs steps >= 0");
  validate(walk);
  SideSamplers samplers(walk);
  CounterRng rng = CounterRng::for_trial(seed, trial);

  SampledPath path;
  path.positions.reserve(static_cast<size_t>(steps) + 1);
  path.positions.push_back(origin);
  long long pos = origin;
  for (long long i = 1; i <= steps; ++i) {
    long long k = 0;
    if (!samplers.draw(pos, rng, k)) {
      path.censored = true;
      path.censor_step = i;
      break;
    }
    pos += k;
    path.positions.push_back(pos);
  }
  return path;
}

EstimateResult estimate_event(const SimulationConfig& config) {
  if (config.trials < 1)
    throw std::invalid_argument("estimate_event needs trials >= 1");
  if (config.horizon < 1)
    throw std::invalid_argument("estimate_event needs horizon >= 1");
  validate(config.spec);
  const SideSamplers samplers(config.spec);

  // per-trial statistics are small integers, so the reduction is exact and
  // blind to how trials were split across workers
  struct Bucket {
    __int128 sum = 0;
    __int128 sum_sq = 0;
    long long censored = 0;
  };

  const int nw =
      static_cast<int>(std::clamp<long long>(config.workers, 1, config.trials));
  std::vector<Bucket> buckets(static_cast<size_t>(nw));
  const long long chunk = (config.trials + nw - 1) / nw;

  auto run = [&](int w) {
    Bucket& b = buckets[static_cast<size_t>(w)];
    const long long lo = static_cast<long long>(w) * chunk;
    const long long hi = std::min(config.trials, lo + chunk);
    for (long long t = lo; t < hi; ++t) {
      TrialOutcome o = run_trial(samplers, config, static_cast<uint64_t>(t));
      b.sum += o.value;
      b.sum_sq += static_cast<__int128>(o.value) * o.value;
      if (o.censored) ++b.censored;
    }
  };

  if (nw == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(run, w);
    for (auto& th : pool) th.join();
  }

  Bucket total;
  for (const Bucket& b : buckets) {
    total.sum += b.sum;
    total.sum_sq += b.sum_sq;
    total.censored += b.censored;
  }

  EstimateResult r;
  r.trials = config.trials;
  const long double n = static_cast<long double>(config.trials);
  r.mean = static_cast<double>(total.sum) / static_cast<double>(config.trials);
  if (config.trials > 1) {
    // n * sum_sq - sum^2 is exact in 128-bit arithmetic and nonnegative
    __int128 numer =
        static_cast<__int128>(config.trials) * total.sum_sq - total.sum * total.sum;
    long double var = static_cast<long double>(numer) / (n * (n - 1.0L));
    r.sigma = static_cast<double>(std::sqrt(std::max(var, 0.0L) / n));
  }
  r.ci3_lo = r.mean - 3.0 * r.sigma;
  r.ci3_hi = r.mean + 3.0 * r.sigma;
  r.censored_fraction =
      static_cast<double>(total.censored) / static_cast<double>(config.trials);
  return r;
}

}  // namespace greenwalk
