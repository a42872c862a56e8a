#include "greenwalk/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <vector>

#include "greenwalk/rng.hpp"

namespace greenwalk {

namespace {

// Atoms this small cannot influence any reported digit, but they widen every
// later convolution; dropping them from the window edges keeps the per-step
// cost at the width of the surviving bulk.
constexpr double kTrimFloor = 1e-19;

double trim_low_edges(LatticeMeasure& m, double floor_v) {
  if (m.empty()) return 0.0;
  size_t lo = 0, hi = m.weights.size();
  long double dropped = 0;
  while (lo < hi && m.weights[lo] < floor_v) dropped += m.weights[lo++];
  while (hi > lo && m.weights[hi - 1] < floor_v) dropped += m.weights[--hi];
  if (lo > 0 || hi < m.weights.size()) {
    m.support_min += static_cast<long long>(lo);
    m.weights.assign(m.weights.begin() + lo, m.weights.begin() + hi);
  }
  return static_cast<double>(dropped);
}

void trim_signed_edges(SignedLatticeMeasure& m, double floor_v) {
  size_t lo = 0, hi = m.weights.size();
  while (lo < hi && std::abs(m.weights[lo]) < floor_v) ++lo;
  while (hi > lo && std::abs(m.weights[hi - 1]) < floor_v) --hi;
  if (lo > 0 || hi < m.weights.size()) {
    m.support_min += static_cast<long long>(lo);
    m.weights.assign(m.weights.begin() + lo, m.weights.begin() + hi);
  }
}

void check_step_law(const LatticeMeasure& mu, const char* what) {
  require_probability(mu, what);
  if (mu.tail_mass > 1e-12) {
    std::ostringstream os;
    os << what << " must be fully materialized (unresolved tail mass "
       << mu.tail_mass << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

LadderFactor ladder_factor(const LatticeMeasure& mu, double s,
                           long long horizon, const ConvolveOptions& opts) {
  check_step_law(mu, "ladder step law");
  if (!(s > 0.0 && s <= 1.0))
    throw std::invalid_argument("ladder discount must lie in (0, 1]");
  if (horizon < 1)
    throw std::invalid_argument("ladder horizon must be at least 1");

  const long long up = std::max<long long>(mu.support_max(), 0);
  std::vector<long double> captured(static_cast<size_t>(up), 0.0L);
  LatticeMeasure cur = dirac(0);  // law of S_n on the not-yet-entered event
  long double cap_sum = 0.0L, dropped = 0.0L, half_mass = 0.0L;
  const long long half = horizon / 2;
  bool half_seen = (half == 0);
  double coef = 1.0;
  for (long long n = 1; n <= horizon; ++n) {
    coef *= s;
    if (cur.empty()) break;
    LatticeMeasure full = convolve(cur, mu, opts);
    LatticeMeasure plus = restrict_sign(full, Sign::positive);
    // entries land in [1, up]: one upward jump from somewhere at or below 0
    for (long long k = plus.support_min; k <= plus.support_max(); ++k) {
      long double add = coef * static_cast<long double>(plus.at(k));
      captured[static_cast<size_t>(k - 1)] += add;
      cap_sum += add;
    }
    cur = restrict_sign(full, Sign::nonpositive);
    dropped += trim_low_edges(cur, kTrimFloor);
    if (n == half) {
      half_mass = cap_sum;
      half_seen = true;
    }
  }
  if (!half_seen) half_mass = cap_sum;  // nothing was left to capture

  LadderFactor out;
  out.s = s;
  out.horizon = horizon;
  if (up > 0) {
    out.factor.support_min = 1;
    out.factor.weights.reserve(static_cast<size_t>(up));
    for (long double w : captured)
      out.factor.weights.push_back(static_cast<double>(w));
    out.factor = trimmed(std::move(out.factor));
  }
  out.unentered_mass = cur.mass();
  out.last_increment = static_cast<double>(cap_sum - half_mass);
  out.trimmed_mass = static_cast<double>(dropped);
  return out;
}

ExpFactor exp_factor(const LatticeMeasure& mu, double s, int n_max,
                     const ConvolveOptions& opts) {
  check_step_law(mu, "exponential factor step law");
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument(
        "exponential route needs a discount strictly inside (0, 1)");
  if (n_max < 1)
    throw std::invalid_argument("log series depth must be at least 1");

  LogSeriesResult ls = log_series(mu, s, n_max, opts);
  SignedLatticeMeasure lp = restrict_sign(ls.series, Sign::positive);
  trim_signed_edges(lp, kTrimFloor);
  long double norm = 0;
  for (double w : lp.weights) norm += std::abs(w);

  // smallest depth with e^{|L|} |L|^{m+1}/(m+1)! below rounding noise
  int depth = 0;
  long double tail = std::exp(norm) * norm;
  while (depth < 400 && tail > 1e-16L) {
    ++depth;
    tail = tail * norm / static_cast<long double>(depth + 1);
  }
  depth = std::max(depth, 4);

  ExpSeriesResult es = exp_series(negate(lp), depth, opts);

  // eta+ = d_0 - exp(-L+); its positive side is the entrance law
  LatticeMeasure f;
  if (!es.series.empty() && es.series.support_max() >= 1) {
    long long bot = std::max<long long>(1, es.series.support_min);
    f.support_min = bot;
    f.weights.reserve(static_cast<size_t>(es.series.support_max() - bot + 1));
    for (long long k = bot; k <= es.series.support_max(); ++k) {
      double v = -es.series.at(k);
      f.weights.push_back(v > 0.0 ? v : 0.0);  // truncation wiggle only
    }
    f = trimmed(std::move(f));
  }

  ExpFactor out;
  out.factor = std::move(f);
  out.s = s;
  out.n_max = n_max;
  out.log_truncation_bound = ls.truncation_bound;
  out.exp_remainder_bound = es.remainder_bound;
  return out;
}

MonteCarloFactor entry_monte_carlo(const LatticeMeasure& mu, long long trials,
                                   long long step_cap, uint64_t seed,
                                   int workers) {
  check_step_law(mu, "entry sampling step law");
  if (trials < 1) throw std::invalid_argument("trial count must be positive");
  if (step_cap < 1) throw std::invalid_argument("step cap must be positive");

  const long long kmin = mu.support_min;
  const size_t natoms = mu.weights.size();
  std::vector<double> cum(natoms);
  long double acc = 0;
  for (size_t i = 0; i < natoms; ++i) {
    acc += mu.weights[i];
    cum[i] = static_cast<double>(acc);
  }
  const double total = cum.back();
  const long long up = std::max<long long>(mu.support_max(), 0);

  const int nw = std::clamp(workers, 1, 64);
  struct Bucket {
    std::vector<long long> hits;
    long long deficit = 0;
  };
  std::vector<Bucket> buckets(static_cast<size_t>(nw));
  for (Bucket& b : buckets) b.hits.assign(static_cast<size_t>(up), 0);

  const long long chunk = (trials + nw - 1) / nw;
  auto run = [&](int w) {
    Bucket& b = buckets[static_cast<size_t>(w)];
    const long long t0 = w * chunk;
    const long long t1 = std::min(trials, t0 + chunk);
    for (long long t = t0; t < t1; ++t) {
      CounterRng rng = CounterRng::for_trial(seed, static_cast<uint64_t>(t));
      long long pos = 0;
      bool entered = false;
      for (long long st = 1; st <= step_cap; ++st) {
        // even all-maximal jumps cannot reach 1: the trial is decided
        if (up < 1 || pos + (step_cap - st + 1) * up < 1) break;
        double u = rng.next_double() * total;
        size_t idx = static_cast<size_t>(
            std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
        if (idx >= natoms) idx = natoms - 1;
        pos += kmin + static_cast<long long>(idx);
        if (pos >= 1) {
          ++b.hits[static_cast<size_t>(pos - 1)];
          entered = true;
          break;
        }
      }
      if (!entered) ++b.deficit;
    }
  };
  if (nw == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(run, w);
    for (std::thread& th : pool) th.join();
  }

  // integer counts merge the same way for any worker count
  std::vector<long long> hits(static_cast<size_t>(up), 0);
  long long deficit = 0;
  for (const Bucket& b : buckets) {
    for (size_t i = 0; i < hits.size(); ++i) hits[i] += b.hits[i];
    deficit += b.deficit;
  }

  MonteCarloFactor out;
  out.trials = trials;
  out.step_cap = step_cap;
  out.seed = seed;
  const double n = static_cast<double>(trials);
  if (up > 0) {
    out.factor.support_min = 1;
    for (long long h : hits)
      out.factor.weights.push_back(static_cast<double>(h) / n);
    out.factor = trimmed(std::move(out.factor));
    out.radius3.reserve(out.factor.weights.size());
    for (double p : out.factor.weights)
      out.radius3.push_back(3.0 * std::sqrt(p * (1.0 - p) / n));
  }
  out.mass_deficit = static_cast<double>(deficit) / n;
  out.deficit_radius3 =
      3.0 * std::sqrt(out.mass_deficit * (1.0 - out.mass_deficit) / n);
  return out;
}

MassCriterion mass_criterion(const LatticeMeasure& mu, int n_max,
                             const ConvolveOptions& opts) {
  check_step_law(mu, "mass criterion step law");
  if (n_max < 1)
    throw std::invalid_argument("mass criterion depth must be at least 1");

  MassCriterion out;
  LatticeMeasure cur = dirac(0);
  long double acc = 0;
  double pmass = 0.0, term = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    cur = convolve(cur, mu, opts);
    trim_low_edges(cur, kTrimFloor);
    pmass = restrict_sign(cur, Sign::positive).mass();
    term = pmass / static_cast<double>(n);
    acc += term;
    if ((n & (n - 1)) == 0 || n == n_max)
      out.partials.push_back(static_cast<double>(acc));
  }
  out.last_term = term;
  out.last_positive_mass = pmass;
  out.limit = limit_from_schedule(out.partials);
  out.diverging = out.limit.verdict == SequenceLimit::Verdict::diverging ||
                  out.limit.verdict == SequenceLimit::Verdict::stalled;
  if (!out.diverging) {
    out.diagnosis = "convergent tail (heuristic)";
  } else {
    // constant increments per doubling are the signature of sum c/n
    const size_t m = out.partials.size();
    bool flat = false;
    if (m >= 3) {
      double d1 = out.partials[m - 2] - out.partials[m - 3];
      double d2 = out.partials[m - 1] - out.partials[m - 2];
      flat = d1 > 0.0 && d2 > 0.7 * d1 && d2 < 1.4 * d1;
    }
    out.diagnosis = flat && out.last_positive_mass > 1e-6
                        ? "harmonic divergence (heuristic)"
                        : "divergence (heuristic)";
  }
  return out;
}

FactorizationResult factorize(const LatticeMeasure& mu,
                              const FactorizeOptions& opts) {
  FactorizationResult r;
  long long h = std::max<long long>(1, opts.ladder_horizon);
  for (;;) {
    r.via_ladder = ladder_factor(mu, 1.0, h);
    if (r.via_ladder.last_increment < opts.ladder_capture_tol) break;
    if (h >= opts.ladder_horizon_cap) break;  // reported honestly as-is
    h = std::min(opts.ladder_horizon_cap, h * 2);
  }
  r.mass_deficit = 1.0 - r.via_ladder.factor.mass();
  r.ladder_at_cmp_s = ladder_factor(mu, opts.cmp_s, r.via_ladder.horizon);
  r.via_exponential = exp_factor(mu, opts.cmp_s, opts.exp_n_max);
  r.tv_ladder_exp =
      tv_with_deficit(r.ladder_at_cmp_s.factor, r.via_exponential.factor);
  if (opts.with_monte_carlo) {
    r.via_monte_carlo = entry_monte_carlo(mu, opts.mc_trials, opts.mc_step_cap,
                                          opts.mc_seed, opts.workers);
    r.tv_ladder_mc =
        tv_with_deficit(r.via_ladder.factor, r.via_monte_carlo.factor);
    r.tv_exp_mc =
        tv_with_deficit(r.via_exponential.factor, r.via_monte_carlo.factor);
    long double a = r.via_monte_carlo.deficit_radius3;
    for (double x : r.via_monte_carlo.radius3) a += x;
    r.mc_allowance3 = 0.5 * static_cast<double>(a);
  }
  return r;
}

LadderFactor negative_ladder_factor(const LatticeMeasure& nu, double s,
                                    long long horizon,
                                    const ConvolveOptions& opts) {
  // exact mirror: reflect, run the upward recursion, reflect back
  LadderFactor m = ladder_factor(reflect(nu), s, horizon, opts);
  m.factor = reflect(m.factor);
  return m;
}

double tv_with_deficit(const LatticeMeasure& a, const LatticeMeasure& b) {
  double atoms = tv_distance(a, b);
  double da = 1.0 - a.total_mass();
  double db = 1.0 - b.total_mass();
  return atoms + 0.5 * std::abs(da - db);
}

}  // namespace greenwalk
