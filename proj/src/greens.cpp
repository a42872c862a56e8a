#include "greenwalk/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "greenwalk/errors.hpp"
#include "greenwalk/fourier.hpp"

namespace greenwalk {
namespace {

// mass a single transition loses track of: the unmaterialized tail plus any
// genuine sub-probability deficit. A deficit below 1e-12 is rounding in the
// weight sum of a probability law, not killed mass.
double untracked_mass(const LatticeMeasure& m) {
  double deficit = 1.0 - m.total_mass();
  if (deficit < 1e-12) deficit = 0.0;
  return m.tail_mass + deficit;
}

// most negative and most positive jump over every law the walk can invoke;
// clipped to 0 so a one-sided law yields a one-sided window
struct JumpRange {
  long long down = 0;
  long long up = 0;
};

JumpRange jump_range(const WalkSpec& walk) {
  std::vector<const LatticeMeasure*> laws;
  if (const auto* h = std::get_if<HomogeneousWalk>(&walk)) {
    laws = {&h->step};
  } else if (const auto* o = std::get_if<OscillatingWalk>(&walk)) {
    laws = {&o->neg_side, &o->pos_side};
  } else {
    const auto& c = std::get<ConcentratedWalk>(walk);
    laws = {&c.mu_plus, &c.nu_minus};
  }
  JumpRange r;
  for (const auto* m : laws) {
    if (m->empty()) continue;
    r.down = std::min(r.down, m->support_min);
    r.up = std::max(r.up, m->support_max());
  }
  return r;
}

struct Window {
  long long lo = 0;
  long long hi = 0;
  long long width() const { return hi - lo + 1; }
};

// sites reachable within `horizon` steps, stretched to cover [also_lo,
// also_hi] (absorption targets must sit inside the state space)
Window dp_window(const WalkSpec& walk, long long origin, long long horizon,
                 const DpOptions& opts, long long also_lo, long long also_hi) {
  JumpRange j = jump_range(walk);
  Window w;
  w.lo = std::min(origin + horizon * j.down, also_lo);
  w.hi = std::max(origin + horizon * j.up, also_hi);
  if (w.width() > opts.state_cap)
    throw resource_error("occupation window [" + std::to_string(w.lo) + ", " +
                         std::to_string(w.hi) + "] needs " +
                         std::to_string(w.width()) + " states, cap is " +
                         std::to_string(opts.state_cap));
  return w;
}

Window dp_window(const WalkSpec& walk, long long origin, long long horizon,
                 const DpOptions& opts) {
  return dp_window(walk, origin, horizon, opts, origin, origin);
}

// One unit of probability mass pushed through the chain step by step over a
// fixed window. Mass jumping out of the window, or dropped by a law itself,
// accumulates in leaked(). Absorbing sites are handled at arrival: their mass
// is credited to the caller and removed before it can move again.
class FrontierDp {
 public:
  FrontierDp(const WalkSpec& walk, long long origin, Window w)
      : walk_(walk),
        lo_(w.lo),
        hi_(w.hi),
        cur_(static_cast<size_t>(w.width()), 0.0),
        nxt_(cur_.size(), 0.0),
        flo_(origin),
        fhi_(origin) {
    cur_[idx(origin)] = 1.0;
  }

  double at(long long s) const {
    if (s < flo_ || s > fhi_) return 0.0;
    return cur_[idx(s)];
  }
  long long frontier_lo() const { return flo_; }
  long long frontier_hi() const { return fhi_; }
  bool exhausted() const { return flo_ > fhi_; }
  double leaked() const { return leaked_; }

  void step(const long long* absorb = nullptr, double* captured = nullptr,
            int n_absorb = 0) {
    long long nlo = hi_ + 1, nhi = lo_ - 1;
    for (long long s = flo_; s <= fhi_; ++s) {
      double m = cur_[idx(s)];
      if (m == 0.0) continue;
      const LatticeMeasure& law = law_at(walk_, s);
      leaked_ += m * leak_for(law);
      const long long base = s + law.support_min;
      const size_t nw = law.weights.size();
      for (size_t i = 0; i < nw; ++i) {
        double wgt = law.weights[i];
        if (wgt == 0.0) continue;
        long long t = base + static_cast<long long>(i);
        if (t < lo_ || t > hi_) {
          leaked_ += m * wgt;
          continue;
        }
        nxt_[idx(t)] += m * wgt;
        nlo = std::min(nlo, t);
        nhi = std::max(nhi, t);
      }
    }
    for (int k = 0; k < n_absorb; ++k) {
      long long a = absorb[k];
      if (a < nlo || a > nhi) continue;
      captured[k] += nxt_[idx(a)];
      nxt_[idx(a)] = 0.0;
    }
    for (long long s = flo_; s <= fhi_; ++s) cur_[idx(s)] = 0.0;
    cur_.swap(nxt_);
    flo_ = nlo;
    fhi_ = nhi;
  }

 private:
  size_t idx(long long s) const { return static_cast<size_t>(s - lo_); }

  // law identity is stable across steps, so the per-law leak constant is
  // computed once per distinct law (a walk carries at most two)
  double leak_for(const LatticeMeasure& law) {
    if (&law == leak_law_[0]) return leak_val_[0];
    if (&law == leak_law_[1]) return leak_val_[1];
    int slot = leak_law_[0] == nullptr ? 0 : 1;
    leak_law_[slot] = &law;
    leak_val_[slot] = untracked_mass(law);
    return leak_val_[slot];
  }

  const WalkSpec& walk_;
  long long lo_, hi_;
  std::vector<double> cur_, nxt_;
  long long flo_, fhi_;
  double leaked_ = 0.0;
  const LatticeMeasure* leak_law_[2] = {nullptr, nullptr};
  double leak_val_[2] = {0.0, 0.0};
};

bool is_pow2(long long n) { return n > 0 && (n & (n - 1)) == 0; }

// G_{2^j}(from, site) for each requested site, j running while 2^j <= horizon.
// finals, when asked for, receives the full-horizon sums G_horizon(from, site).
std::vector<std::vector<double>> occupancy_schedules(
    const WalkSpec& walk, long long from, const std::vector<long long>& sites,
    long long horizon, const DpOptions& opts,
    std::vector<long double>* finals = nullptr) {
  long long slo = from, shi = from;
  for (long long s : sites) {
    slo = std::min(slo, s);
    shi = std::max(shi, s);
  }
  Window w = dp_window(walk, from, horizon, opts, slo, shi);
  FrontierDp dp(walk, from, w);
  std::vector<std::vector<double>> sched(sites.size());
  std::vector<long double> acc(sites.size(), 0.0L);
  for (long long n = 0; n < horizon; ++n) {
    for (size_t i = 0; i < sites.size(); ++i) acc[i] += dp.at(sites[i]);
    if (is_pow2(n + 1))
      for (size_t i = 0; i < sites.size(); ++i)
        sched[i].push_back(static_cast<double>(acc[i]));
    if (n + 1 < horizon) dp.step();
  }
  if (finals) *finals = acc;
  return sched;
}

}  // namespace

GreenTable green_finite(const WalkSpec& walk, long long horizon,
                        long long origin, const DpOptions& opts) {
  validate(walk);
  if (horizon < 0) throw std::invalid_argument("horizon must be nonnegative");
  GreenTable out;
  out.origin = origin;
  out.horizon = horizon;
  if (horizon == 0) {
    out.lo = origin;
    out.values = {0.0};
    return out;
  }
  Window w = dp_window(walk, origin, horizon, opts);
  FrontierDp dp(walk, origin, w);
  std::vector<double> acc(static_cast<size_t>(w.width()), 0.0);
  long long glo = origin, ghi = origin;
  for (long long n = 0; n < horizon; ++n) {
    if (!dp.exhausted()) {
      glo = std::min(glo, dp.frontier_lo());
      ghi = std::max(ghi, dp.frontier_hi());
      for (long long s = dp.frontier_lo(); s <= dp.frontier_hi(); ++s)
        acc[static_cast<size_t>(s - w.lo)] += dp.at(s);
    }
    if (n + 1 < horizon) dp.step();
  }
  out.lo = glo;
  out.values.assign(acc.begin() + static_cast<size_t>(glo - w.lo),
                    acc.begin() + static_cast<size_t>(ghi - w.lo) + 1);
  out.leaked_mass = dp.leaked();
  return out;
}

FirstPassage first_passage(const WalkSpec& walk, long long x, long long y,
                           long long horizon, const DpOptions& opts) {
  validate(walk);
  if (horizon < 1)
    throw std::invalid_argument("first passage needs horizon >= 1");
  Window w = dp_window(walk, x, horizon, opts, y, y);
  FrontierDp dp(walk, x, w);
  FirstPassage out;
  out.from = x;
  out.target = y;
  out.horizon = horizon;
  out.pmf.assign(static_cast<size_t>(horizon) + 1, 0.0);
  long double cum = 0.0L;
  for (long long n = 1; n <= horizon; ++n) {
    double got = 0.0;
    dp.step(&y, &got, 1);
    out.pmf[static_cast<size_t>(n)] = got;
    cum += got;
    if (is_pow2(n))
      out.cumulative_checkpoints.push_back(static_cast<double>(cum));
  }
  out.leaked_mass = dp.leaked();
  out.tail = std::max(0.0, 1.0 - static_cast<double>(cum));
  out.hit_probability = limit_from_schedule(out.cumulative_checkpoints);
  return out;
}

double first_passage_identity_gap(const WalkSpec& walk, long long x,
                                  long long y, long long horizon,
                                  const DpOptions& opts) {
  validate(walk);
  if (horizon < 1)
    throw std::invalid_argument("first passage needs horizon >= 1");
  auto site_series = [&](long long from, long long at) {
    Window w = dp_window(walk, from, horizon, opts, at, at);
    FrontierDp dp(walk, from, w);
    std::vector<double> p(static_cast<size_t>(horizon), 0.0);
    for (long long n = 0; n < horizon; ++n) {
      p[static_cast<size_t>(n)] = dp.at(at);
      if (n + 1 < horizon) dp.step();
    }
    return p;
  };
  std::vector<double> pxy = site_series(x, y);
  std::vector<double> pyy = site_series(y, y);
  FirstPassage fp = first_passage(walk, x, y, horizon, opts);
  std::vector<long double> gx(static_cast<size_t>(horizon) + 1, 0.0L);
  std::vector<long double> gy(gx.size(), 0.0L);
  for (long long n = 0; n < horizon; ++n) {
    gx[static_cast<size_t>(n) + 1] = gx[static_cast<size_t>(n)] + pxy[n];
    gy[static_cast<size_t>(n) + 1] = gy[static_cast<size_t>(n)] + pyy[n];
  }
  long double worst = 0.0L;
  for (long long m = 1; m <= horizon; ++m) {
    long double rhs = (x == y) ? 1.0L : 0.0L;
    for (long long k = 1; k < m; ++k)
      rhs += static_cast<long double>(fp.pmf[static_cast<size_t>(k)]) *
             gy[static_cast<size_t>(m - k)];
    worst = std::max(worst, std::abs(gx[static_cast<size_t>(m)] - rhs));
  }
  return static_cast<double>(worst);
}

HittingRace hitting_race(const WalkSpec& walk, long long start, long long a,
                         long long b, long long horizon,
                         const DpOptions& opts) {
  validate(walk);
  if (a == b) throw std::invalid_argument("race targets must differ");
  if (horizon < 1) throw std::invalid_argument("race needs horizon >= 1");
  Window w =
      dp_window(walk, start, horizon, opts, std::min(a, b), std::max(a, b));
  FrontierDp dp(walk, start, w);
  const long long targets[2] = {a, b};
  long double pa = 0.0L, pb = 0.0L;
  std::vector<double> sched;
  for (long long n = 1; n <= horizon; ++n) {
    double got[2] = {0.0, 0.0};
    dp.step(targets, got, 2);
    pa += got[0];
    pb += got[1];
    if (is_pow2(n)) sched.push_back(static_cast<double>(pa));
  }
  HittingRace out;
  out.p_first = static_cast<double>(pa);
  out.p_second = static_cast<double>(pb);
  out.unresolved = std::max(0.0, 1.0 - static_cast<double>(pa + pb));
  out.p_first_limit = limit_from_schedule(sched);
  return out;
}

TabooGreen taboo_green(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts) {
  validate(walk);
  if (x == y) throw std::invalid_argument("taboo expectation needs x != y");
  if (horizon < 1) throw std::invalid_argument("taboo needs horizon >= 1");
  Window w = dp_window(walk, x, horizon, opts, std::min(x, y), std::max(x, y));
  FrontierDp dp(walk, x, w);
  long double c = 0.0L;
  std::vector<double> sched;
  for (long long n = 0; n < horizon; ++n) {
    c += dp.at(x);
    if (is_pow2(n + 1)) sched.push_back(static_cast<double>(c));
    if (n + 1 < horizon) {
      double got = 0.0;
      dp.step(&y, &got, 1);
    }
  }
  TabooGreen out;
  out.dp_route = limit_from_schedule(sched);
  HittingRace race = hitting_race(walk, x, x, y, horizon, opts);
  out.race_probability = race.p_first_limit;
  out.reach_probability =
      first_passage(walk, x, y, horizon, opts).hit_probability.value;
  double r = std::clamp(race.p_first_limit.value, 0.0, 1.0);
  if (r >= 1.0 - 1e-9) {
    out.formula_suppressed = true;
  } else {
    out.formula_value = 1.0 / (1.0 - r);
    out.formula_error =
        race.p_first_limit.error / ((1.0 - r) * (1.0 - r));
    out.gap = std::abs(out.dp_route.value - out.formula_value);
  }
  return out;
}

DeltaProbabilistic delta_probabilistic(const LatticeMeasure& mu, long long x,
                                       long long horizon,
                                       const DpOptions& opts) {
  if (x == 0)
    throw std::invalid_argument("potential difference needs x != 0");
  WalkSpec w = HomogeneousWalk{mu};
  DeltaProbabilistic out;
  TabooGreen tg = taboo_green(w, 0, x, horizon, opts);
  out.taboo_part = tg.dp_route.value;
  out.taboo_error = tg.dp_route.error;
  out.regime = classify_homogeneous(mu, 1e-8).regime;
  double term = 0.0, term_err = 0.0;
  if (out.regime == Regime::transient || out.regime == Regime::undetermined) {
    auto diag = occupancy_schedules(w, 0, {0}, horizon, opts);
    SequenceLimit g = limit_from_schedule(diag[0]);
    FirstPassage up = first_passage(w, 0, x, horizon, opts);
    FirstPassage dn = first_passage(w, 0, -x, horizon, opts);
    double qu = std::clamp(1.0 - up.hit_probability.value, 0.0, 1.0);
    double qd = std::clamp(1.0 - dn.hit_probability.value, 0.0, 1.0);
    term = g.value * qu * qd;
    term_err = g.error * qu * qd +
               g.value * (up.hit_probability.error * qd +
                          dn.hit_probability.error * qu);
  }
  if (out.regime == Regime::undetermined) {
    // bracket both readings instead of guessing the regime
    out.transient_part = 0.0;
    out.value_lo = out.taboo_part - out.taboo_error;
    out.value_hi = out.taboo_part + out.taboo_error + term + term_err;
    out.value = 0.5 * (out.value_lo + out.value_hi);
    out.error = 0.5 * (out.value_hi - out.value_lo);
  } else {
    if (out.regime == Regime::transient) {
      out.transient_part = term;
      out.transient_part_error = term_err;
    }
    out.value = out.taboo_part + out.transient_part;
    out.error = out.taboo_error + out.transient_part_error;
    out.value_lo = out.value - out.error;
    out.value_hi = out.value + out.error;
  }
  return out;
}

LoopIdentity loop_identity_check(const LatticeMeasure& mu, long long x,
                                 long long horizon, const DpOptions& opts) {
  if (x == 0) throw std::invalid_argument("loop identity needs x != 0");
  WalkSpec w = HomogeneousWalk{mu};
  LoopIdentity out;
  Regime regime = classify_homogeneous(mu, 1e-8).regime;
  if (regime == Regime::null_recurrent ||
      regime == Regime::positive_recurrent) {
    out.both_sides_diverge = true;
    return out;
  }
  auto diag = occupancy_schedules(w, 0, {0}, horizon, opts);
  SequenceLimit g = limit_from_schedule(diag[0]);
  out.lhs = g.value;
  out.lhs_error = g.error;
  HittingRace race = hitting_race(w, 0, 0, x, horizon, opts);
  FirstPassage up = first_passage(w, 0, x, horizon, opts);
  FirstPassage dn = first_passage(w, 0, -x, horizon, opts);
  out.p_return_before_x = race.p_first_limit.value;
  out.p_hit_x = up.hit_probability.value;
  out.p_hit_neg_x = dn.hit_probability.value;
  double pr = std::clamp(out.p_return_before_x, 0.0, 1.0 - 1e-15);
  double px = std::clamp(out.p_hit_x, 0.0, 1.0);
  double pn = std::clamp(out.p_hit_neg_x, 0.0, 1.0);
  double prod = std::clamp(px * pn, 0.0, 1.0 - 1e-15);
  out.rhs = 1.0 / ((1.0 - pr) * (1.0 - prod));
  out.rhs_error =
      out.rhs * (race.p_first_limit.error / (1.0 - pr) +
                 (up.hit_probability.error * pn + dn.hit_probability.error * px) /
                     (1.0 - prod));
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

RatioLimit ratio_limit(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts) {
  validate(walk);
  if (x == y) throw std::invalid_argument("ratio needs x != y");
  auto sx = occupancy_schedules(walk, x, {x}, horizon, opts);
  auto sy = occupancy_schedules(walk, y, {y}, horizon, opts);
  RatioLimit out;
  size_t n = std::min(sx[0].size(), sy[0].size());
  for (size_t j = 0; j < n; ++j)
    out.dp_ratio_schedule.push_back(sx[0][j] / sy[0][j]);
  out.dp_ratio = out.dp_ratio_schedule.back();
  out.dp_ratio_error =
      n >= 2 ? std::abs(out.dp_ratio - out.dp_ratio_schedule[n - 2]) : 0.0;
  TabooGreen tx = taboo_green(walk, x, y, horizon, opts);
  TabooGreen ty = taboo_green(walk, y, x, horizon, opts);
  out.taboo_ratio = tx.dp_route.value / ty.dp_route.value;
  out.taboo_ratio_error =
      std::abs(out.taboo_ratio) * (tx.dp_route.error / tx.dp_route.value +
                                   ty.dp_route.error / ty.dp_route.value);
  out.gap = std::abs(out.dp_ratio - out.taboo_ratio);
  return out;
}

ChungLimit chung_limit(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts) {
  validate(walk);
  if (x == y) throw std::invalid_argument("potential limit needs x != y");
  long long period = walk_period(walk, x, 64, opts);
  if (period == 0)
    throw std::invalid_argument(
        "no return to " + std::to_string(x) +
        " shows up within the probe horizon; the period is undefined");
  if (period > 1)
    throw std::invalid_argument("chain has period " + std::to_string(period) +
                                "; the potential limit needs an aperiodic "
                                "chain (lazify the step law)");
  std::vector<long double> fx, fy;
  auto sx = occupancy_schedules(walk, x, {x, y}, horizon, opts, &fx);
  auto sy = occupancy_schedules(walk, y, {y, x}, horizon, opts, &fy);
  TabooGreen cx = taboo_green(walk, x, y, horizon, opts);
  TabooGreen dy = taboo_green(walk, y, x, horizon, opts);
  ChungLimit out;
  out.c_value = cx.dp_route.value;
  out.alpha = cx.dp_route.value / dy.dp_route.value;
  size_t n = std::min(sx[0].size(), sy[0].size());
  for (size_t j = 0; j < n; ++j)
    out.lhs_schedule.push_back((sx[0][j] - sy[1][j]) +
                               out.alpha * (sy[0][j] - sx[1][j]));
  out.lhs_limit = limit_from_schedule(out.lhs_schedule);
  out.lhs_at_horizon = static_cast<double>((fx[0] - fy[1]) +
                                           out.alpha * (fy[0] - fx[1]));
  out.rhs = out.c_value;
  out.rhs_error = cx.dp_route.error;
  // the extra product term exists only when the diagonal sums settle to a
  // finite value and both one-way escapes carry real probability
  SequenceLimit gxx = limit_from_schedule(sx[0]);
  FirstPassage fpx = first_passage(walk, x, y, horizon, opts);
  FirstPassage fpy = first_passage(walk, y, x, horizon, opts);
  double qx = std::clamp(1.0 - fpx.hit_probability.value, 0.0, 1.0);
  double qy = std::clamp(1.0 - fpy.hit_probability.value, 0.0, 1.0);
  bool settled = gxx.verdict == SequenceLimit::Verdict::converged ||
                 gxx.verdict == SequenceLimit::Verdict::extrapolated;
  if (settled && qx * qy > 1e-6) {
    out.transient_term_included = true;
    out.rhs += gxx.value * qx * qy;
    out.rhs_error += gxx.error * qx * qy +
                     gxx.value * (fpx.hit_probability.error * qy +
                                  fpy.hit_probability.error * qx);
  }
  return out;
}

long long walk_period(const WalkSpec& walk, long long x, long long probe,
                      const DpOptions& opts) {
  validate(walk);
  if (probe < 1) throw std::invalid_argument("probe horizon must be >= 1");
  Window w = dp_window(walk, x, probe, opts);
  FrontierDp dp(walk, x, w);
  long long g = 0;
  for (long long n = 1; n <= probe; ++n) {
    dp.step();
    if (dp.at(x) > 0.0) g = std::gcd(g, n);
    if (g == 1) break;
  }
  return g;
}

}  // namespace greenwalk
