#pragma once

#include <vector>

#include "greenwalk/classification.hpp"
#include "greenwalk/extrapolate.hpp"
#include "greenwalk/walk.hpp"

namespace greenwalk {

struct DpOptions {
  long long state_cap = 4'000'000;  // max window width; beyond -> resource_error
};

// Expected occupations G_N(origin, y) for y in [lo, lo+values.size()),
// counting steps 0..N-1. leaked_mass is probability that escaped the exact
// window (sub-probability steps, materialization tails); it bounds the total
// occupation mass unaccounted for per remaining step.
struct GreenTable {
  long long origin = 0;
  long long horizon = 0;
  long long lo = 0;
  std::vector<double> values;
  double leaked_mass = 0.0;

  double value(long long y) const {
    if (y < lo || y >= lo + static_cast<long long>(values.size())) return 0.0;
    return values[static_cast<size_t>(y - lo)];
  }
  long long hi() const { return lo + static_cast<long long>(values.size()) - 1; }
};

GreenTable green_finite(const WalkSpec& walk, long long horizon, long long origin,
                        const DpOptions& opts = {});

// Law of the first passage time T_y = min{n >= 1 : S_n = y} from x.
// pmf[k] = P_x(T_y = k) for k = 1..horizon; tail = P_x(T_y > horizon)
// (leaked mass included in tail as "never resolved within the window").
struct FirstPassage {
  long long from = 0;
  long long target = 0;
  long long horizon = 0;
  std::vector<double> pmf;  // index 0 unused
  double tail = 0.0;
  double leaked_mass = 0.0;
  std::vector<double> cumulative_checkpoints;  // P_x(T_y <= 2^j)
  SequenceLimit hit_probability;               // extrapolated P_x(T_y < inf)
};

FirstPassage first_passage(const WalkSpec& walk, long long x, long long y,
                           long long horizon, const DpOptions& opts = {});

// max_N' <= N |G_N'(x,y) - sum_{k<N'} P_x(T_y=k) G_{N'-k}(y,y)|, the
// convolution identity tying the two DPs together.
double first_passage_identity_gap(const WalkSpec& walk, long long x, long long y,
                                  long long horizon, const DpOptions& opts = {});

// E_x sum_{n < T_y} 1{S_n = x} by two routes: the taboo DP (absorption at y)
// and 1/(1 - P_x(T_x < T_y)) from the two-target race. Both carry horizon
// extrapolations; gap is the distance between the extrapolated values.
struct TabooGreen {
  SequenceLimit dp_route;
  SequenceLimit race_probability;  // P_x(T_x < T_y)
  double formula_value = 0.0;
  double formula_error = 0.0;
  double gap = 0.0;
  bool formula_suppressed = false;  // y unreachable from x: race -> 1
  double reach_probability = 0.0;   // P_x(T_y < inf) estimate
};

TabooGreen taboo_green(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts = {});

// P_start(T_a < T_b) with both targets absorbing from step 1 on.
struct HittingRace {
  double p_first = 0.0;       // absorbed at a strictly before b, by horizon
  double p_second = 0.0;
  double unresolved = 0.0;    // neither target hit by horizon (+ leaks)
  SequenceLimit p_first_limit;
};
HittingRace hitting_race(const WalkSpec& walk, long long start, long long a,
                         long long b, long long horizon,
                         const DpOptions& opts = {});

// Probabilistic route to the potential-kernel difference at x:
//   E_0 sum_{n<T_x} 1{S_n=0}  +  1{transient} G(0,0) P_0(T_x=inf) P_0(T_-x=inf).
// The regime comes from the Fourier classification; an undetermined regime
// widens [value_lo, value_hi] to cover both cases.
struct DeltaProbabilistic {
  double taboo_part = 0.0;
  double taboo_error = 0.0;
  double transient_part = 0.0;   // the product term, 0 when recurrent
  double transient_part_error = 0.0;
  Regime regime = Regime::undetermined;
  double value = 0.0;
  double value_lo = 0.0;
  double value_hi = 0.0;
  double error = 0.0;
};
DeltaProbabilistic delta_probabilistic(const LatticeMeasure& mu, long long x,
                                       long long horizon,
                                       const DpOptions& opts = {});

// G(0,0) = 1/(1 - P_0(T_0<T_x)) * 1/(1 - P_0(T_x<inf) P_0(T_-x<inf)),
// valid for transient walks; for recurrent ones both sides diverge and the
// check reports that verdict instead of numbers pretending otherwise.
struct LoopIdentity {
  bool both_sides_diverge = false;
  double lhs = 0.0;  // G(0,0) from the occupation DP (extrapolated)
  double lhs_error = 0.0;
  double rhs = 0.0;
  double rhs_error = 0.0;
  double gap = 0.0;
  double p_return_before_x = 0.0;
  double p_hit_x = 0.0;
  double p_hit_neg_x = 0.0;
};
LoopIdentity loop_identity_check(const LatticeMeasure& mu, long long x,
                                 long long horizon, const DpOptions& opts = {});

// G_N(x,x)/G_N(y,y) at the largest horizon against the ratio of the two
// taboo expectations c/d (its proven limit).
struct RatioLimit {
  double dp_ratio = 0.0;
  double dp_ratio_error = 0.0;
  double taboo_ratio = 0.0;
  double taboo_ratio_error = 0.0;
  double gap = 0.0;
  std::vector<double> dp_ratio_schedule;
};
RatioLimit ratio_limit(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts = {});

// a_N(x,y) + alpha(x,y) a_N(y,x) -> c + 1{transient} G(x,x) P_x(T_y=inf)
// P_y(T_x=inf), with a_N(x,y) = G_N(x,x) - G_N(y,x). Requires an aperiodic
// chain; a periodic one is rejected naming the period.
struct ChungLimit {
  std::vector<double> lhs_schedule;  // at dyadic N
  SequenceLimit lhs_limit;
  double lhs_at_horizon = 0.0;
  double rhs = 0.0;
  double rhs_error = 0.0;
  double alpha = 0.0;   // taboo-ratio estimate used on the left side
  double c_value = 0.0; // E_x sum_{n<T_y} 1{S_n=x}
  bool transient_term_included = false;
};
ChungLimit chung_limit(const WalkSpec& walk, long long x, long long y,
                       long long horizon, const DpOptions& opts = {});

// gcd{ n >= 1 : P_x(S_n = x) > 0 } probed by DP; 0 when no return path shows
// up within the probe horizon.
long long walk_period(const WalkSpec& walk, long long x, long long probe = 64,
                      const DpOptions& opts = {});

}  // namespace greenwalk
