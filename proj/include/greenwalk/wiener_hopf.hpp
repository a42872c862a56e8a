#pragma once

#include <cstdint>
#include <vector>

#include "greenwalk/extrapolate.hpp"
#include "greenwalk/measure.hpp"

namespace greenwalk {

// s-discounted entrance law into N*: sum_n s^n P(first entry at step n lands
// on k). At s=1 this is the entrance measure itself.
struct LadderFactor {
  LatticeMeasure factor;
  double s = 1.0;
  long long horizon = 0;
  double unentered_mass = 0.0;   // mass still on (-inf,0] at the horizon
  double last_increment = 0.0;   // mass captured by the final doubling
  double trimmed_mass = 0.0;     // atoms dropped below the trim floor
};
LadderFactor ladder_factor(const LatticeMeasure& mu, double s, long long horizon,
                           const ConvolveOptions& opts = {});

// d_0 - exp(-L+) with L+ = sum_{n<=n_max} s^n (mu^n)+ / n. Only valid for
// s strictly below 1 (the series bound needs the geometric cutoff).
struct ExpFactor {
  LatticeMeasure factor;
  double s = 0.0;
  int n_max = 0;
  double log_truncation_bound = 0.0;
  double exp_remainder_bound = 0.0;
};
ExpFactor exp_factor(const LatticeMeasure& mu, double s, int n_max,
                     const ConvolveOptions& opts = {});

struct MonteCarloFactor {
  LatticeMeasure factor;          // empirical entrance frequencies
  std::vector<double> radius3;    // 3-sigma binomial radius per atom
  double mass_deficit = 0.0;      // unfinished trials / total
  double deficit_radius3 = 0.0;
  long long trials = 0;
  long long step_cap = 0;
  uint64_t seed = 0;
};
MonteCarloFactor entry_monte_carlo(const LatticeMeasure& mu, long long trials,
                                   long long step_cap, uint64_t seed,
                                   int workers = 1);

// Partial sums of sum_n mu^n(N*)/n; divergence <=> the entrance law is a full
// probability. The growth diagnosis is a labelled heuristic, not a proof.
struct MassCriterion {
  std::vector<double> partials;       // at dyadic n
  SequenceLimit limit;
  double last_term = 0.0;             // mu^n(N*)/n at n_max
  double last_positive_mass = 0.0;    // mu^n(N*) at n_max
  bool diverging = false;
  std::string diagnosis;              // "harmonic divergence (heuristic)", ...
};
MassCriterion mass_criterion(const LatticeMeasure& mu, int n_max,
                             const ConvolveOptions& opts = {});

struct FactorizeOptions {
  long long ladder_horizon = 10'000;    // doubled until converged or cap
  long long ladder_horizon_cap = 1'000'000;
  double ladder_capture_tol = 1e-8;     // stop when a doubling adds less
  double cmp_s = 1.0 - 1e-6;            // comparison point for the exp route
  int exp_n_max = 400;
  long long mc_trials = 100'000;
  long long mc_step_cap = 10'000;
  uint64_t mc_seed = 20250819;
  int workers = 1;
  bool with_monte_carlo = true;
};

struct FactorizationResult {
  LadderFactor via_ladder;        // production route, s = 1
  LadderFactor ladder_at_cmp_s;   // same route at the comparison s
  ExpFactor via_exponential;      // at the comparison s
  MonteCarloFactor via_monte_carlo;
  double mass_deficit = 0.0;      // 1 - mass(via_ladder)
  // Pairwise TV distances, deficit difference included as an extra atom.
  double tv_ladder_exp = 0.0;     // at equalized s
  double tv_ladder_mc = 0.0;
  double tv_exp_mc = 0.0;
  double mc_allowance3 = 0.0;     // 3-sigma TV allowance for the MC routes
};
FactorizationResult factorize(const LatticeMeasure& mu,
                              const FactorizeOptions& opts = {});

// Entrance law of the nu-walk into -N*: mirror of factorize.
LadderFactor negative_ladder_factor(const LatticeMeasure& nu, double s,
                                    long long horizon,
                                    const ConvolveOptions& opts = {});

double tv_with_deficit(const LatticeMeasure& a, const LatticeMeasure& b);

}  // namespace greenwalk
