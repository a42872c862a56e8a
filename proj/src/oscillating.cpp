#include "greenwalk/oscillating.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>
#include <variant>

#include "greenwalk/extrapolate.hpp"
#include "greenwalk/fft.hpp"
#include "greenwalk/quadrature.hpp"
#include "greenwalk/rng.hpp"

namespace greenwalk {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// atoms of m at positions >= lo (window copy; tails stay unaccounted)
LatticeMeasure clip_from(const LatticeMeasure& m, long long lo) {
  LatticeMeasure r;
  if (m.empty() || m.support_max() < lo) return r;
  const long long start = std::max(lo, m.support_min);
  r.support_min = start;
  r.weights.assign(m.weights.begin() + static_cast<long>(start - m.support_min),
                   m.weights.end());
  return trimmed(std::move(r));
}

// atoms of m at positions <= hi
LatticeMeasure clip_to(const LatticeMeasure& m, long long hi) {
  LatticeMeasure r;
  if (m.empty() || m.support_min > hi) return r;
  const long long stop = std::min(hi, m.support_max());
  r.support_min = m.support_min;
  r.weights.assign(m.weights.begin(),
                   m.weights.begin() + static_cast<long>(stop - m.support_min + 1));
  return trimmed(std::move(r));
}

// divide every atom position by the support gcd so that the only zero of
// 1 - char_fn sits at t = 0; the analytic tag is dropped because the scaled
// family has no closed form of its own
LatticeMeasure gcd_reduced(const LatticeMeasure& m) {
  const long long g = support_gcd(m);
  if (g <= 1) return m;
  LatticeMeasure r;
  r.support_min = m.support_min / g;
  const long long hi = m.support_max() / g;
  r.weights.assign(static_cast<size_t>(hi - r.support_min + 1), 0.0);
  for (size_t i = 0; i < m.weights.size(); ++i) {
    if (m.weights[i] == 0.0) continue;
    const long long k = m.support_min + static_cast<long long>(i);
    r.weights[static_cast<size_t>(k / g - r.support_min)] = m.weights[i];
  }
  r.tail_mass = m.tail_mass;
  return r;
}

std::string echo_factor(const char* name, const LatticeMeasure& m) {
  std::ostringstream os;
  os << name << ": ";
  if (m.empty()) {
    os << "empty";
  } else {
    os << "support [" << m.support_min << ", " << m.support_max() << "], mass "
       << m.mass();
  }
  if (m.tail_mass > 0.0) os << ", tail " << m.tail_mass;
  if (std::holds_alternative<ZetaForm>(m.analytic))
    os << ", zeta family a=" << std::get<ZetaForm>(m.analytic).a;
  if (std::holds_alternative<GeometricForm>(m.analytic))
    os << ", geometric family p=" << std::get<GeometricForm>(m.analytic).p;
  return os.str();
}

// mass of m on [y, inf) with O(1) lookups; `exact` is false only when the
// answer hides in an unmaterialized tail with no closed form behind it
struct UpperTail {
  LatticeMeasure m;
  std::vector<long double> suffix;

  explicit UpperTail(LatticeMeasure mm) : m(std::move(mm)) {
    suffix.assign(m.weights.size() + 1, 0.0L);
    for (size_t i = m.weights.size(); i-- > 0;)
      suffix[i] = suffix[i + 1] + m.weights[i];
  }

  double from(long long y, bool& exact) const {
    exact = true;
    if (m.empty()) {
      exact = m.tail_mass == 0.0;
      return m.tail_mass;
    }
    if (y <= m.support_min) return m.total_mass();
    if (y <= m.support_max())
      return static_cast<double>(suffix[static_cast<size_t>(y - m.support_min)]) +
             m.tail_mass;
    if (const auto* z = std::get_if<ZetaForm>(&m.analytic);
        z != nullptr && !z->reflected) {
      const double s = 1.0 + z->a;
      return zeta_tail(s, y - 1) / zeta_tail(s, 0);
    }
    if (const auto* g = std::get_if<GeometricForm>(&m.analytic);
        g != nullptr && !g->reflected)
      return std::pow(1.0 - g->p, static_cast<double>(y - 1));
    exact = m.tail_mass == 0.0;
    return m.tail_mass;
  }
};

QuadratureResult squared_resolvent_ring(const LatticeMeasure& one_sided,
                                        double tol) {
  const LatticeMeasure reduced = gcd_reduced(one_sided);
  SingularOptions so;
  so.tol = tol;
  so.ceiling = 1e10;
  return integrate_singular_ring(
      [&](double t) { return 1.0 / std::norm(one_minus_char(reduced, t)); },
      so);
}

}  // namespace

ConcentratedSpec concentrated_from_factors(const LatticeMeasure& mu_plus,
                                           const LatticeMeasure& nu_minus,
                                           double mass_tol) {
  ConcentratedSpec s;
  s.mu_plus = trimmed(mu_plus);
  s.nu_minus = trimmed(nu_minus);
  if (!s.mu_plus.empty() && s.mu_plus.support_min < 1) {
    std::ostringstream os;
    os << "upward factor must charge {1,2,...} only (support reaches "
       << s.mu_plus.support_min << ")";
    throw std::invalid_argument(os.str());
  }
  if (!s.nu_minus.empty() && s.nu_minus.support_max() > -1) {
    std::ostringstream os;
    os << "downward factor must charge {...,-2,-1} only (support reaches "
       << s.nu_minus.support_max() << ")";
    throw std::invalid_argument(os.str());
  }
  s.mass_plus = s.mu_plus.total_mass();
  s.mass_minus = s.nu_minus.total_mass();
  if (s.mass_plus > 1.0 + mass_tol || s.mass_minus > 1.0 + mass_tol) {
    std::ostringstream os;
    os << "entrance factors must be sub-probabilities (masses " << s.mass_plus
       << " and " << s.mass_minus << ")";
    throw std::invalid_argument(os.str());
  }
  s.transient_by_mass =
      s.mass_plus < 1.0 - mass_tol || s.mass_minus < 1.0 - mass_tol;
  s.provenance = "given";
  return s;
}

ConcentratedSpec build_concentrated(const LatticeMeasure& mu,
                                    const LatticeMeasure& nu,
                                    const FactorizeOptions& opts,
                                    double mass_tol) {
  require_probability(mu, "step law applied at sites <= 0");
  require_probability(nu, "step law applied at sites >= 1");
  std::ostringstream prov;
  prov << "factored:";
  LatticeMeasure up;
  if (mu.support_max() <= 0 && mu.tail_mass == 0.0) {
    prov << " +side never reaches {1,2,...} (entrance mass 0);";
  } else {
    FactorizationResult r = factorize(mu, opts);
    up = r.via_ladder.factor;
    prov << " +side ladder mass " << up.mass() << " (deficit " << r.mass_deficit
         << ", horizon " << r.via_ladder.horizon << ");";
  }
  LatticeMeasure down;
  if (nu.support_min >= 0 && nu.tail_mass == 0.0) {
    prov << " -side never reaches {...,-2,-1} (entrance mass 0)";
  } else {
    FactorizationResult r = factorize(reflect(nu), opts);
    down = reflect(r.via_ladder.factor);
    prov << " -side ladder mass " << down.mass() << " (deficit "
         << r.mass_deficit << ", horizon " << r.via_ladder.horizon << ")";
  }
  ConcentratedSpec s = concentrated_from_factors(up, down, mass_tol);
  s.provenance = prov.str();
  return s;
}

WalkSpec as_walk(const ConcentratedSpec& spec) {
  WalkSpec w = ConcentratedWalk{spec.mu_plus, spec.nu_minus};
  validate(w);
  return w;
}

std::vector<long long> reconstruct_trajectory(const JumpLists& lists) {
  for (long long j : lists.positive)
    if (j < 1) throw std::invalid_argument("positive jumps must be >= 1");
  for (long long j : lists.negative)
    if (j < 1)
      throw std::invalid_argument("negative jump magnitudes must be >= 1");
  std::vector<long long> traj;
  traj.reserve(lists.positive.size() + lists.negative.size() + 1);
  traj.push_back(lists.start);
  long long pos = lists.start;
  size_t ip = 0;
  size_t in = 0;
  while (ip < lists.positive.size() || in < lists.negative.size()) {
    const size_t step = ip + in;
    if (pos <= 0) {
      if (ip == lists.positive.size()) {
        std::ostringstream os;
        os << "inadmissible lists: positive jumps exhausted at step " << step
           << " (position " << pos << ")";
        throw std::invalid_argument(os.str());
      }
      pos += lists.positive[ip++];
    } else {
      if (in == lists.negative.size()) {
        std::ostringstream os;
        os << "inadmissible lists: negative jumps exhausted at step " << step
           << " (position " << pos << ")";
        throw std::invalid_argument(os.str());
      }
      pos -= lists.negative[in++];
    }
    traj.push_back(pos);
  }
  return traj;
}

JumpLists decompose_trajectory(const std::vector<long long>& traj) {
  if (traj.empty())
    throw std::invalid_argument("cannot decompose an empty trajectory");
  JumpLists lists;
  lists.start = traj.front();
  for (size_t i = 0; i + 1 < traj.size(); ++i) {
    const long long jump = traj[i + 1] - traj[i];
    if (traj[i] <= 0) {
      if (jump < 1) {
        std::ostringstream os;
        os << "trajectory breaks the side rule at index " << i << ": jump "
           << jump << " from position " << traj[i]
           << " (an up-jump is required at or below 0)";
        throw std::invalid_argument(os.str());
      }
      lists.positive.push_back(jump);
    } else {
      if (jump > -1) {
        std::ostringstream os;
        os << "trajectory breaks the side rule at index " << i << ": jump "
           << jump << " from position " << traj[i]
           << " (a down-jump is required at or above 1)";
        throw std::invalid_argument(os.str());
      }
      lists.negative.push_back(-jump);
    }
  }
  return lists;
}

double transition_probability(const ConcentratedSpec& spec, long long x,
                              long long y, long long n) {
  if (n < 0) throw std::invalid_argument("transition needs n >= 0");
  if (n == 0) return x == y ? 1.0 : 0.0;
  const LatticeMeasure& mu = spec.mu_plus;
  const LatticeMeasure& nu = spec.nu_minus;
  // the split over the number of up-jumps constrains only the last jump on
  // each side: the final up-jump must land at or above y, the final
  // down-jump at or below y-1 (both vacuous when y makes them automatic)
  const LatticeMeasure mu_last = clip_from(mu, y);
  const LatticeMeasure nu_last = clip_to(nu, y - 1);
  std::vector<LatticeMeasure> up_parts(static_cast<size_t>(n) + 1);
  std::vector<LatticeMeasure> down_parts(static_cast<size_t>(n) + 1);
  up_parts[0] = dirac(0);
  down_parts[0] = dirac(0);
  LatticeMeasure up_pow = dirac(0);
  LatticeMeasure down_pow = dirac(0);
  for (long long k = 1; k <= n; ++k) {
    if (!mu_last.empty() && !up_pow.empty())
      up_parts[static_cast<size_t>(k)] = convolve(up_pow, mu_last);
    if (!nu_last.empty() && !down_pow.empty())
      down_parts[static_cast<size_t>(k)] = convolve(down_pow, nu_last);
    if (k < n) {
      up_pow = mu.empty() ? LatticeMeasure{} : convolve(up_pow, mu);
      down_pow = nu.empty() ? LatticeMeasure{} : convolve(down_pow, nu);
    }
  }
  const long long target = y - x;
  long double acc = 0.0L;
  for (long long k = 0; k <= n; ++k) {
    const LatticeMeasure& a = up_parts[static_cast<size_t>(k)];
    const LatticeMeasure& b = down_parts[static_cast<size_t>(n - k)];
    if (a.empty() || b.empty()) continue;
    const long long lo = std::max(a.support_min, target - b.support_max());
    const long long hi = std::min(a.support_max(), target - b.support_min);
    for (long long v = lo; v <= hi; ++v)
      acc += static_cast<long double>(a.at(v)) * b.at(target - v);
  }
  return static_cast<double>(acc);
}

std::vector<double> renewal_sequence(const LatticeMeasure& mu_plus,
                                     long long up_to) {
  if (up_to < 0) throw std::invalid_argument("renewal needs up_to >= 0");
  const LatticeMeasure up = trimmed(mu_plus);
  if (!up.empty() && up.support_min < 1)
    throw std::invalid_argument(
        "renewal sequence needs a strictly positive step law");
  const size_t n = static_cast<size_t>(up_to) + 1;
  std::vector<std::pair<long long, double>> atoms;
  if (!up.empty()) {
    const long long hi = std::min(up.support_max(), up_to);
    for (long long k = up.support_min; k <= hi; ++k)
      if (up.at(k) != 0.0) atoms.push_back({k, up.at(k)});
  }
  std::vector<double> u;
  if (atoms.size() <= 64) {
    std::vector<long double> acc(n, 0.0L);
    acc[0] = 1.0L;
    for (size_t m = 1; m < n; ++m) {
      long double v = 0.0L;
      for (const auto& [k, w] : atoms) {
        if (k > static_cast<long long>(m)) break;
        v += w * acc[m - static_cast<size_t>(k)];
      }
      acc[m] = v;
    }
    u.assign(acc.begin(), acc.end());
  } else {
    std::vector<double> p(n, 0.0);
    for (const auto& [k, w] : atoms) p[static_cast<size_t>(k)] = w;
    u = power_series_inverse_one_minus(p, n);
  }
  for (double& v : u) v = std::min(1.0, std::max(0.0, v));
  return u;
}

namespace {

// (1/2pi) int Re(1/((1 - s f+)(1 - s f-))) dt at one discount level; the
// factors enter through 1 - s f = (1-s) + s (1-f) to keep the small-angle
// behaviour when s hugs 1
QuadratureResult resolvent_pair_integral(const ConcentratedSpec& spec, double s,
                                         double tol) {
  SingularOptions so;
  so.tol = tol;
  return integrate_singular_ring(
      [&](double t) {
        const std::complex<double> dp =
            (1.0 - s) + s * one_minus_char(spec.mu_plus, t);
        const std::complex<double> dm =
            (1.0 - s) + s * one_minus_char(spec.nu_minus, t);
        return (1.0 / (dp * dm)).real();
      },
      so);
}

}  // namespace

GreenZ green_z(const ConcentratedSpec& spec, GreenZMode mode,
               long long series_budget, int s_levels, double quad_tol) {
  GreenZ g;
  g.mode = mode;
  std::ostringstream detail;

  if (mode == GreenZMode::series) {
    if (series_budget < 1)
      throw std::invalid_argument("series mode needs a positive budget");
    long long cap = series_budget;
    bool capped = false;
    if (spec.mu_plus.tail_mass > 0.0 && spec.mu_plus.support_max() < cap) {
      cap = spec.mu_plus.support_max();
      capped = true;
    }
    if (spec.nu_minus.tail_mass > 0.0 && -spec.nu_minus.support_min < cap) {
      cap = -spec.nu_minus.support_min;
      capped = true;
    }
    const LatticeMeasure mirrored = reflect(spec.nu_minus);
    const std::vector<double> u = renewal_sequence(spec.mu_plus, cap);
    const bool same = mirrored.support_min == spec.mu_plus.support_min &&
                      mirrored.weights == spec.mu_plus.weights;
    const std::vector<double> v = same ? u : renewal_sequence(mirrored, cap);
    long double acc = 0.0L;
    long long checkpoint = 1;
    for (long long m = 0; m <= cap; ++m) {
      acc += static_cast<long double>(u[static_cast<size_t>(m)]) *
             v[static_cast<size_t>(m)];
      if (m == checkpoint || m == cap) {
        g.partials.push_back(static_cast<double>(acc));
        if (m == checkpoint) checkpoint *= 2;
      }
    }
    if (g.partials.empty()) g.partials.push_back(static_cast<double>(acc));
    g.limit = limit_from_schedule(g.partials);
    g.tail_note = g.partials.size() >= 2
                      ? g.partials.back() - g.partials[g.partials.size() - 2]
                      : g.partials.back();
    detail << "sum of paired hitting probabilities up to m=" << cap
           << ", final term " << u[static_cast<size_t>(cap)] *
                                     v[static_cast<size_t>(cap)];
    if (capped) detail << "; capped at the materialized factor window";
    g.detail = detail.str();
    return g;
  }

  if (mode == GreenZMode::fourier_s) {
    if (s_levels < 1)
      throw std::invalid_argument("discount schedule needs s_levels >= 1");
    double last_quad_error = 0.0;
    for (int j = 1; j <= s_levels; ++j) {
      const double s = 1.0 - std::ldexp(1.0, -j);
      QuadratureResult q = resolvent_pair_integral(spec, s, quad_tol);
      g.partials.push_back(q.value / kTwoPi);
      last_quad_error = q.abs_error_estimate / kTwoPi;
    }
    g.limit = limit_from_schedule(g.partials);
    g.tail_note = last_quad_error;
    detail << "resolvent pairing on the discount schedule s_j = 1 - 2^-j, j <= "
           << s_levels;
    g.detail = detail.str();
    return g;
  }

  // symmetric mode
  const LatticeMeasure mirrored = reflect(spec.nu_minus);
  bool mirror_ok = mirrored.support_min == spec.mu_plus.support_min &&
                   mirrored.weights.size() == spec.mu_plus.weights.size() &&
                   std::abs(mirrored.tail_mass - spec.mu_plus.tail_mass) <= 1e-12;
  if (mirror_ok)
    for (size_t i = 0; i < mirrored.weights.size(); ++i)
      if (std::abs(mirrored.weights[i] - spec.mu_plus.weights[i]) > 1e-12) {
        mirror_ok = false;
        break;
      }
  if (!mirror_ok)
    throw std::invalid_argument(
        "symmetric mode needs nu_minus to mirror mu_plus exactly");
  QuadratureResult q = squared_resolvent_ring(spec.mu_plus, quad_tol);
  g.limit.value = q.value / kTwoPi;
  g.limit.error = q.abs_error_estimate / kTwoPi;
  g.limit.last_partial = g.limit.value;
  g.limit.verdict = q.diverged ? SequenceLimit::Verdict::diverging
                               : q.schedule_verdict;
  g.tail_note = q.singular_window;
  detail << "squared-resolvent ring quadrature, " << q.nodes_used << " nodes";
  if (q.diverged)
    detail << ", diverging with shell growth rate " << q.divergence_rate;
  g.detail = detail.str();
  return g;
}

namespace {

struct RangeSampler {
  std::vector<long double> cum;  // prefix sums over materialized atoms
  double mat_mass = 0.0;
  double with_tail = 0.0;
  long long kmin = 0;

  explicit RangeSampler(const LatticeMeasure& m) {
    cum.reserve(m.weights.size());
    long double acc = 0.0L;
    for (double w : m.weights) {
      acc += w;
      cum.push_back(acc);
    }
    mat_mass = static_cast<double>(acc);
    with_tail = mat_mass + m.tail_mass;
    kmin = m.support_min;
  }

  // 0: landed on an atom (k set), 1: beyond-window tail, 2: escape mass
  int draw(CounterRng& rng, long long& k) const {
    const double u = rng.next_double();
    if (u < mat_mass) {
      const size_t idx = static_cast<size_t>(
          std::upper_bound(cum.begin(), cum.end(), static_cast<long double>(u)) -
          cum.begin());
      k = kmin + static_cast<long long>(std::min(idx, cum.size() - 1));
      return 0;
    }
    if (u < with_tail) return 1;
    return 2;
  }
};

}  // namespace

IntersectionEstimate intersection_estimator(const ConcentratedSpec& spec,
                                            long long trials, long long horizon,
                                            uint64_t seed, int workers) {
  if (trials < 1) throw std::invalid_argument("estimator needs trials >= 1");
  if (horizon < 1) throw std::invalid_argument("estimator needs horizon >= 1");
  const RangeSampler up(spec.mu_plus);
  const RangeSampler down(reflect(spec.nu_minus));

  std::vector<long long> horizons;
  for (long long h = 1; h < horizon; h *= 2) horizons.push_back(h);
  horizons.push_back(horizon);
  const size_t levels = horizons.size();

  struct Bucket {
    long long count_sum = 0;
    long long count_sq = 0;
    long long censored = 0;
    std::vector<long long> level_sum;
  };

  const int nw = std::clamp(workers, 1, 64);
  std::vector<Bucket> buckets(static_cast<size_t>(nw));
  const long long chunk = (trials + nw - 1) / nw;

  auto run = [&](int w) {
    Bucket& b = buckets[static_cast<size_t>(w)];
    b.level_sum.assign(levels, 0);
    std::vector<long long> plus_pos, minus_pos;
    std::vector<long long> per_level(levels);
    const long long lo = static_cast<long long>(w) * chunk;
    const long long hi = std::min(trials, lo + chunk);
    for (long long t = lo; t < hi; ++t) {
      bool censored = false;
      auto roll = [&](const RangeSampler& side, CounterRng rng,
                      std::vector<long long>& out) {
        out.clear();
        out.push_back(0);
        long long pos = 0;
        for (long long st = 0; st < horizon; ++st) {
          long long k = 0;
          const int what = side.draw(rng, k);
          if (what == 1) {
            censored = true;
            return;
          }
          if (what == 2) return;
          pos += k;
          out.push_back(pos);
        }
      };
      roll(up, CounterRng::for_trial(seed, static_cast<uint64_t>(2 * t)), plus_pos);
      roll(down, CounterRng::for_trial(seed, static_cast<uint64_t>(2 * t + 1)),
           minus_pos);

      std::fill(per_level.begin(), per_level.end(), 0);
      long long matches = 0;
      size_t i = 0, j = 0;
      while (i < plus_pos.size() && j < minus_pos.size()) {
        if (plus_pos[i] < minus_pos[j]) {
          ++i;
        } else if (plus_pos[i] > minus_pos[j]) {
          ++j;
        } else {
          const long long needed =
              static_cast<long long>(std::max(i, j));
          const size_t lvl = static_cast<size_t>(
              std::lower_bound(horizons.begin(), horizons.end(),
                               std::max(needed, 1LL)) -
              horizons.begin());
          ++per_level[lvl];
          ++matches;
          ++i;
          ++j;
        }
      }
      long long running = 0;
      for (size_t l = 0; l < levels; ++l) {
        running += per_level[l];
        b.level_sum[l] += running;
      }
      b.count_sum += matches;
      b.count_sq += matches * matches;
      if (censored) ++b.censored;
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
  total.level_sum.assign(levels, 0);
  for (const Bucket& b : buckets) {
    total.count_sum += b.count_sum;
    total.count_sq += b.count_sq;
    total.censored += b.censored;
    for (size_t l = 0; l < levels; ++l) total.level_sum[l] += b.level_sum[l];
  }

  IntersectionEstimate est;
  est.trials = trials;
  est.horizon = horizon;
  const long double n = static_cast<long double>(trials);
  const long double mean = total.count_sum / n;
  est.mean = static_cast<double>(mean);
  if (trials > 1) {
    const long double var =
        (total.count_sq - n * mean * mean) / (n - 1.0L);
    est.sigma = static_cast<double>(std::sqrt(std::max(0.0L, var) / n));
  }
  est.censored_fraction = static_cast<double>(total.censored / n);
  est.horizon_curve.reserve(levels);
  for (size_t l = 0; l < levels; ++l)
    est.horizon_curve.push_back(static_cast<double>(total.level_sum[l] / n));
  return est;
}

InvariantMeasureCheck invariant_measure(const ConcentratedSpec& spec,
                                        long long window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (std::abs(spec.mass_plus - 1.0) > 1e-9 ||
      std::abs(spec.mass_minus - 1.0) > 1e-9) {
    std::ostringstream os;
    os << "stationarity check needs probability factors (masses "
       << spec.mass_plus << " and " << spec.mass_minus << ")";
    throw std::invalid_argument(os.str());
  }
  const UpperTail plus(spec.mu_plus);
  const UpperTail minus_mirror(reflect(spec.nu_minus));

  double leakage = 0.0;
  auto pi_at = [&](long long y) {
    bool exact = true;
    // nu_minus((-inf, y-1]) read off the mirrored upper tail
    const double v = y >= 1 ? plus.from(y, exact) : minus_mirror.from(1 - y, exact);
    if (!exact) leakage += v;
    return v;
  };

  InvariantMeasureCheck chk;
  chk.window = window;
  chk.pi.reserve(static_cast<size_t>(2 * window + 1));
  long double mass = 0.0L;
  for (long long y = -window; y <= window; ++y) {
    const double v = pi_at(y);
    chk.pi.push_back(v);
    mass += v;
  }
  chk.window_mass = static_cast<double>(mass);

  // every materialized jump is accounted for exactly; jumps hiding in the
  // factor tails can only add mass, bounded per target site by the tail
  long double residual = 0.0L;
  for (long long y = -window; y <= window; ++y) {
    long double in = 0.0L;
    for (size_t i = 0; i < spec.mu_plus.weights.size(); ++i) {
      const double w = spec.mu_plus.weights[i];
      if (w == 0.0) continue;
      const long long z =
          y - (spec.mu_plus.support_min + static_cast<long long>(i));
      if (z <= 0) in += w * pi_at(z);
    }
    for (size_t i = 0; i < spec.nu_minus.weights.size(); ++i) {
      const double w = spec.nu_minus.weights[i];
      if (w == 0.0) continue;
      const long long z =
          y - (spec.nu_minus.support_min + static_cast<long long>(i));
      if (z >= 1) in += w * pi_at(z);
    }
    residual += std::fabs(static_cast<double>(in) -
                          chk.pi[static_cast<size_t>(y + window)]);
    leakage += spec.mu_plus.tail_mass + spec.nu_minus.tail_mass;
  }
  chk.residual_l1 = static_cast<double>(residual);
  chk.boundary_leakage = leakage;
  chk.mean_plus = mean(spec.mu_plus).value;
  chk.mean_minus = mean(spec.nu_minus).value;
  return chk;
}

ClassificationReport classify_oscillating(const ConcentratedSpec& spec,
                                          double tol) {
  ClassificationReport rep;
  rep.inputs_echo = echo_factor("mu_plus", spec.mu_plus) + "; " +
                    echo_factor("nu_minus", spec.nu_minus);
  auto add = [&](const std::string& name, double value, double error,
                 const std::string& prov, const std::string& note) {
    rep.evidence.push_back({name, value, error, prov, note});
  };

  add("entrance mass (positive side)", spec.mass_plus, 0.0, spec.provenance,
      "");
  add("entrance mass (negative side)", spec.mass_minus, 0.0, spec.provenance,
      "");
  if (spec.transient_by_mass || spec.mass_plus < 1.0 - tol ||
      spec.mass_minus < 1.0 - tol) {
    rep.regime = Regime::transient;
    rep.evidence.back().note =
        "defective entrance law: escape to infinity has positive probability";
    return rep;
  }

  const MeanResult mp = mean(spec.mu_plus);
  const MeanResult mm = mean(spec.nu_minus);
  auto mean_note = [](const MeanResult& m) {
    if (m.infinite) return std::string("infinite by the family tail exponent");
    std::ostringstream os;
    os << (m.exact ? "exact family value" : "finite on window");
    if (m.tail_bound > 0.0) os << ", tail bound " << m.tail_bound;
    return os.str();
  };
  add("mean of the upward factor", mp.value, mp.tail_bound,
      mp.exact ? "closed form" : "windowed sum", mean_note(mp));
  add("mean of the downward factor", mm.value, mm.tail_bound,
      mm.exact ? "closed form" : "windowed sum", mean_note(mm));

  const bool finite_plus = !mp.infinite;
  const bool finite_minus = !mm.infinite;
  if (finite_plus && finite_minus) {
    rep.regime = Regime::positive_recurrent;
    return rep;
  }

  if (finite_plus != finite_minus) {
    GreenZ ser = green_z(spec, GreenZMode::series, 1 << 15, 18, 1e-8);
    const bool growing =
        ser.limit.verdict == SequenceLimit::Verdict::diverging ||
        ser.limit.verdict == SequenceLimit::Verdict::stalled;
    add("green series partial sum", ser.limit.last_partial, 0.0,
        "renewal pairing", std::string(to_string(ser.limit.verdict)));
    rep.regime = growing ? Regime::null_recurrent : Regime::undetermined;
    return rep;
  }

  // both means infinite: transience needs both squared-resolvent integrals
  QuadratureResult qp = squared_resolvent_ring(spec.mu_plus, 1e-9);
  QuadratureResult qm = squared_resolvent_ring(reflect(spec.nu_minus), 1e-9);
  auto quad_note = [](const QuadratureResult& q) {
    std::ostringstream os;
    if (q.diverged)
      os << "diverging, shell growth rate " << q.divergence_rate;
    else
      os << "finite (" << to_string(q.schedule_verdict) << ")";
    return os.str();
  };
  add("squared-resolvent integral (upward side)", qp.value,
      qp.abs_error_estimate, "shell quadrature", quad_note(qp));
  add("squared-resolvent integral (downward side)", qm.value,
      qm.abs_error_estimate, "shell quadrature", quad_note(qm));
  const bool pf = !qp.diverged &&
                  qp.schedule_verdict != SequenceLimit::Verdict::diverging;
  const bool mf = !qm.diverged &&
                  qm.schedule_verdict != SequenceLimit::Verdict::diverging;
  if (pf && mf) {
    rep.regime = Regime::transient;
    return rep;
  }

  // the open case: attach both trends and refuse to guess
  GreenZ ser = green_z(spec, GreenZMode::series, 1 << 15, 18, 1e-8);
  GreenZ sch = green_z(spec, GreenZMode::fourier_s, 1 << 15, 18, 1e-8);
  add("green series trend", ser.limit.last_partial, ser.limit.last_increment,
      "renewal pairing", std::string(to_string(ser.limit.verdict)));
  add("green discount-schedule trend", sch.limit.last_partial,
      sch.limit.last_increment, "resolvent pairing",
      std::string(to_string(sch.limit.verdict)));
  rep.regime = Regime::undetermined;
  return rep;
}

}  // namespace greenwalk
