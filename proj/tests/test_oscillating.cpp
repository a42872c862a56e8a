#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>
#include <greenwalk/measure.hpp>
#include <greenwalk/oscillating.hpp>
#include <map>
#include <random>
#include <string>
#include <vector>

using namespace greenwalk;

namespace {

ConcentratedSpec given(const LatticeMeasure& up, const LatticeMeasure& down) {
  return concentrated_from_factors(up, down);
}

ConcentratedSpec zigzag() { return given(dirac(1), dirac(-1)); }

LatticeMeasure half_half() { return points_measure({{1, 0.5}, {2, 0.5}}); }

// distribution of the chain after one step, exact map arithmetic
using Dist = std::map<long long, double>;
Dist evolve(const Dist& d, const LatticeMeasure& up, const LatticeMeasure& down) {
  Dist out;
  for (const auto& [pos, w] : d) {
    const LatticeMeasure& law = pos <= 0 ? up : down;
    for (size_t i = 0; i < law.weights.size(); ++i) {
      if (law.weights[i] == 0.0) continue;
      out[pos + law.support_min + static_cast<long long>(i)] +=
          w * law.weights[i];
    }
  }
  return out;
}

// u_m by the plain recursion, kept independent of the module's fast path
std::vector<double> renewal_by_recursion(const LatticeMeasure& up,
                                         long long up_to) {
  std::vector<long double> u(static_cast<size_t>(up_to) + 1, 0.0L);
  u[0] = 1.0L;
  for (long long m = 1; m <= up_to; ++m) {
    long double acc = 0.0L;
    for (long long k = 1; k <= m; ++k) acc += up.at(k) * u[static_cast<size_t>(m - k)];
    u[static_cast<size_t>(m)] = acc;
  }
  return std::vector<double>(u.begin(), u.end());
}

long long sample_atom(const LatticeMeasure& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng) * m.mass();
  double acc = 0.0;
  for (size_t i = 0; i < m.weights.size(); ++i) {
    acc += m.weights[i];
    if (u < acc) return m.support_min + static_cast<long long>(i);
  }
  return m.support_max();
}

std::vector<long long> simulate_path(const LatticeMeasure& up,
                                     const LatticeMeasure& down,
                                     long long start, int steps,
                                     std::mt19937_64& rng) {
  std::vector<long long> traj{start};
  long long pos = start;
  for (int i = 0; i < steps; ++i) {
    pos += sample_atom(pos <= 0 ? up : down, rng);
    traj.push_back(pos);
  }
  return traj;
}

bool same_lists(const JumpLists& a, const JumpLists& b) {
  return a.start == b.start && a.positive == b.positive &&
         a.negative == b.negative;
}

std::string thrown_message(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("the exhaustion rule rebuilds the two canonical paths") {
  std::vector<long long> a = reconstruct_trajectory({0, {2}, {1, 1}});
  CHECK(a == std::vector<long long>{0, 2, 1, 0});

  std::vector<long long> b = reconstruct_trajectory({0, {1, 1}, {2}});
  CHECK(b == std::vector<long long>{0, 1, -1, 0});

  // a positive start consumes the negative list first
  std::vector<long long> c = reconstruct_trajectory({3, {1}, {2, 2}});
  CHECK(c == std::vector<long long>{3, 1, -1, 0});

  CHECK(reconstruct_trajectory({5, {}, {}}) == std::vector<long long>{5});
}

TEST_CASE("exhausting a jump list names the failing step") {
  std::string m1 = thrown_message([] { reconstruct_trajectory({0, {}, {1}}); });
  CHECK(m1.find("positive") != std::string::npos);
  CHECK(m1.find("step 0") != std::string::npos);

  // 0 -> 1 -> 0, then the positive list is already spent
  std::string m2 =
      thrown_message([] { reconstruct_trajectory({0, {1}, {1, 1}}); });
  CHECK(m2.find("positive") != std::string::npos);
  CHECK(m2.find("step 2") != std::string::npos);

  std::string m3 = thrown_message([] { reconstruct_trajectory({2, {1}, {}}); });
  CHECK(m3.find("negative") != std::string::npos);
  CHECK(m3.find("step 0") != std::string::npos);
}

TEST_CASE("decomposition recovers the ordered jump budgets") {
  JumpLists a = decompose_trajectory({0, 2, 1, 0});
  CHECK(a.start == 0);
  CHECK(a.positive == std::vector<long long>{2});
  CHECK(a.negative == std::vector<long long>{1, 1});

  JumpLists b = decompose_trajectory({0, 1, 0});
  CHECK(b.start == 0);
  CHECK(b.positive == std::vector<long long>{1});
  CHECK(b.negative == std::vector<long long>{1});

  JumpLists c = decompose_trajectory({7});
  CHECK(c.start == 7);
  CHECK(c.positive.empty());
  CHECK(c.negative.empty());
}

TEST_CASE("side-rule violations name the offending index") {
  std::string m1 = thrown_message([] { decompose_trajectory({0, -1}); });
  CHECK(m1.find("index 0") != std::string::npos);

  std::string m2 = thrown_message([] { decompose_trajectory({1, 2}); });
  CHECK(m2.find("index 0") != std::string::npos);

  std::string m3 = thrown_message([] { decompose_trajectory({0, 1, 1}); });
  CHECK(m3.find("index 1") != std::string::npos);
}

TEST_CASE("ten thousand random walks survive the round trip") {
  struct Pair {
    LatticeMeasure up;
    LatticeMeasure down;
  };
  std::vector<Pair> specs = {
      {dirac(1), dirac(-1)},
      {half_half(), dirac(-1)},
      {points_measure({{1, 1.0 / 3}, {2, 1.0 / 3}, {3, 1.0 / 3}}),
       points_measure({{-1, 0.5}, {-2, 0.5}})},
      {points_measure({{1, 0.1}, {2, 0.2}, {5, 0.7}}),
       points_measure({{-1, 0.6}, {-3, 0.4}})},
      {points_measure({{2, 0.5}, {3, 0.5}}),
       points_measure({{-2, 0.5}, {-5, 0.5}})},
  };
  std::mt19937_64 rng(20250819);
  std::uniform_int_distribution<int> len(1, 1000);
  std::uniform_int_distribution<long long> origin(-3, 3);
  for (const Pair& p : specs) {
    for (int t = 0; t < 2000; ++t) {
      std::vector<long long> traj =
          simulate_path(p.up, p.down, origin(rng), len(rng), rng);
      JumpLists lists = decompose_trajectory(traj);
      CHECK(reconstruct_trajectory(lists) == traj);
      CHECK(same_lists(decompose_trajectory(reconstruct_trajectory(lists)),
                       lists));
    }
  }
}

TEST_CASE("a zigzag returns in two steps and never in three") {
  ConcentratedSpec z = zigzag();
  CHECK(transition_probability(z, 0, 0, 0) == 1.0);
  CHECK(transition_probability(z, 0, 0, 1) == 0.0);
  CHECK(transition_probability(z, 0, 0, 2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(transition_probability(z, 0, 0, 3) == 0.0);
  CHECK(transition_probability(z, 0, 1, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(transition_probability(z, 4, 3, 1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("the crossing-split formula matches a direct evolution") {
  struct Pair {
    LatticeMeasure up;
    LatticeMeasure down;
  };
  // the last pair is defective: mass leaks and the row sums stay below one
  std::vector<Pair> specs = {
      {half_half(), dirac(-1)},
      {dirac(1), points_measure({{-1, 0.5}, {-2, 0.5}})},
      {points_measure({{1, 0.3}, {3, 0.7}}),
       points_measure({{-1, 0.5}, {-4, 0.5}})},
      {points_measure({{1, 0.4}, {2, 0.4}}), points_measure({{-1, 0.9}})},
  };
  for (const Pair& p : specs) {
    ConcentratedSpec spec = given(p.up, p.down);
    for (long long x : {0LL, 2LL, -3LL}) {
      Dist d{{x, 1.0}};
      for (long long n = 0; n <= 20; ++n) {
        double row = 0.0;
        for (long long y = -20; y <= 20; ++y) {
          double dp = 0.0;
          if (auto it = d.find(y); it != d.end()) dp = it->second;
          double formula = transition_probability(spec, x, y, n);
          CHECK(std::abs(formula - dp) <= 1e-12);
          row += formula;
        }
        // the window [-20,20] only misses mass the walk really carried out
        double out_of_window = 0.0;
        for (const auto& [pos, w] : d)
          if (pos < -20 || pos > 20) out_of_window += w;
        CHECK(row <= 1.0 + 1e-12);
        CHECK(row + out_of_window <=
              1.0 + 1e-12);
        d = evolve(d, p.up, p.down);
      }
    }
  }
}

TEST_CASE("transition rows of a probability spec sum to one") {
  ConcentratedSpec spec = given(half_half(), dirac(-1));
  for (long long n : {1LL, 5LL, 9LL}) {
    double row = 0.0;
    for (long long y = -2 * n - 2; y <= 2 * n + 2; ++y)
      row += transition_probability(spec, 0, y, n);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("renewal coefficients follow the half-half ladder") {
  std::vector<double> u = renewal_sequence(half_half(), 64);
  CHECK(u[0] == 1.0);
  CHECK(u[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(u[2] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(u[3] == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(u[4] == doctest::Approx(11.0 / 16).epsilon(1e-15));

  std::vector<double> oracle = renewal_by_recursion(half_half(), 64);
  for (size_t m = 0; m < u.size(); ++m)
    CHECK(std::abs(u[m] - oracle[m]) <= 1e-14);

  // mean step 3/2, so u_m -> 2/3 at a geometric rate
  std::vector<double> far = renewal_sequence(half_half(), 64);
  CHECK(std::abs(far[60] - 2.0 / 3) <= 1e-6);
  CHECK(std::abs(far[64] - 2.0 / 3) <= 1e-6);
}

TEST_CASE("the fast and the slow renewal routes agree") {
  // 200 atoms force the series-inversion path; the recursion is the oracle
  std::vector<std::pair<long long, double>> pts;
  double norm = 0.0;
  for (long long k = 1; k <= 200; ++k) norm += 1.0 / (k * k);
  for (long long k = 1; k <= 200; ++k) pts.push_back({k, 1.0 / (k * k) / norm});
  LatticeMeasure dense = points_measure(pts);

  std::vector<double> fast = renewal_sequence(dense, 4096);
  std::vector<double> slow = renewal_by_recursion(dense, 4096);
  REQUIRE(fast.size() == 4097);
  double worst = 0.0;
  for (size_t m = 0; m < fast.size(); ++m)
    worst = std::max(worst, std::abs(fast[m] - slow[m]));
  CHECK(worst <= 1e-11);
}

TEST_CASE("green series diverges step for step on the zigzag") {
  GreenZ g = green_z(zigzag(), GreenZMode::series, 4096);
  REQUIRE(!g.partials.empty());
  CHECK(g.partials.back() == doctest::Approx(4097.0).epsilon(1e-12));
  for (size_t i = 1; i < g.partials.size(); ++i)
    CHECK(g.partials[i] >= g.partials[i - 1]);
  CHECK(g.limit.verdict == SequenceLimit::Verdict::diverging);
}

TEST_CASE("a finite-mean up side keeps the series growing without bound") {
  // down side deterministic: its mirrored walk hits every site, factor 1
  ConcentratedSpec spec = given(half_half(), dirac(-1));
  GreenZ g = green_z(spec, GreenZMode::series, 2048);
  std::vector<double> u = renewal_by_recursion(half_half(), 2048);
  long double acc = 0.0L;
  for (double x : u) acc += x;
  CHECK(g.partials.back() ==
        doctest::Approx(static_cast<double>(acc)).epsilon(1e-10));
  CHECK(g.limit.verdict == SequenceLimit::Verdict::diverging);
}

TEST_CASE("series checkpoints stop at the materialized window") {
  ConcentratedSpec spec =
      given(zeta_measure(0.3, 4096), zeta_measure(0.3, 4096, true));
  GreenZ g = green_z(spec, GreenZMode::series);
  CHECK(g.detail.find("capped") != std::string::npos);
  for (size_t i = 1; i < g.partials.size(); ++i)
    CHECK(g.partials[i] >= g.partials[i - 1]);
}

TEST_CASE("mirrored heavy tails make a transient chain three ways") {
  LatticeMeasure up = zeta_measure(0.3, 1 << 19);
  ConcentratedSpec spec = given(up, reflect(up));

  GreenZ sym = green_z(spec, GreenZMode::symmetric);
  CHECK(sym.limit.verdict != SequenceLimit::Verdict::diverging);
  CHECK(sym.limit.value > 1.0);
  CHECK(std::isfinite(sym.limit.value));

  GreenZ ser = green_z(spec, GreenZMode::series);
  CHECK(ser.limit.verdict != SequenceLimit::Verdict::diverging);
  CHECK(std::abs(ser.limit.value - sym.limit.value) <=
        1e-3 * sym.limit.value);

  GreenZ fs = green_z(spec, GreenZMode::fourier_s);
  CHECK(fs.limit.verdict != SequenceLimit::Verdict::diverging);
  CHECK(std::abs(fs.limit.value - sym.limit.value) <= 1e-2 * sym.limit.value);
  for (double v : fs.partials) CHECK(std::isfinite(v));
  for (size_t i = 1; i < fs.partials.size(); ++i)
    CHECK(fs.partials[i] >= fs.partials[i - 1] - 1e-9);
}

TEST_CASE("the resolvent schedule follows the zigzag closed form") {
  // two deterministic unit factors give exactly 1/(1-s^2) at every level
  GreenZ fs = green_z(zigzag(), GreenZMode::fourier_s, 1 << 19, 20);
  REQUIRE(fs.partials.size() == 20);
  for (int j = 1; j <= 20; ++j) {
    double s = 1.0 - std::ldexp(1.0, -j);
    double expected = 1.0 / (1.0 - s * s);
    CHECK(std::abs(fs.partials[static_cast<size_t>(j - 1)] - expected) <=
          1e-6 * expected);
  }
  CHECK(fs.limit.verdict == SequenceLimit::Verdict::diverging);
}

TEST_CASE("symmetric quadrature needs an exact mirror") {
  ConcentratedSpec lopsided = given(half_half(), dirac(-1));
  CHECK_THROWS_AS(green_z(lopsided, GreenZMode::symmetric),
                  std::invalid_argument);

  // mirrored two-step factors: recurrent, and the only zero sits off-center
  ConcentratedSpec two = given(dirac(2), dirac(-2));
  GreenZ g = green_z(two, GreenZMode::symmetric);
  CHECK(g.limit.verdict == SequenceLimit::Verdict::diverging);

  GreenZ z = green_z(zigzag(), GreenZMode::symmetric);
  CHECK(z.limit.verdict == SequenceLimit::Verdict::diverging);
}

TEST_CASE("the zigzag shares every site up to the horizon") {
  IntersectionEstimate est =
      intersection_estimator(zigzag(), 8, 100, 20250819);
  CHECK(est.mean == doctest::Approx(101.0).epsilon(1e-15));
  CHECK(est.sigma == 0.0);
  CHECK(est.censored_fraction == 0.0);
  CHECK(est.trials == 8);
  CHECK(est.horizon == 100);
  REQUIRE(!est.horizon_curve.empty());
  // at horizon h both ranges are {0,...,h}: h+1 shared points
  long long h = 1;
  for (size_t i = 0; i < est.horizon_curve.size(); ++i) {
    CHECK(est.horizon_curve[i] == doctest::Approx(h + 1.0).epsilon(1e-15));
    h = std::min(2 * h, 100LL);
  }
  CHECK(est.horizon_curve.back() == doctest::Approx(101.0).epsilon(1e-15));
}

TEST_CASE("intersections plateau under the transient ceiling") {
  LatticeMeasure up = zeta_measure(0.3, 1 << 16);
  ConcentratedSpec spec = given(up, reflect(up));
  GreenZ sym = green_z(spec, GreenZMode::symmetric);

  IntersectionEstimate est =
      intersection_estimator(spec, 3000, 2048, 20250819, 4);
  CHECK(est.mean >= 1.0);
  CHECK(est.mean <= sym.limit.value + 3.0 * est.sigma);
  // heavy tails censor essentially every trial long before the horizon
  CHECK(est.censored_fraction > 0.5);
  for (size_t i = 1; i < est.horizon_curve.size(); ++i)
    CHECK(est.horizon_curve[i] >= est.horizon_curve[i - 1]);
  size_t n = est.horizon_curve.size();
  REQUIRE(n >= 4);
  double late = est.horizon_curve[n - 1] - est.horizon_curve[n - 3];
  double early = est.horizon_curve[2] - est.horizon_curve[0];
  CHECK(late <= early + 3.0 * est.sigma);
}

TEST_CASE("fixed seeds reproduce and worker counts do not matter") {
  ConcentratedSpec spec = given(half_half(), dirac(-1));
  IntersectionEstimate a = intersection_estimator(spec, 500, 256, 7, 1);
  IntersectionEstimate b = intersection_estimator(spec, 500, 256, 7, 3);
  IntersectionEstimate c = intersection_estimator(spec, 500, 256, 7, 8);
  CHECK(a.mean == b.mean);
  CHECK(b.mean == c.mean);
  CHECK(a.sigma == b.sigma);
  CHECK(a.horizon_curve == b.horizon_curve);
  CHECK(b.horizon_curve == c.horizon_curve);

  IntersectionEstimate d = intersection_estimator(spec, 500, 256, 8, 1);
  CHECK(d.mean != a.mean);
}

TEST_CASE("the invariant measure of the zigzag is two unit atoms") {
  InvariantMeasureCheck chk = invariant_measure(zigzag(), 50);
  REQUIRE(chk.pi.size() == 101);
  for (long long y = -50; y <= 50; ++y) {
    double expected = (y == 0 || y == 1) ? 1.0 : 0.0;
    CHECK(chk.pi[static_cast<size_t>(y + 50)] == expected);
  }
  CHECK(chk.residual_l1 == 0.0);
  CHECK(chk.boundary_leakage == 0.0);
  CHECK(chk.window_mass == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chk.mean_plus == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(chk.mean_minus == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("the half-half chain balances its stationary books") {
  InvariantMeasureCheck chk =
      invariant_measure(given(half_half(), dirac(-1)), 200);
  auto pi_at = [&](long long y) {
    return chk.pi[static_cast<size_t>(y + 200)];
  };
  CHECK(pi_at(1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pi_at(2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(pi_at(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(pi_at(3) == 0.0);
  CHECK(pi_at(-1) == 0.0);
  CHECK(chk.residual_l1 <= 1e-12);
  // window mass equals the mean gap E+X - E-X = 3/2 - (-1)
  CHECK(chk.window_mass == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(chk.window_mass ==
        doctest::Approx(chk.mean_plus - chk.mean_minus).epsilon(1e-12));
}

TEST_CASE("stationarity holds across a window of two hundred") {
  struct Pair {
    LatticeMeasure up;
    LatticeMeasure down;
  };
  std::vector<Pair> specs = {
      {dirac(1), dirac(-1)},
      {half_half(), dirac(-1)},
      {points_measure({{1, 0.2}, {2, 0.3}, {7, 0.5}}),
       points_measure({{-1, 0.4}, {-2, 0.6}})},
      {points_measure({{3, 1.0}}), points_measure({{-1, 0.25}, {-5, 0.75}})},
      {geometric_measure(0.5), geometric_measure(0.25, true)},
  };
  for (const Pair& p : specs) {
    InvariantMeasureCheck chk = invariant_measure(given(p.up, p.down), 200);
    CHECK(chk.residual_l1 <= 1e-10);
    CHECK(chk.window_mass ==
          doctest::Approx(chk.mean_plus - chk.mean_minus).epsilon(1e-9));
  }
}

TEST_CASE("a defective factor is rejected by the stationarity check") {
  ConcentratedSpec broken =
      given(points_measure({{1, 0.5}}), dirac(-1));
  CHECK(broken.transient_by_mass);
  CHECK_THROWS_AS(invariant_measure(broken, 20), std::invalid_argument);
}

TEST_CASE("the trichotomy lands on its three poster cases") {
  ClassificationReport pr =
      classify_oscillating(given(half_half(), dirac(-1)));
  CHECK(pr.regime == Regime::positive_recurrent);
  bool saw_mean = false;
  for (const Evidence& e : pr.evidence)
    if (e.name.find("mean") != std::string::npos) saw_mean = true;
  CHECK(saw_mean);

  ClassificationReport nr =
      classify_oscillating(given(zeta_measure(0.7, 1 << 15), dirac(-1)));
  CHECK(nr.regime == Regime::null_recurrent);

  LatticeMeasure heavy = zeta_measure(0.3, 1 << 15);
  ClassificationReport tr =
      classify_oscillating(given(heavy, reflect(heavy)));
  CHECK(tr.regime == Regime::transient);
}

TEST_CASE("the open case stays honestly undetermined") {
  // both means infinite, both squared-resolvent integrals infinite
  LatticeMeasure mid = zeta_measure(0.7, 1 << 15);
  ClassificationReport rep = classify_oscillating(given(mid, reflect(mid)));
  CHECK(rep.regime == Regime::undetermined);
  bool saw_series = false, saw_schedule = false;
  for (const Evidence& e : rep.evidence) {
    if (e.name.find("series") != std::string::npos) saw_series = true;
    if (e.name.find("discount") != std::string::npos) saw_schedule = true;
  }
  CHECK(saw_series);
  CHECK(saw_schedule);
}

TEST_CASE("defective entrance mass short-circuits to transient") {
  ConcentratedSpec spec =
      given(points_measure({{1, 0.5}}), dirac(-1));
  CHECK(spec.transient_by_mass);
  ClassificationReport rep = classify_oscillating(spec);
  CHECK(rep.regime == Regime::transient);
  bool saw_mass = false;
  for (const Evidence& e : rep.evidence)
    if (e.name.find("mass") != std::string::npos) saw_mass = true;
  CHECK(saw_mass);
}

TEST_CASE("distilling a never-entering side flags transience") {
  ConcentratedSpec spec = build_concentrated(
      points_measure({{-1, 0.5}, {0, 0.5}}), dirac(-1));
  CHECK(spec.mass_plus == 0.0);
  CHECK(spec.transient_by_mass);
  CHECK(spec.mu_plus.empty());
  CHECK(spec.provenance.find("given") == std::string::npos);
}

TEST_CASE("distilling drifting sides reproduces known entrance laws") {
  // both sides skip-free toward the boundary they must cross: the walk from
  // below enters at 1, the walk from above enters at -1, with full mass
  LatticeMeasure from_below = points_measure({{1, 0.7}, {-1, 0.3}});
  LatticeMeasure from_above = points_measure({{1, 0.3}, {-1, 0.7}});
  ConcentratedSpec spec = build_concentrated(from_below, from_above);
  CHECK(!spec.transient_by_mass);
  CHECK(spec.mass_plus == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(spec.mass_minus == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(spec.mu_plus.support_min == 1);
  CHECK(spec.mu_plus.support_max() == 1);
  CHECK(spec.nu_minus.support_min == -1);
  CHECK(spec.nu_minus.support_max() == -1);
  CHECK(spec.provenance.find("factored") != std::string::npos);

  ClassificationReport rep = classify_oscillating(spec);
  CHECK(rep.regime == Regime::positive_recurrent);
}

TEST_CASE("distilling opposite drifts leaves a defective spec") {
  // drift away from the boundary on both sides: entrance mass 3/7 each
  LatticeMeasure down_law = points_measure({{1, 0.3}, {-1, 0.7}});
  LatticeMeasure up_law = points_measure({{1, 0.7}, {-1, 0.3}});
  ConcentratedSpec spec = build_concentrated(down_law, up_law);
  CHECK(spec.transient_by_mass);
  CHECK(spec.mass_plus == doctest::Approx(3.0 / 7).epsilon(1e-7));
  CHECK(spec.mass_minus == doctest::Approx(3.0 / 7).epsilon(1e-7));
  ClassificationReport rep = classify_oscillating(spec);
  CHECK(rep.regime == Regime::transient);
}

TEST_CASE("factor supports are validated at the door") {
  CHECK_THROWS_AS(given(points_measure({{0, 0.5}, {1, 0.5}}), dirac(-1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(given(dirac(1), points_measure({{0, 1.0}})),
                  std::invalid_argument);
  CHECK_THROWS_AS(given(dirac(-1), dirac(-1)), std::invalid_argument);
  CHECK_THROWS_AS(
      given(points_measure({{1, 0.8}, {2, 0.4}}), dirac(-1)),
      std::invalid_argument);

  ConcentratedSpec ok = given(dirac(1), dirac(-1));
  CHECK(ok.provenance == "given");
  CHECK(!ok.transient_by_mass);
}

TEST_CASE("a concentrated spec becomes a simulable walk") {
  ConcentratedSpec spec = given(half_half(), dirac(-1));
  WalkSpec walk = as_walk(spec);
  const auto* cw = std::get_if<ConcentratedWalk>(&walk);
  REQUIRE(cw != nullptr);
  CHECK(cw->mu_plus.at(1) == 0.5);
  CHECK(cw->mu_plus.at(2) == 0.5);
  CHECK(cw->nu_minus.at(-1) == 1.0);
  CHECK(law_at(walk, 0).support_min == 1);
  CHECK(law_at(walk, 1).support_min == -1);
}
