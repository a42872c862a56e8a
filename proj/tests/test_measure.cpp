#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "greenwalk/measure.hpp"
#include "greenwalk/rng.hpp"

using namespace greenwalk;

namespace {

// Independent reference: plain double-sum convolution over a map.
std::map<long long, double> oracle_convolve(const LatticeMeasure& a,
                                            const LatticeMeasure& b) {
  std::map<long long, double> out;
  for (long long i = a.support_min; i <= a.support_max(); ++i)
    for (long long j = b.support_min; j <= b.support_max(); ++j)
      out[i + j] += a.at(i) * b.at(j);
  return out;
}

double oracle_tv(const LatticeMeasure& a, const LatticeMeasure& b) {
  std::map<long long, double> diff;
  for (long long k = a.support_min; k <= a.support_max(); ++k) diff[k] += a.at(k);
  for (long long k = b.support_min; k <= b.support_max(); ++k) diff[k] -= b.at(k);
  double s = 0;
  for (auto& [k, v] : diff) s += std::abs(v);
  return s / 2;
}

LatticeMeasure random_measure(CounterRng& rng, int max_span, double mass) {
  int span = 1 + static_cast<int>(rng.next_double() * max_span);
  long long lo = static_cast<long long>(rng.next_double() * 20) - 10;
  std::vector<std::pair<long long, double>> pts;
  double tot = 0;
  for (int i = 0; i < span; ++i) {
    double w = rng.next_double();
    if (w < 0.15) continue;  // leave holes
    pts.emplace_back(lo + i, w);
    tot += w;
  }
  if (pts.empty()) pts.emplace_back(lo, tot = 1.0);
  for (auto& p : pts) p.second *= mass / tot;
  return points_measure(pts);
}

}  // namespace

TEST_CASE("convolution matches the double-sum oracle") {
  CounterRng rng = CounterRng::for_trial(101, 0);
  for (int rep = 0; rep < 60; ++rep) {
    LatticeMeasure a = random_measure(rng, 18, 0.5 + 0.5 * rng.next_double());
    LatticeMeasure b = random_measure(rng, 18, 0.5 + 0.5 * rng.next_double());
    LatticeMeasure c = convolve(a, b);
    auto ref = oracle_convolve(a, b);
    double worst = 0;
    for (auto& [k, v] : ref) worst = std::max(worst, std::abs(c.at(k) - v));
    for (long long k = c.support_min; k <= c.support_max(); ++k) {
      double r = ref.count(k) ? ref[k] : 0.0;
      worst = std::max(worst, std::abs(c.at(k) - r));
    }
    CHECK(worst <= 1e-15);
  }
}

TEST_CASE("convolution commutes and associates") {
  CounterRng rng = CounterRng::for_trial(102, 0);
  for (int rep = 0; rep < 40; ++rep) {
    LatticeMeasure a = random_measure(rng, 16, rng.next_double());
    LatticeMeasure b = random_measure(rng, 16, rng.next_double());
    LatticeMeasure c = random_measure(rng, 16, rng.next_double());
    CHECK(tv_distance(convolve(a, b), convolve(b, a)) <= 1e-12);
    CHECK(tv_distance(convolve(convolve(a, b), c), convolve(a, convolve(b, c))) <=
          1e-12);
  }
}

TEST_CASE("char_fn is multiplicative under convolution") {
  CounterRng rng = CounterRng::for_trial(103, 0);
  LatticeMeasure a = random_measure(rng, 20, 0.9);
  LatticeMeasure b = random_measure(rng, 20, 0.7);
  LatticeMeasure c = convolve(a, b);
  for (int i = 0; i < 100; ++i) {
    double t = rng.next_double() * 2 * M_PI;
    std::complex<double> lhs = char_fn(c, t);
    std::complex<double> rhs = char_fn(a, t) * char_fn(b, t);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("sign restriction decomposes exactly") {
  CounterRng rng = CounterRng::for_trial(104, 0);
  for (int rep = 0; rep < 20; ++rep) {
    LatticeMeasure w = random_measure(rng, 25, rng.next_double());
    LatticeMeasure lo = restrict_sign(w, Sign::nonpositive);
    LatticeMeasure hi = restrict_sign(w, Sign::positive);
    for (long long k = w.support_min; k <= w.support_max(); ++k) {
      double reassembled = (k <= 0 ? lo.at(k) : hi.at(k));
      CHECK(reassembled == w.at(k));  // bitwise
      CHECK((k <= 0 ? hi.at(k) : lo.at(k)) == 0.0);
    }
    // same decomposition for signed inputs
    SignedLatticeMeasure sw = to_signed(w);
    SignedLatticeMeasure slo = restrict_sign(sw, Sign::nonpositive);
    SignedLatticeMeasure shi = restrict_sign(sw, Sign::positive);
    for (long long k = sw.support_min; k <= sw.support_max(); ++k)
      CHECK(slo.at(k) + shi.at(k) == sw.at(k));
  }
}

// d_0 - s*w = exp(-L) with L = sum_n (s w)^n / n, for sub-unit total mass.
TEST_CASE("log and exp series invert each other") {
  CounterRng rng = CounterRng::for_trial(105, 0);
  for (double s : {0.4, 0.9, 1.0}) {
    LatticeMeasure w = random_measure(rng, 10, 0.85);
    LogSeriesResult L = log_series(w, s, 120);
    CHECK(L.truncation_bound <= 1e-8);
    ExpSeriesResult E = exp_series(negate(L.series), 60);
    CHECK(E.remainder_bound <= 1e-12);
    double worst = 0;
    for (long long k = E.series.support_min; k <= E.series.support_max(); ++k) {
      double expect = (k == 0 ? 1.0 : 0.0) - s * w.at(k);
      worst = std::max(worst, std::abs(E.series.at(k) - expect));
    }
    CHECK(worst <= 1e-7);
  }
}

TEST_CASE("log series truncation bound is a true bound") {
  CounterRng rng = CounterRng::for_trial(106, 0);
  LatticeMeasure w = random_measure(rng, 8, 0.75);
  LogSeriesResult coarse = log_series(w, 1.0, 12);
  LogSeriesResult fine = log_series(w, 1.0, 200);
  double moved = 0;
  for (long long k = fine.series.support_min; k <= fine.series.support_max(); ++k)
    moved += std::abs(fine.series.at(k) - coarse.series.at(k));
  CHECK(moved <= coarse.truncation_bound + 1e-15);
}

TEST_CASE("exp series remainder bound is a true bound") {
  CounterRng rng = CounterRng::for_trial(107, 0);
  LatticeMeasure w = random_measure(rng, 8, 0.9);
  SignedLatticeMeasure sw = negate(to_signed(w));
  ExpSeriesResult coarse = exp_series(sw, 6);
  ExpSeriesResult fine = exp_series(sw, 50);
  double moved = 0;
  for (long long k = fine.series.support_min; k <= fine.series.support_max(); ++k)
    moved += std::abs(fine.series.at(k) - coarse.series.at(k));
  CHECK(moved <= coarse.remainder_bound + 1e-15);
}

TEST_CASE("quadratic lower bound certifies the real part near zero") {
  std::vector<LatticeMeasure> cases = {
      points_measure({{-1, 0.5}, {1, 0.5}}),
      points_measure({{-1, 0.7}, {1, 0.3}}),
      points_measure({{-3, 0.4}, {5, 0.6}}),
      points_measure({{0, 0.6}, {-2, 0.2}, {2, 0.2}}),
      geometric_measure(0.5),
  };
  for (const auto& mu : cases) {
    QuadraticBound qb = quadratic_lower_bound(mu);
    CHECK(qb.alpha > 0);
    CHECK(qb.t0 > 0);
    for (int i = 0; i <= 200; ++i) {
      double t = qb.t0 * (2.0 * i / 200.0 - 1.0);
      double re = 1.0 - char_fn(mu, t < 0 ? t + 2 * M_PI : t).real();
      CHECK(re >= qb.alpha * t * t - 1e-12);
    }
  }
}

TEST_CASE("geometric family: closed form characteristic function") {
  for (double p : {0.5, 0.25, 0.8}) {
    LatticeMeasure g = geometric_measure(p);
    CHECK(g.support_min == 1);
    CHECK(std::abs(g.mass() + g.tail_mass - 1.0) <= 1e-14);
    for (double t : {0.3, 1.1, 2.9, 5.0}) {
      std::complex<double> z = std::polar(1.0, t);
      std::complex<double> closed = p * z / (1.0 - (1.0 - p) * z);
      CHECK(std::abs(char_fn(g, t) - closed) <= 1e-12);
      CHECK(std::abs(char_fn_materialized(g, t) - closed) <=
            g.tail_mass + 1e-12);
    }
    MeanResult m = mean(g);
    CHECK(m.infinite == false);
    CHECK(std::abs(m.value - 1.0 / p) <= 1e-12);
    double een = mean_exp_neg(g);
    double closed_een = p * std::exp(-1.0) / (1.0 - (1.0 - p) * std::exp(-1.0));
    CHECK(std::abs(een - closed_een) <= 1e-14);
  }
}

TEST_CASE("zeta family: mass accounting and analytic characteristic function") {
  for (double a : {0.3, 0.7, 1.5}) {
    LatticeMeasure z = zeta_measure(a, 20'000);
    CHECK(z.support_min == 1);
    CHECK(std::abs(z.mass() + z.tail_mass - 1.0) <= 1e-12);
    CHECK(z.tail_mass > 0);
    for (double t : {0.05, 0.4, 1.3, 3.0, 6.0}) {
      // materialized window sum can differ only by the unmaterialized tail
      CHECK(std::abs(char_fn(z, t) - char_fn_materialized(z, t)) <=
            z.tail_mass + 1e-10);
    }
  }
  // exact analytic values against a brute-force series with a far window
  {
    double s = 1.3;
    for (double t : {0.7, 2.0}) {
      std::complex<double> acc = 0;
      for (long long k = 10'000'000; k >= 1; --k)
        acc += std::pow(static_cast<double>(k), -s) * std::polar(1.0, t * k);
      CHECK(std::abs(polylog_exp(s, t) - acc) <= 1e-8);
    }
  }
  {
    double s = 2.5;
    for (double t : {0.7, 2.0, 4.5}) {
      std::complex<double> acc = 0;
      for (long long k = 1'000'000; k >= 1; --k)
        acc += std::pow(static_cast<double>(k), -s) * std::polar(1.0, t * k);
      CHECK(std::abs(polylog_exp(s, t) - acc) <= 1e-10);
    }
  }
  MeanResult m15 = mean(zeta_measure(1.5, 1000));
  CHECK(m15.infinite == false);
  CHECK(std::abs(m15.value - std::riemann_zeta(1.5) / std::riemann_zeta(2.5)) <=
        1e-12);
  MeanResult m07 = mean(zeta_measure(0.7, 1000));
  CHECK(m07.infinite == true);
}

TEST_CASE("symmetric and reflected zeta families") {
  LatticeMeasure sym = symmetric_zeta_measure(0.8, 5000);
  CHECK(sym.support_min == -5000);
  CHECK(std::abs(sym.mass() + sym.tail_mass - 1.0) <= 1e-12);
  for (double t : {0.3, 1.0, 2.2}) {
    std::complex<double> v = char_fn(sym, t);
    CHECK(std::abs(v.imag()) <= 1e-13);
    CHECK(std::abs(v - char_fn_materialized(sym, t)) <= sym.tail_mass + 1e-10);
  }
  LatticeMeasure zr = zeta_measure(1.5, 2000, /*reflected=*/true);
  LatticeMeasure zf = zeta_measure(1.5, 2000);
  for (double t : {0.4, 1.7}) {
    CHECK(std::abs(char_fn(zr, t) - std::conj(char_fn(zf, t))) <= 1e-12);
  }
  CHECK(mean(zr).value == -mean(zf).value);
}

TEST_CASE("zeta tail sums are self-consistent") {
  for (double s : {1.3, 1.7, 2.5}) {
    double direct = 0;
    for (long long k = 1000; k > 10; --k) direct += std::pow((double)k, -s);
    CHECK(std::abs(zeta_tail(s, 10) - (direct + zeta_tail(s, 1000))) <= 1e-13);
  }
}

TEST_CASE("points_measure validates its input") {
  CHECK_THROWS_AS(points_measure({{2, 0.5}, {2, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(points_measure({{1, -0.25}}), std::invalid_argument);
  CHECK_THROWS_AS(points_measure({}), std::invalid_argument);
  LatticeMeasure m = points_measure({{3, 0.25}, {-1, 0.75}});
  CHECK(m.support_min == -1);
  CHECK(m.at(0) == 0.0);
  CHECK(is_probability(m));
}

TEST_CASE("support cap raises a resource error") {
  LatticeMeasure a = points_measure({{0, 0.5}, {200, 0.5}});
  ConvolveOptions tight;
  tight.support_cap = 150;
  CHECK_THROWS_AS(convolve(a, a, tight), resource_error);
}

TEST_CASE("support gcd") {
  CHECK(support_gcd(points_measure({{-2, 0.5}, {2, 0.5}})) == 2);
  CHECK(support_gcd(points_measure({{2, 0.5}, {3, 0.5}})) == 1);
  CHECK(support_gcd(points_measure({{-1, 0.5}, {1, 0.5}})) == 1);
  CHECK(support_gcd(points_measure({{0, 1.0}})) == 0);
  CHECK(support_gcd(points_measure({{6, 0.3}, {10, 0.3}, {0, 0.4}})) == 2);
}

TEST_CASE("tv distance matches the oracle") {
  CounterRng rng = CounterRng::for_trial(108, 0);
  for (int rep = 0; rep < 20; ++rep) {
    LatticeMeasure a = random_measure(rng, 15, rng.next_double());
    LatticeMeasure b = random_measure(rng, 15, rng.next_double());
    CHECK(std::abs(tv_distance(a, b) - oracle_tv(a, b)) <= 1e-15);
    CHECK(tv_distance(a, a) == 0.0);
  }
}

TEST_CASE("second moment below a cutoff") {
  LatticeMeasure m = points_measure({{-3, 0.2}, {-1, 0.3}, {2, 0.5}});
  CHECK(second_moment_below(m, 3) == doctest::Approx(0.3 * 1 + 0.5 * 4));
  CHECK(second_moment_below(m, 4) == doctest::Approx(0.2 * 9 + 0.3 + 2.0));
}
