#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "greenwalk/errors.hpp"

namespace greenwalk {

// Parametric step families keep an exact analytic description next to the
// materialized window, so Fourier-side code is not limited by the window.
struct GeometricForm {
  double p = 0.5;
  bool reflected = false;  // atoms on -N* instead of N*
};
struct ZetaForm {
  double a = 1.0;  // atoms c * |k|^{-1-a}, c = 1/zeta(1+a)
  bool reflected = false;
};
struct SymmetricZetaForm {
  double a = 1.0;  // atoms (c/2) * |k|^{-1-a} on both signs
};
using AnalyticForm =
    std::variant<std::monostate, GeometricForm, ZetaForm, SymmetricZetaForm>;

// Nonnegative weights on a contiguous integer window. Canonical form: first
// and last weights nonzero. tail_mass is what the materialization left out
// (zero for exact point measures).
struct LatticeMeasure {
  long long support_min = 0;
  std::vector<double> weights;
  double tail_mass = 0.0;
  AnalyticForm analytic{};

  bool empty() const { return weights.empty(); }
  long long support_max() const {
    return support_min + static_cast<long long>(weights.size()) - 1;
  }
  double at(long long k) const {
    if (k < support_min || k > support_max()) return 0.0;
    return weights[static_cast<size_t>(k - support_min)];
  }
  double mass() const;  // materialized mass only
  double total_mass() const { return mass() + tail_mass; }
};

// Weights of either sign; norm_bound is the total-variation norm of the
// materialized weights (kept as a field per the series-arithmetic contract).
struct SignedLatticeMeasure {
  long long support_min = 0;
  std::vector<double> weights;
  double norm_bound = 0.0;

  bool empty() const { return weights.empty(); }
  long long support_max() const {
    return support_min + static_cast<long long>(weights.size()) - 1;
  }
  double at(long long k) const {
    if (k < support_min || k > support_max()) return 0.0;
    return weights[static_cast<size_t>(k - support_min)];
  }
};

enum class Sign { nonpositive, positive };

struct ConvolveOptions {
  long long support_cap = 8'000'000;  // max result window length
};

LatticeMeasure trimmed(LatticeMeasure m);
SignedLatticeMeasure trimmed(SignedLatticeMeasure m);

LatticeMeasure convolve(const LatticeMeasure& a, const LatticeMeasure& b,
                        const ConvolveOptions& opts = {});
SignedLatticeMeasure convolve(const SignedLatticeMeasure& a,
                              const SignedLatticeMeasure& b,
                              const ConvolveOptions& opts = {});

// Exact decomposition: restrict_sign(w, nonpositive) + restrict_sign(w,
// positive) reproduces w weight for weight.
LatticeMeasure restrict_sign(const LatticeMeasure& w, Sign sign);
SignedLatticeMeasure restrict_sign(const SignedLatticeMeasure& w, Sign sign);

// sum_k w(k) e^{ikt}; dispatches to the analytic form when one is present.
std::complex<double> char_fn(const LatticeMeasure& m, double t);
std::complex<double> char_fn_materialized(const LatticeMeasure& m, double t);
std::complex<double> char_fn(const SignedLatticeMeasure& m, double t);

// 1 - char_fn without the cancellation that kills the direct difference once
// |t| drops below ~1e-8: term-wise 1 - e^{ikt} for tailless windows, closed
// forms for the analytic families. Tail-bearing measures without an analytic
// form fall back to the direct difference.
std::complex<double> one_minus_char(const LatticeMeasure& m, double t);

// Reduce an angle to (-pi, pi]. Exact for |t| in [pi, 2pi] (Sterbenz), which
// keeps trig arguments relative-accurate near the 2pi seam; raw arguments
// there only carry absolute accuracy ~ulp(2pi), fatal next to a zero of
// 1 - e^{it}.
double principal_angle(double t);

struct LogSeriesResult {
  SignedLatticeMeasure series;  // sum_{n=1..n_max} s^n w^n / n
  double truncation_bound;      // scalar bound on the dropped sum_{n>n_max}
};
LogSeriesResult log_series(const LatticeMeasure& w, double s, int n_max,
                           const ConvolveOptions& opts = {});

struct ExpSeriesResult {
  SignedLatticeMeasure series;  // sum_{n=0..n_max} w^n / n!  (n=0 term = d_0)
  double remainder_bound;       // e^{|w|} |w|^{n_max+1} / (n_max+1)!
};
ExpSeriesResult exp_series(const SignedLatticeMeasure& w, int n_max,
                           const ConvolveOptions& opts = {});

SignedLatticeMeasure negate(SignedLatticeMeasure w);
SignedLatticeMeasure to_signed(const LatticeMeasure& m);

// (1/2) sum_k |a(k) - b(k)| over the materialized atoms.
double tv_distance(const LatticeMeasure& a, const LatticeMeasure& b);

// Quadratic lower bound on Re(1 - char_fn): alpha * t^2 for |t| <= t0, with
// alpha = (2/pi^2) * sum_{0<|k|<M} k^2 w(k) and M the smallest cutoff that
// catches a nonzero atom.
struct QuadraticBound {
  double alpha = 0.0;
  double t0 = 0.0;
  long long cutoff = 0;
};
QuadraticBound quadratic_lower_bound(const LatticeMeasure& mu);

struct MeanResult {
  double value = 0.0;    // windowed mean, or the exact value for families
  bool infinite = false; // known-infinite from the family's tail exponent
  double tail_bound = 0.0;  // first-order bound from unmaterialized mass
  bool exact = false;
};
MeanResult mean(const LatticeMeasure& m);
// E e^{-X}; requires support in N*.
double mean_exp_neg(const LatticeMeasure& m);
double second_moment_below(const LatticeMeasure& m, long long cutoff);

// gcd over |k| of the nonzero atoms (0 when there are none).
long long support_gcd(const LatticeMeasure& m);

LatticeMeasure reflect(const LatticeMeasure& m);

LatticeMeasure dirac(long long k);
LatticeMeasure points_measure(const std::vector<std::pair<long long, double>>& pts);
LatticeMeasure geometric_measure(double p, bool reflected = false);
LatticeMeasure zeta_measure(double a, long long window, bool reflected = false);
LatticeMeasure symmetric_zeta_measure(double a, long long window);

bool is_probability(const LatticeMeasure& m, double tol = 1e-9);
void require_probability(const LatticeMeasure& m, const char* what,
                         double tol = 1e-9);

// sum_{k>K} k^{-s} for s > 1.
double zeta_tail(double s, long long K);
// Li_s(e^{it}) for 0 < t < 2pi, s > 1.
std::complex<double> polylog_exp(double s, double t);

}  // namespace greenwalk
