#pragma once

#include <vector>

#include "greenwalk/classification.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/quadrature.hpp"

namespace greenwalk {

// int_0^{2pi} Re(1/(1 - char_fn(mu))) dt. Finite iff the walk is transient.
// Requires a probability step with support gcd 1 and an actual step.
QuadratureResult spitzer_integral(const LatticeMeasure& mu, double tol = 1e-8);

// Transient iff the integral above is finite; evidence carries the integral,
// the resolvent-limit estimate of G(0,0) and, when the window permits, a DP
// corroboration of the two-sided bound pi*G <= I <= 2pi*G.
ClassificationReport classify_homogeneous(const LatticeMeasure& mu,
                                          double tol = 1e-8);

struct ResolventLimit {
  SequenceLimit limit;                 // extrapolated lim_{s->1} value
  std::vector<double> schedule;        // value at s_k = 1 - 2^-k
  double s1_integral = 0.0;            // the s=1 integral (1/2pi normalized)
  bool s1_integral_finite = false;
};
// lim_{s->1} (1/2pi) int_0^{2pi} Re(1/(1 - s*char_fn)) dt = G(0,0).
// The s=1 integral itself is reported separately: for one-sided steps the two
// genuinely differ and the gap is part of the contract.
ResolventLimit chung_fuchs_limit(const LatticeMeasure& mu, int max_k = 30,
                                 double tol = 1e-10);

// (1/pi) int_0^{2pi} (1 - cos(t x)) Re(1/(1 - char_fn)) dt.
QuadratureResult delta_analytic(const LatticeMeasure& mu, long long x,
                                double tol = 1e-8);

enum class CoefKind { cosine, sine };
// cosine: (1/pi) int cos(tx) Re(1/(1-char_fn)) dt  -> P_0(T_x < inf) - 1/E X
// sine:   (1/pi) int sin(tx) Im(1/(1-char_fn)) dt  -> P_0(T_x < inf)
// for a probability step supported in N* with gcd 1.
QuadratureResult fourier_coefficient(const LatticeMeasure& mu_plus, long long x,
                                     CoefKind kind, double tol = 1e-8);

enum class Identity { herglotz, varia };
struct IdentityCheck {
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;
  double rhs_error = 0.0;
  double gap = 0.0;  // |lhs - rhs|
  double mean_value = 0.0;
  bool mean_infinite = false;
};
// herglotz: (1/2pi) int Re(1/(1-char_fn)) dt  =  1 - 1/(2 E X)
// varia:    same integrand damped by 1/(1 + (sin(t/2)/sinh(1/2))^2)
//           =  tanh(1/2)/(1 - E e^{-X}) - 1/(2 E X)
// Inputs: probability on N* with gcd 1; E X = inf enters as 1/E = 0
// (herglotz only; varia requires a finite mean).
IdentityCheck identity_check(const LatticeMeasure& mu_plus, Identity which,
                             double tol = 1e-9);

struct FejerCheck {
  double lhs = 0.0;        // (1/2pi) int f * min(g, M)
  double lhs_error = 0.0;
  double rhs = 0.0;        // coefficient pairing over all integer frequencies
  double slack = 0.0;      // rhs - lhs
  bool clipping_active = false;
  double max_g = 0.0;
  long long nodes = 0;
};
// f, g given by their nonnegative symmetric Fourier coefficients
// (c_0, c_1, ..., c_m), f(t) = c_0 + 2 sum c_n cos(nt). Checks
// (1/2pi) int f (g ^ M) <= c_0(f)c_0(g) + 2 sum c_n(f)c_n(g), an equality
// when M >= max g. Negative coefficients are a precondition error.
FejerCheck fejer_bound_check(const std::vector<double>& f_coeffs,
                             const std::vector<double>& g_coeffs, double M,
                             double tol = 1e-13);

struct DiagnosticSeries {
  std::vector<double> partials;  // values along the epsilon-schedule
  SequenceLimit limit;
};
// int_eps^pi (t/|1 - char_fn|)^2 dt along eps = 2^-j; stable for steps with a
// finite mean (square-integrability of t/|1-char_fn| near 0).
DiagnosticSeries l2_diagnostic(const LatticeMeasure& mu_plus, int max_level = 30);
// int_eps^{2pi-eps} |1 - char_fn|^{-1/2} dt; reported, never asserted.
DiagnosticSeries half_power_diagnostic(const LatticeMeasure& mu,
                                       int max_level = 30);

}  // namespace greenwalk
