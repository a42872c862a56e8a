#pragma once

#include <functional>

#include "greenwalk/extrapolate.hpp"

namespace greenwalk {

using Integrand = std::function<double(double)>;

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  double singular_window = 0.0;  // final excluded half-width around each zero
  long long nodes_used = 0;
  bool diverged = false;
  // When diverged: value is a certified lower bound of the inner-window
  // integrals and divergence_rate the measured log2 growth of the shells.
  double divergence_rate = 0.0;
  SequenceLimit::Verdict schedule_verdict = SequenceLimit::Verdict::empty;
};

// Adaptive bisection with the Gauss7/Kronrod15 embedded pair on [a, b];
// the integrand must be finite on the closed interval. Deterministic:
// depth-first fixed subdivision order, fixed summation order.
struct PanelResult {
  double value = 0.0;
  double abs_error = 0.0;
  long long nodes = 0;
};
PanelResult integrate_panel(const Integrand& f, double a, double b, double tol,
                            int max_depth = 48);

struct SingularOptions {
  double tol = 1e-10;        // absolute error target for the convergent case
  double ceiling = 1e12;     // partial sums beyond this declare divergence
  int first_level = 3;       // initial excluded half-width 2^-first_level
  int max_level = 48;        // deepest excluded half-width 2^-max_level
  bool exclude_left = true;  // exclude (0, delta]
  bool exclude_right = true; // exclude [2pi-delta, 2pi)
};

// Integral over (0, 2pi) of a 2pi-periodic integrand whose only possible
// blow-ups sit at the endpoints. Inner windows [delta_j, 2pi-delta_j] are
// evaluated on the geometric schedule delta_j = 2^-j and the limit is taken
// from the shell increments (Cauchy behaviour decides convergent / divergent
// / stalled). Periodicity is load-bearing: right-end shells are evaluated at
// negative angles f(t-2pi), where node placement keeps relative accuracy.
QuadratureResult integrate_singular_ring(const Integrand& f,
                                         const SingularOptions& opts = {});

}  // namespace greenwalk
