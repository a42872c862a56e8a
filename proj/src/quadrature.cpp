#include "greenwalk/quadrature.hpp"

#include <cmath>
#include <limits>

namespace greenwalk {

namespace {

// Gauss7/Kronrod15 on [-1,1]; positive abscissae, symmetric continuation.
constexpr double kx[8] = {
    0.000000000000000000000000000000000, 0.207784955007898467600689403773245,
    0.405845151377397166906606412076961, 0.586087235467691130294144838258730,
    0.741531185599394439863864773280788, 0.864864423359769072789712788640926,
    0.949107912342758524526189684047851, 0.991455371120812639206854697526329};
constexpr double kw[8] = {
    0.209482141084727828012999174891714, 0.204432940075298892414161999234649,
    0.190350578064785409913256402421014, 0.169004726639267902826583426598550,
    0.140653259715525918745189590510238, 0.104790010322250183839876322541518,
    0.063092092629978553290700663189204, 0.022935322010529224963732008058970};
// Gauss7 shares the even-index Kronrod abscissae.
constexpr double gw[4] = {
    0.417959183673469387755102040816327, 0.381830050505118944950369775488975,
    0.279705391489276667901467771423780, 0.129484966168869693270611432679082};

struct Panel {
  double value;
  double err;
};

Panel eval_panel(const Integrand& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double kron = kw[0] * fc;
  double gauss = gw[0] * fc;
  for (int i = 1; i < 8; ++i) {
    double v = f(c - h * kx[i]) + f(c + h * kx[i]);
    kron += kw[i] * v;
    if (i % 2 == 0) gauss += gw[i / 2] * v;
  }
  kron *= h;
  gauss *= h;
  return {kron, std::abs(kron - gauss)};
}

constexpr long long node_budget = 400'000;

void adapt(const Integrand& f, double a, double b, double tol, int depth,
           int max_depth, PanelResult& out) {
  Panel p = eval_panel(f, a, b);
  out.nodes += 15;
  if (!std::isfinite(p.value)) {
    // a poisoned panel never converges; report it instead of value-chasing
    out.abs_error = std::numeric_limits<double>::infinity();
    return;
  }
  double mid = 0.5 * (a + b);
  bool accept = p.err <= tol + 1e-14 * std::abs(p.value) ||
                depth >= max_depth || mid <= a || mid >= b ||
                out.nodes > node_budget;
  if (accept) {
    out.value += p.value;
    out.abs_error += p.err;
    return;
  }
  adapt(f, a, mid, 0.5 * tol, depth + 1, max_depth, out);
  adapt(f, mid, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

PanelResult integrate_panel(const Integrand& f, double a, double b, double tol,
                            int max_depth) {
  PanelResult out;
  if (a == b) return out;
  adapt(f, a, b, tol, 0, max_depth, out);
  return out;
}

QuadratureResult integrate_singular_ring(const Integrand& f,
                                         const SingularOptions& opts) {
  const double two_pi = 2 * M_PI;
  QuadratureResult out;
  double delta0 = std::ldexp(1.0, -opts.first_level);
  double left = opts.exclude_left ? delta0 : 0.0;
  double right = opts.exclude_right ? two_pi - delta0 : two_pi;

  double shell_tol = opts.tol / 256;
  PanelResult base = integrate_panel(f, left, right, opts.tol / 4);
  out.nodes_used += base.nodes;
  double quad_err = base.abs_error;

  if (!opts.exclude_left && !opts.exclude_right) {
    out.value = base.value;
    out.abs_error_estimate = quad_err;
    out.schedule_verdict = SequenceLimit::Verdict::converged;
    return out;
  }

  std::vector<double> partials{base.value};
  double acc = base.value;
  double last_inc = 0.0, prev_inc = 0.0;
  bool exceeded = false;
  int level = opts.first_level;
  for (int j = opts.first_level; j < opts.max_level; ++j) {
    double dj = std::ldexp(1.0, -j), djn = 0.5 * dj;
    double inc = 0.0;
    if (opts.exclude_left) {
      PanelResult p = integrate_panel(f, djn, dj, shell_tol);
      inc += p.value;
      out.nodes_used += p.nodes;
      quad_err += p.abs_error;
    }
    if (opts.exclude_right) {
      // by periodicity the [2pi-dj, 2pi-djn] shell equals [-dj, -djn]; the
      // latter keeps full relative node resolution, while abscissae near 2pi
      // are quantized at ulp(2pi), hopelessly coarse once dj ~ 1e-8
      PanelResult p = integrate_panel(f, -dj, -djn, shell_tol);
      inc += p.value;
      out.nodes_used += p.nodes;
      quad_err += p.abs_error;
    }
    acc += inc;
    partials.push_back(acc);
    prev_inc = last_inc;
    last_inc = inc;
    level = j + 1;
    if (std::abs(acc) > opts.ceiling) {
      exceeded = true;
      break;
    }
    if (partials.size() >= 3 && std::abs(inc) < opts.tol / 100 &&
        std::abs(prev_inc) < opts.tol / 100)
      break;
  }
  out.singular_window = std::ldexp(1.0, -level);

  if (exceeded) {
    out.diverged = true;
    out.value = acc;  // lower bound for a positive integrand
    out.abs_error_estimate = std::numeric_limits<double>::infinity();
    out.divergence_rate =
        prev_inc != 0.0 ? std::log2(std::abs(last_inc / prev_inc)) : 0.0;
    out.schedule_verdict = SequenceLimit::Verdict::diverging;
    return out;
  }

  SequenceLimit lim = limit_from_schedule(partials, opts.tol / 100);
  out.schedule_verdict = lim.verdict;
  switch (lim.verdict) {
    case SequenceLimit::Verdict::diverging:
      out.diverged = true;
      out.value = partials.back();
      out.abs_error_estimate = std::numeric_limits<double>::infinity();
      out.divergence_rate = std::log2(std::max(lim.ratio, 1e-12));
      break;
    case SequenceLimit::Verdict::stalled:
      // a Cauchy sequence whose increments refuse to decay is divergence in
      // slow motion; only call it that when the increments are still visible
      if (lim.ratio > 0.999 && std::abs(last_inc) > 100 * (opts.tol / 100)) {
        out.diverged = true;
        out.value = partials.back();
        out.abs_error_estimate = std::numeric_limits<double>::infinity();
        out.divergence_rate = std::log2(std::max(lim.ratio, 1e-12));
      } else {
        out.value = lim.value;
        out.abs_error_estimate = lim.error + quad_err;
      }
      break;
    default:
      out.value = lim.value;
      out.abs_error_estimate = lim.error + quad_err;
      break;
  }
  return out;
}

}  // namespace greenwalk
