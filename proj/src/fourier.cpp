#include "greenwalk/fourier.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

namespace greenwalk {

namespace {

void require_walk_step(const LatticeMeasure& mu, const char* what) {
  require_probability(mu, what);
  long long g = support_gcd(mu);
  if (g == 0) {
    std::ostringstream os;
    os << what << " never moves";
    throw std::invalid_argument(os.str());
  }
  if (g != 1) {
    std::ostringstream os;
    os << what << " lives on the sublattice " << g << "Z; rescale it first";
    throw std::invalid_argument(os.str());
  }
}

void require_increasing(const LatticeMeasure& mu, const char* what) {
  require_walk_step(mu, what);
  if (mu.support_min < 1) {
    std::ostringstream os;
    os << what << " must be supported on positive sites (found "
       << mu.support_min << ")";
    throw std::invalid_argument(os.str());
  }
}

std::string describe(const LatticeMeasure& mu) {
  std::ostringstream os;
  if (const auto* g = std::get_if<GeometricForm>(&mu.analytic))
    os << (g->reflected ? "reflected " : "") << "geometric(p=" << g->p << ")";
  else if (const auto* z = std::get_if<ZetaForm>(&mu.analytic))
    os << (z->reflected ? "reflected " : "") << "zeta(a=" << z->a << ")";
  else if (const auto* s = std::get_if<SymmetricZetaForm>(&mu.analytic))
    os << "symmetric zeta(a=" << s->a << ")";
  else
    os << "step on [" << mu.support_min << "," << mu.support_max() << "]";
  if (mu.tail_mass > 0) os << " with tail mass " << mu.tail_mass;
  return os.str();
}

}  // namespace

QuadratureResult spitzer_integral(const LatticeMeasure& mu, double tol) {
  require_walk_step(mu, "criterion integral step");
  SingularOptions opts;
  opts.tol = tol;
  return integrate_singular_ring(
      [&mu](double t) {
        return (1.0 / one_minus_char(mu, t)).real();
      },
      opts);
}

ResolventLimit chung_fuchs_limit(const LatticeMeasure& mu, int max_k,
                                 double tol) {
  require_walk_step(mu, "resolvent step");
  ResolventLimit out;
  const double two_pi = 2 * M_PI;
  for (int k = 1; k <= max_k; ++k) {
    double s = 1.0 - std::ldexp(1.0, -k);
    SingularOptions opts;
    opts.tol = tol;
    auto r = integrate_singular_ring(
        [&mu, s](double t) {
          return (1.0 / ((1.0 - s) + s * one_minus_char(mu, t))).real();
        },
        opts);
    out.schedule.push_back(r.value / two_pi);
    size_t n = out.schedule.size();
    if (n >= 3 &&
        std::abs(out.schedule[n - 1] - out.schedule[n - 2]) < 10 * tol &&
        std::abs(out.schedule[n - 2] - out.schedule[n - 3]) < 10 * tol)
      break;
  }
  out.limit = limit_from_schedule(out.schedule, 10 * tol);

  SingularOptions s1;
  s1.tol = tol;
  auto r1 = integrate_singular_ring(
      [&mu](double t) { return (1.0 / one_minus_char(mu, t)).real(); }, s1);
  out.s1_integral_finite = !r1.diverged;
  out.s1_integral = r1.value / two_pi;
  return out;
}

QuadratureResult delta_analytic(const LatticeMeasure& mu, long long x,
                                double tol) {
  require_walk_step(mu, "potential-difference step");
  if (x == 0) {
    QuadratureResult zero;
    zero.schedule_verdict = SequenceLimit::Verdict::converged;
    return zero;
  }
  SingularOptions opts;
  opts.tol = tol;
  auto r = integrate_singular_ring(
      [&mu, x](double t) {
        // reduced angle: sin picks up (-1)^x across the seam, squared away
        double h = std::sin(0.5 * principal_angle(t) * static_cast<double>(x));
        return 2.0 * h * h * (1.0 / one_minus_char(mu, t)).real();
      },
      opts);
  r.value /= M_PI;
  r.abs_error_estimate /= M_PI;
  return r;
}

QuadratureResult fourier_coefficient(const LatticeMeasure& mu_plus, long long x,
                                     CoefKind kind, double tol) {
  require_increasing(mu_plus, "coefficient step");
  if (x < 1) throw std::invalid_argument("coefficient index must be >= 1");
  SingularOptions opts;
  opts.tol = tol;
  auto r = integrate_singular_ring(
      [&mu_plus, x, kind](double t) {
        std::complex<double> w = 1.0 / one_minus_char(mu_plus, t);
        // reduced angle shifts the phase by a multiple of 2pi, exactly
        double tx = principal_angle(t) * static_cast<double>(x);
        return kind == CoefKind::cosine ? std::cos(tx) * w.real()
                                        : std::sin(tx) * w.imag();
      },
      opts);
  r.value /= M_PI;
  r.abs_error_estimate /= M_PI;
  return r;
}

IdentityCheck identity_check(const LatticeMeasure& mu_plus, Identity which,
                             double tol) {
  require_increasing(mu_plus, "identity step");
  IdentityCheck out;
  MeanResult m = mean(mu_plus);
  out.mean_value = m.value;
  out.mean_infinite = m.infinite;
  double inv_mean = m.infinite ? 0.0 : 1.0 / m.value;

  SingularOptions opts;
  opts.tol = tol;
  if (which == Identity::herglotz) {
    auto r = integrate_singular_ring(
        [&mu_plus](double t) {
          return (1.0 / one_minus_char(mu_plus, t)).real();
        },
        opts);
    out.lhs = r.value / (2 * M_PI);
    out.lhs_error = r.abs_error_estimate / (2 * M_PI);
    out.rhs = 1.0 - 0.5 * inv_mean;
  } else {
    if (m.infinite)
      throw std::invalid_argument(
          "damped identity needs a finite-mean step law");
    const double sh = std::sinh(0.5);
    auto r = integrate_singular_ring(
        [&mu_plus, sh](double t) {
          double q = std::sin(0.5 * t) / sh;
          return (1.0 / one_minus_char(mu_plus, t)).real() / (1.0 + q * q);
        },
        opts);
    out.lhs = r.value / (2 * M_PI);
    out.lhs_error = r.abs_error_estimate / (2 * M_PI);
    out.rhs = std::tanh(0.5) / (1.0 - mean_exp_neg(mu_plus)) - 0.5 * inv_mean;
  }
  out.rhs_error = 1e-14 * (1.0 + std::abs(out.rhs));
  out.gap = std::abs(out.lhs - out.rhs);
  return out;
}

FejerCheck fejer_bound_check(const std::vector<double>& f_coeffs,
                             const std::vector<double>& g_coeffs, double M,
                             double tol) {
  if (f_coeffs.empty() || g_coeffs.empty())
    throw std::invalid_argument("coefficient lists must be nonempty");
  for (double c : f_coeffs)
    if (c < 0) throw std::invalid_argument("negative cosine coefficient");
  for (double c : g_coeffs)
    if (c < 0) throw std::invalid_argument("negative cosine coefficient");

  auto eval = [](const std::vector<double>& c, double t) {
    double v = c[0];
    for (size_t n = 1; n < c.size(); ++n)
      v += 2 * c[n] * std::cos(static_cast<double>(n) * t);
    return v;
  };

  FejerCheck out;
  // nonnegative coefficients put the maximum at t = 0
  out.max_g = g_coeffs[0];
  for (size_t n = 1; n < g_coeffs.size(); ++n) out.max_g += 2 * g_coeffs[n];
  out.clipping_active = out.max_g > M;

  PanelResult p = integrate_panel(
      [&](double t) {
        double u = principal_angle(t);
        return eval(f_coeffs, u) * std::min(eval(g_coeffs, u), M);
      },
      0, 2 * M_PI, tol);
  out.lhs = p.value / (2 * M_PI);
  out.lhs_error = p.abs_error / (2 * M_PI);
  out.nodes = p.nodes;

  out.rhs = f_coeffs[0] * g_coeffs[0];
  for (size_t n = 1; n < std::min(f_coeffs.size(), g_coeffs.size()); ++n)
    out.rhs += 2 * f_coeffs[n] * g_coeffs[n];
  out.slack = out.rhs - out.lhs;
  return out;
}

namespace {

DiagnosticSeries shell_series(const Integrand& f, double hi, bool two_sided,
                              int max_level) {
  DiagnosticSeries out;
  const double two_pi = 2 * M_PI;
  double eps0 = 0.5;
  PanelResult base =
      integrate_panel(f, eps0, two_sided ? two_pi - eps0 : hi, 1e-11);
  double acc = base.value;
  out.partials.push_back(acc);
  for (int j = 1; j < max_level; ++j) {
    double e = std::ldexp(1.0, -j), en = 0.5 * e;
    PanelResult p = integrate_panel(f, en, e, 1e-12);
    acc += p.value;
    if (two_sided) {
      // negative-angle form of the right shell, see integrate_singular_ring
      PanelResult q = integrate_panel(f, -e, -en, 1e-12);
      acc += q.value;
    }
    out.partials.push_back(acc);
    size_t n = out.partials.size();
    if (n >= 3 &&
        std::abs(out.partials[n - 1] - out.partials[n - 2]) < 1e-13 &&
        std::abs(out.partials[n - 2] - out.partials[n - 3]) < 1e-13)
      break;
  }
  out.limit = limit_from_schedule(out.partials, 1e-13);
  return out;
}

}  // namespace

DiagnosticSeries l2_diagnostic(const LatticeMeasure& mu_plus, int max_level) {
  require_increasing(mu_plus, "square-integrability step");
  return shell_series(
      [&mu_plus](double t) {
        double d = std::abs(one_minus_char(mu_plus, t));
        double r = t / d;
        return r * r;
      },
      M_PI, false, max_level);
}

DiagnosticSeries half_power_diagnostic(const LatticeMeasure& mu,
                                       int max_level) {
  require_walk_step(mu, "half-power step");
  return shell_series(
      [&mu](double t) {
        return 1.0 / std::sqrt(std::abs(one_minus_char(mu, t)));
      },
      2 * M_PI, true, max_level);
}

ClassificationReport classify_homogeneous(const LatticeMeasure& mu,
                                          double tol) {
  require_walk_step(mu, "step law");
  ClassificationReport report;
  report.inputs_echo = "homogeneous walk, " + describe(mu);

  auto spitz = spitzer_integral(mu, tol);
  if (spitz.diverged) {
    report.regime = Regime::null_recurrent;
    std::ostringstream note;
    note << "integral grows along the window schedule at rate "
         << spitz.divergence_rate
         << "; an irreducible walk has no stationary probability, so "
            "recurrence here is of null type";
    report.evidence.push_back({"criterion-integral", spitz.value,
                               std::numeric_limits<double>::infinity(),
                               "ring-quadrature", note.str()});
    return report;
  }
  if (spitz.schedule_verdict == SequenceLimit::Verdict::stalled) {
    report.regime = Regime::undetermined;
    report.evidence.push_back(
        {"criterion-integral", spitz.value, spitz.abs_error_estimate, "ring-quadrature",
         "window schedule stalled: neither Cauchy decay nor certified growth"});
    return report;
  }

  report.regime = Regime::transient;
  report.evidence.push_back({"criterion-integral", spitz.value,
                             spitz.abs_error_estimate, "ring-quadrature",
                             "finite, so the walk is transient"});
  auto cf = chung_fuchs_limit(mu, 16, std::min(tol, 1e-9));
  if (cf.limit.verdict == SequenceLimit::Verdict::converged ||
      cf.limit.verdict == SequenceLimit::Verdict::extrapolated) {
    double g = cf.limit.value;
    report.evidence.push_back({"green-function", g, cf.limit.error,
                               "resolvent-schedule",
                               "limit of the damped mean integrals"});
    std::ostringstream note;
    double lo = M_PI * g, hi = 2 * M_PI * g;
    double slack_lo = spitz.value - lo, slack_hi = hi - spitz.value;
    note << "two-sided bracket pi*G <= I <= 2pi*G "
         << ((slack_lo > -1e-6 && slack_hi > -1e-6) ? "holds" : "VIOLATED")
         << " (slack " << slack_lo << ", " << slack_hi << ")";
    report.evidence.push_back(
        {"green-bracket", spitz.value / g, 0.0, "combined", note.str()});
  }
  return report;
}

}  // namespace greenwalk
