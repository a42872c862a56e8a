#include "greenwalk/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace greenwalk {

namespace {

long double kahan_sum(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return s;
}

template <typename M>
M trim_impl(M m) {
  size_t lo = 0, hi = m.weights.size();
  while (lo < hi && m.weights[lo] == 0.0) ++lo;
  while (hi > lo && m.weights[hi - 1] == 0.0) --hi;
  if (lo > 0 || hi < m.weights.size()) {
    m.support_min += static_cast<long long>(lo);
    m.weights.assign(m.weights.begin() + lo, m.weights.begin() + hi);
  }
  return m;
}

void check_cap(long long len, long long cap, const char* what) {
  if (len > cap) {
    std::ostringstream os;
    os << what << " window " << len << " exceeds support cap " << cap;
    throw resource_error(os.str());
  }
}

std::vector<double> dense_convolve(const std::vector<double>& a,
                                   const std::vector<double>& b) {
  std::vector<double> r(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    double ai = a[i];
    if (ai == 0.0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += ai * b[j];
  }
  return r;
}

}  // namespace

double LatticeMeasure::mass() const {
  return static_cast<double>(kahan_sum(weights));
}

LatticeMeasure trimmed(LatticeMeasure m) { return trim_impl(std::move(m)); }
SignedLatticeMeasure trimmed(SignedLatticeMeasure m) {
  return trim_impl(std::move(m));
}

LatticeMeasure convolve(const LatticeMeasure& a, const LatticeMeasure& b,
                        const ConvolveOptions& opts) {
  if (a.empty() || b.empty()) return {};
  long long len = static_cast<long long>(a.weights.size()) +
                  static_cast<long long>(b.weights.size()) - 1;
  check_cap(len, opts.support_cap, "convolution");
  LatticeMeasure r;
  r.support_min = a.support_min + b.support_min;
  r.weights = dense_convolve(a.weights, b.weights);
  // unmaterialized mass flows outward: anything involving a tail stays tail
  r.tail_mass = a.tail_mass * (b.mass() + b.tail_mass) + b.tail_mass * a.mass();
  return trimmed(std::move(r));
}

SignedLatticeMeasure convolve(const SignedLatticeMeasure& a,
                              const SignedLatticeMeasure& b,
                              const ConvolveOptions& opts) {
  if (a.empty() || b.empty()) return {};
  long long len = static_cast<long long>(a.weights.size()) +
                  static_cast<long long>(b.weights.size()) - 1;
  check_cap(len, opts.support_cap, "convolution");
  SignedLatticeMeasure r;
  r.support_min = a.support_min + b.support_min;
  r.weights = dense_convolve(a.weights, b.weights);
  long double nb = 0;
  for (double x : r.weights) nb += std::abs(x);
  r.norm_bound = static_cast<double>(nb);
  return trimmed(std::move(r));
}

namespace {
template <typename M>
M restrict_impl(const M& w, Sign sign) {
  M r;
  if (w.empty()) return r;
  if (sign == Sign::nonpositive) {
    if (w.support_min > 0) return r;
    long long top = std::min<long long>(0, w.support_max());
    r.support_min = w.support_min;
    r.weights.assign(w.weights.begin(),
                     w.weights.begin() + (top - w.support_min + 1));
  } else {
    if (w.support_max() < 1) return r;
    long long bot = std::max<long long>(1, w.support_min);
    r.support_min = bot;
    r.weights.assign(w.weights.begin() + (bot - w.support_min), w.weights.end());
  }
  return trim_impl(std::move(r));
}
}  // namespace

LatticeMeasure restrict_sign(const LatticeMeasure& w, Sign sign) {
  // window-only: any unmaterialized tail is dropped here, callers that need
  // mass accounting across a restriction track it explicitly
  return restrict_impl(w, sign);
}

SignedLatticeMeasure restrict_sign(const SignedLatticeMeasure& w, Sign sign) {
  SignedLatticeMeasure r = restrict_impl(w, sign);
  long double nb = 0;
  for (double x : r.weights) nb += std::abs(x);
  r.norm_bound = static_cast<double>(nb);
  return r;
}

double principal_angle(double t) {
  // reduce to (-pi, pi]: for |t| in [pi, 2pi] the shift by 2pi is exact
  // (Sterbenz), so phases keep full relative accuracy near the 2pi seam,
  // where the raw argument only carries absolute accuracy ~ulp(2pi)
  double u = std::fmod(t, 2 * M_PI);
  if (u > M_PI)
    u -= 2 * M_PI;
  else if (u < -M_PI)
    u += 2 * M_PI;
  return u;
}

namespace {

// std::riemann_zeta costs ~10us per call, far too slow for a quadrature
// integrand; family parameters are fixed across one integration, so a
// one-slot cache removes the cost
double cached_zeta(double s) {
  thread_local double key = std::numeric_limits<double>::quiet_NaN();
  thread_local double val = 0.0;
  if (s != key) {
    val = std::riemann_zeta(s);
    key = s;
  }
  return val;
}

std::complex<double> window_char(const std::vector<double>& w, long long kmin,
                                 double t) {
  // rotation recurrence, resynced in blocks to hold the error near machine eps
  t = principal_angle(t);
  std::complex<double> acc = 0.0;
  const std::complex<double> step = std::polar(1.0, t);
  for (size_t block = 0; block < w.size(); block += 256) {
    size_t end = std::min(w.size(), block + 256);
    std::complex<double> z =
        std::polar(1.0, t * static_cast<double>(kmin + (long long)block));
    std::complex<double> local = 0.0;
    for (size_t i = block; i < end; ++i) {
      local += w[i] * z;
      z *= step;
    }
    acc += local;
  }
  return acc;
}

}  // namespace

std::complex<double> char_fn_materialized(const LatticeMeasure& m, double t) {
  return window_char(m.weights, m.support_min, t);
}

std::complex<double> char_fn(const SignedLatticeMeasure& m, double t) {
  return window_char(m.weights, m.support_min, t);
}

std::complex<double> char_fn(const LatticeMeasure& m, double t) {
  if (std::holds_alternative<std::monostate>(m.analytic))
    return char_fn_materialized(m, t);
  double u = principal_angle(t);
  if (const auto* g = std::get_if<GeometricForm>(&m.analytic)) {
    std::complex<double> z = std::polar(1.0, g->reflected ? -u : u);
    return g->p * z / (1.0 - (1.0 - g->p) * z);
  }
  if (const auto* z = std::get_if<ZetaForm>(&m.analytic)) {
    if (u == 0.0) return 1.0;
    double s = 1.0 + z->a;
    // the series form lives on (0, pi]; negative angles go through conjugation
    std::complex<double> v = (u > 0 ? polylog_exp(s, u)
                                    : std::conj(polylog_exp(s, -u))) /
                             cached_zeta(s);
    return z->reflected ? std::conj(v) : v;
  }
  const auto& sz = std::get<SymmetricZetaForm>(m.analytic);
  if (u == 0.0) return 1.0;
  double s = 1.0 + sz.a;
  return {polylog_exp(s, std::abs(u)).real() / cached_zeta(s), 0.0};
}

namespace {

inline std::complex<double> one_minus_exp(double a) {
  double h = std::sin(0.5 * a);
  return {2.0 * h * h, -std::sin(a)};
}

// Li_s(e^{it}) - zeta(s): the constant term of the expansion cancels exactly,
// which is what keeps 1 - char_fn stable for tiny t.
std::complex<double> polylog_tail(double s, double t);

}  // namespace

std::complex<double> one_minus_char(const LatticeMeasure& m, double t) {
  double u = principal_angle(t);
  if (const auto* g = std::get_if<GeometricForm>(&m.analytic)) {
    std::complex<double> z = std::polar(1.0, u);
    std::complex<double> v = one_minus_exp(u) / (1.0 - (1.0 - g->p) * z);
    return g->reflected ? std::conj(v) : v;
  }
  if (const auto* zf = std::get_if<ZetaForm>(&m.analytic)) {
    if (u == 0.0) return 0.0;
    double s = 1.0 + zf->a;
    std::complex<double> v = -(u > 0 ? polylog_tail(s, u)
                                     : std::conj(polylog_tail(s, -u))) /
                             cached_zeta(s);
    return zf->reflected ? std::conj(v) : v;
  }
  if (const auto* sz = std::get_if<SymmetricZetaForm>(&m.analytic)) {
    if (u == 0.0) return 0.0;
    double s = 1.0 + sz->a;
    return {-polylog_tail(s, std::abs(u)).real() / cached_zeta(s), 0.0};
  }
  if (m.tail_mass == 0.0) {
    // 1 - mu^ = (1 - total mass) + sum_k w(k)(1 - e^{ikt}), exact termwise.
    // A deficit below 1e-12 is representation noise from weights that do not
    // sum to 1 exactly in binary; carried through, it would plant a spurious
    // pole where the true symbol has its quadratic zero. Deliberately killed
    // measures carry masses far below this gate.
    double deficit = static_cast<double>(1.0L - kahan_sum(m.weights));
    if (std::abs(deficit) < 1e-12) deficit = 0.0;
    std::complex<double> acc = deficit;
    for (size_t i = 0; i < m.weights.size(); ++i) {
      double w = m.weights[i];
      if (w == 0.0) continue;
      double k = static_cast<double>(m.support_min + static_cast<long long>(i));
      acc += w * one_minus_exp(k * u);
    }
    return acc;
  }
  return 1.0 - char_fn_materialized(m, t);
}

LogSeriesResult log_series(const LatticeMeasure& w, double s, int n_max,
                           const ConvolveOptions& opts) {
  if (w.empty() || n_max < 1)
    throw std::invalid_argument("log_series needs a nonempty measure, n_max>=1");
  LogSeriesResult out;
  LatticeMeasure cur = w;
  SignedLatticeMeasure acc;
  double sn = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    sn *= s;
    double coef = sn / n;
    // acc += coef * cur
    long long lo = acc.empty() ? cur.support_min
                               : std::min(acc.support_min, cur.support_min);
    long long hi = acc.empty() ? cur.support_max()
                               : std::max(acc.support_max(), cur.support_max());
    SignedLatticeMeasure merged;
    merged.support_min = lo;
    merged.weights.assign(static_cast<size_t>(hi - lo + 1), 0.0);
    for (long long k = acc.support_min; !acc.empty() && k <= acc.support_max(); ++k)
      merged.weights[static_cast<size_t>(k - lo)] = acc.at(k);
    for (long long k = cur.support_min; k <= cur.support_max(); ++k)
      merged.weights[static_cast<size_t>(k - lo)] += coef * cur.at(k);
    acc = std::move(merged);
    if (n < n_max) cur = convolve(cur, w, opts);
  }
  long double nb = 0;
  for (double x : acc.weights) nb += std::abs(x);
  acc.norm_bound = static_cast<double>(nb);
  out.series = trimmed(std::move(acc));
  double q = s * w.total_mass();
  if (q >= 1.0)
    out.truncation_bound = std::numeric_limits<double>::infinity();
  else
    out.truncation_bound = std::pow(q, n_max + 1) / ((n_max + 1) * (1.0 - q));
  return out;
}

ExpSeriesResult exp_series(const SignedLatticeMeasure& w, int n_max,
                           const ConvolveOptions& opts) {
  if (n_max < 0) throw std::invalid_argument("exp_series needs n_max >= 0");
  ExpSeriesResult out;
  SignedLatticeMeasure term;  // w^n / n!
  term.support_min = 0;
  term.weights = {1.0};
  term.norm_bound = 1.0;
  SignedLatticeMeasure acc = term;
  for (int n = 1; n <= n_max && !w.empty(); ++n) {
    term = convolve(term, w, opts);
    for (double& x : term.weights) x /= n;
    term.norm_bound /= n;
    long long lo = std::min(acc.support_min, term.support_min);
    long long hi = std::max(acc.support_max(), term.support_max());
    SignedLatticeMeasure merged;
    merged.support_min = lo;
    merged.weights.assign(static_cast<size_t>(hi - lo + 1), 0.0);
    for (long long k = acc.support_min; k <= acc.support_max(); ++k)
      merged.weights[static_cast<size_t>(k - lo)] = acc.at(k);
    for (long long k = term.support_min; k <= term.support_max(); ++k)
      merged.weights[static_cast<size_t>(k - lo)] += term.at(k);
    acc = std::move(merged);
  }
  long double nb = 0;
  for (double x : acc.weights) nb += std::abs(x);
  acc.norm_bound = static_cast<double>(nb);
  out.series = trimmed(std::move(acc));
  double norm = 0;
  {
    long double s = 0;
    for (double x : w.weights) s += std::abs(x);
    norm = static_cast<double>(s);
  }
  if (norm == 0.0)
    out.remainder_bound = 0.0;
  else
    out.remainder_bound = std::exp(norm + (n_max + 1) * std::log(norm) -
                                   std::lgamma(n_max + 2.0));
  return out;
}

SignedLatticeMeasure negate(SignedLatticeMeasure w) {
  for (double& x : w.weights) x = -x;
  return w;
}

SignedLatticeMeasure to_signed(const LatticeMeasure& m) {
  SignedLatticeMeasure s;
  s.support_min = m.support_min;
  s.weights = m.weights;
  s.norm_bound = m.mass();
  return s;
}

double tv_distance(const LatticeMeasure& a, const LatticeMeasure& b) {
  if (a.empty() && b.empty()) return 0.0;
  long long lo = std::min(a.empty() ? b.support_min : a.support_min,
                          b.empty() ? a.support_min : b.support_min);
  long long hi = std::max(a.empty() ? b.support_max() : a.support_max(),
                          b.empty() ? a.support_max() : b.support_max());
  long double s = 0;
  for (long long k = lo; k <= hi; ++k) s += std::abs(a.at(k) - b.at(k));
  return static_cast<double>(s / 2);
}

QuadraticBound quadratic_lower_bound(const LatticeMeasure& mu) {
  long long m0 = 0;
  for (long long k = mu.support_min; k <= mu.support_max(); ++k) {
    if (k != 0 && mu.at(k) > 0 && (m0 == 0 || std::llabs(k) < m0))
      m0 = std::llabs(k);
  }
  if (m0 == 0)
    throw std::invalid_argument(
        "quadratic lower bound needs a nonzero step with positive weight");
  QuadraticBound qb;
  qb.cutoff = m0 + 1;
  qb.alpha = (2.0 / (M_PI * M_PI)) * second_moment_below(mu, qb.cutoff);
  qb.t0 = M_PI / static_cast<double>(qb.cutoff);
  return qb;
}

MeanResult mean(const LatticeMeasure& m) {
  MeanResult r;
  if (const auto* g = std::get_if<GeometricForm>(&m.analytic)) {
    r.value = (g->reflected ? -1.0 : 1.0) / g->p;
    r.exact = true;
    return r;
  }
  if (const auto* z = std::get_if<ZetaForm>(&m.analytic)) {
    if (z->a <= 1.0) {
      r.infinite = true;
      r.value = z->reflected ? -std::numeric_limits<double>::infinity()
                             : std::numeric_limits<double>::infinity();
      return r;
    }
    r.value = (z->reflected ? -1.0 : 1.0) * std::riemann_zeta(z->a) /
              std::riemann_zeta(1.0 + z->a);
    r.exact = true;
    return r;
  }
  if (const auto* sz = std::get_if<SymmetricZetaForm>(&m.analytic)) {
    if (sz->a <= 1.0) {
      r.infinite = true;
      r.value = std::numeric_limits<double>::quiet_NaN();
      return r;
    }
    r.value = 0.0;
    r.exact = true;
    return r;
  }
  long double s = 0;
  for (long long k = m.support_min; k <= m.support_max(); ++k)
    s += static_cast<long double>(k) * m.at(k);
  r.value = static_cast<double>(s);
  r.exact = (m.tail_mass == 0.0);
  r.tail_bound =
      m.tail_mass > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  return r;
}

double mean_exp_neg(const LatticeMeasure& m) {
  if (m.support_min < 1)
    throw std::invalid_argument("mean_exp_neg needs support in N*");
  long double s = 0;
  for (long long k = m.support_min; k <= m.support_max() && k <= 800; ++k)
    s += m.at(k) * std::exp(static_cast<long double>(-k));
  return static_cast<double>(s);
}

double second_moment_below(const LatticeMeasure& m, long long cutoff) {
  long double s = 0;
  for (long long k = std::max(m.support_min, -cutoff + 1);
       k <= std::min(m.support_max(), cutoff - 1); ++k)
    s += static_cast<long double>(k) * k * m.at(k);
  return static_cast<double>(s);
}

long long support_gcd(const LatticeMeasure& m) {
  long long g = 0;
  for (long long k = m.support_min; k <= m.support_max(); ++k)
    if (k != 0 && m.at(k) > 0) g = std::gcd(g, std::llabs(k));
  return g;
}

LatticeMeasure reflect(const LatticeMeasure& m) {
  LatticeMeasure r;
  r.support_min = -m.support_max();
  r.weights.assign(m.weights.rbegin(), m.weights.rend());
  r.tail_mass = m.tail_mass;
  r.analytic = m.analytic;
  if (auto* g = std::get_if<GeometricForm>(&r.analytic)) g->reflected ^= true;
  if (auto* z = std::get_if<ZetaForm>(&r.analytic)) z->reflected ^= true;
  return r;
}

LatticeMeasure dirac(long long k) {
  LatticeMeasure m;
  m.support_min = k;
  m.weights = {1.0};
  return m;
}

LatticeMeasure points_measure(
    const std::vector<std::pair<long long, double>>& pts) {
  if (pts.empty()) throw std::invalid_argument("points list is empty");
  std::vector<std::pair<long long, double>> sorted = pts;
  std::sort(sorted.begin(), sorted.end());
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i].second < 0) {
      std::ostringstream os;
      os << "negative weight at site " << sorted[i].first;
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && sorted[i].first == sorted[i - 1].first) {
      std::ostringstream os;
      os << "duplicate site " << sorted[i].first << " in points list";
      throw std::invalid_argument(os.str());
    }
  }
  long long lo = sorted.front().first, hi = sorted.back().first;
  check_cap(hi - lo + 1, 8'000'000, "points measure");
  LatticeMeasure m;
  m.support_min = lo;
  m.weights.assign(static_cast<size_t>(hi - lo + 1), 0.0);
  for (auto& [k, w] : sorted) m.weights[static_cast<size_t>(k - lo)] = w;
  return trimmed(std::move(m));
}

LatticeMeasure geometric_measure(double p, bool reflected) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("geometric family needs p in (0,1)");
  LatticeMeasure m;
  m.support_min = 1;
  double atom = p;
  double survivor = 1.0;
  while (atom >= 1e-18 && m.weights.size() < 100'000) {
    m.weights.push_back(atom);
    survivor *= (1.0 - p);
    atom *= (1.0 - p);
  }
  m.tail_mass = survivor;
  m.analytic = GeometricForm{p, false};
  return reflected ? reflect(m) : m;
}

LatticeMeasure zeta_measure(double a, long long window, bool reflected) {
  if (!(a > 0.0)) throw std::invalid_argument("zeta family needs a > 0");
  if (window < 2) throw std::invalid_argument("zeta family needs window >= 2");
  check_cap(window, 64'000'000, "zeta family");
  double s = 1.0 + a;
  double c = 1.0 / std::riemann_zeta(s);
  LatticeMeasure m;
  m.support_min = 1;
  m.weights.resize(static_cast<size_t>(window));
  long double acc = 0;
  for (long long k = 1; k <= window; ++k) {
    double w = c * std::pow(static_cast<double>(k), -s);
    m.weights[static_cast<size_t>(k - 1)] = w;
    acc += w;
  }
  m.tail_mass = std::max(0.0, static_cast<double>(1.0L - acc));
  m.analytic = ZetaForm{a, false};
  return reflected ? reflect(m) : m;
}

LatticeMeasure symmetric_zeta_measure(double a, long long window) {
  if (!(a > 0.0)) throw std::invalid_argument("zeta family needs a > 0");
  if (window < 2) throw std::invalid_argument("zeta family needs window >= 2");
  check_cap(2 * window + 1, 64'000'000, "zeta family");
  double s = 1.0 + a;
  double c = 1.0 / std::riemann_zeta(s);
  LatticeMeasure m;
  m.support_min = -window;
  m.weights.assign(static_cast<size_t>(2 * window + 1), 0.0);
  long double acc = 0;
  for (long long k = 1; k <= window; ++k) {
    double w = 0.5 * c * std::pow(static_cast<double>(k), -s);
    m.weights[static_cast<size_t>(window + k)] = w;
    m.weights[static_cast<size_t>(window - k)] = w;
    acc += 2 * w;
  }
  m.tail_mass = std::max(0.0, static_cast<double>(1.0L - acc));
  m.analytic = SymmetricZetaForm{a};
  return m;
}

bool is_probability(const LatticeMeasure& m, double tol) {
  return std::abs(m.total_mass() - 1.0) <= tol;
}

void require_probability(const LatticeMeasure& m, const char* what, double tol) {
  if (!is_probability(m, tol)) {
    std::ostringstream os;
    os << what << " must be a probability measure (total mass "
       << m.total_mass() << ")";
    throw std::invalid_argument(os.str());
  }
}

double zeta_tail(double s, long long K) {
  long double partial = 0;
  for (long long k = K; k >= 1; --k) partial += std::pow((long double)k, (long double)-s);
  return static_cast<double>((long double)std::riemann_zeta(s) - partial);
}

namespace {

// zeta values along s, s-1, ..., s-140 for the expansion below; one slot is
// enough because each integrand holds s fixed across thousands of t values
const std::vector<double>& zeta_ladder(double s, bool integer_s, long long n) {
  thread_local double cached_s = std::numeric_limits<double>::quiet_NaN();
  thread_local std::vector<double> ladder;
  if (s != cached_s) {
    ladder.assign(141, 0.0);
    for (int j = 0; j <= 140; ++j)
      if (!integer_s || j != n - 1) ladder[j] = std::riemann_zeta(s - j);
    cached_s = s;
  }
  return ladder;
}

}  // namespace

namespace {

std::complex<double> polylog_tail(double s, double t) {
  if (t > M_PI) return std::conj(polylog_tail(s, 2 * M_PI - t));
  const std::complex<double> it(0.0, t);
  long long n = std::llround(s);
  bool integer_s = std::abs(s - static_cast<double>(n)) < 1e-9;
  const std::vector<double>& zl = zeta_ladder(s, integer_s, n);
  std::complex<double> acc;
  if (integer_s) {
    // Li_n(e^{it}) = (it)^{n-1}/(n-1)! (H_{n-1} - log(-it)) + sum_{j != n-1} ...
    double H = 0;
    for (long long k = 1; k < n; ++k) H += 1.0 / k;
    std::complex<double> log_mit(std::log(t), -M_PI / 2);
    std::complex<double> pw = 1.0;
    for (long long k = 1; k < n; ++k) pw *= it / static_cast<double>(k);
    acc = pw * (H - log_mit);
  } else {
    // Gamma(1-s) * (-it)^{s-1}
    double mag = std::tgamma(1.0 - s) * std::pow(t, s - 1.0);
    double phase = -M_PI * (s - 1.0) / 2.0;
    acc = std::polar(mag, phase);
  }
  std::complex<double> w = it;  // (it)^j / j!, starting at j = 1
  for (int j = 1; j <= 140; ++j) {
    if (!integer_s || j != n - 1) {
      std::complex<double> term = zl[static_cast<size_t>(j)] * w;
      acc += term;
      if (j > 4 && std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    w *= it / static_cast<double>(j + 1);
  }
  return acc;
}

}  // namespace

std::complex<double> polylog_exp(double s, double t) {
  if (!(t > 0.0 && t < 2 * M_PI))
    throw std::invalid_argument("polylog_exp needs t in (0, 2pi)");
  return cached_zeta(s) + polylog_tail(s, t);
}

}  // namespace greenwalk
