#include "greenwalk/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace greenwalk {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft length must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double dir = inverse ? 2.0 : -2.0;
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = dir * M_PI / static_cast<double>(len);
    const std::complex<double> step(std::cos(ang), std::sin(ang));
    for (size_t base = 0; base < n; base += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        // re-anchor the twiddle so rounding does not accumulate across a
        // megapoint-long run of multiplications
        if ((k & 63) == 0)
          w = std::polar(1.0, ang * static_cast<double>(k));
        std::complex<double> u = a[base + k];
        std::complex<double> v = a[base + k + len / 2] * w;
        a[base + k] = u + v;
        a[base + k + len / 2] = u - v;
        w *= step;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

namespace {

// first `keep` coefficients of x*y
std::vector<double> multiply_trunc(const std::vector<double>& x,
                                   const std::vector<double>& y, size_t keep) {
  if (x.empty() || y.empty() || keep == 0) return {};
  const size_t full = std::min(keep, x.size() + y.size() - 1);
  if (x.size() * y.size() <= 64 * 64) {
    std::vector<double> out(full, 0.0);
    for (size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) continue;
      const size_t jmax = std::min(y.size(), full - std::min(full, i));
      for (size_t j = 0; j < jmax && i + j < full; ++j)
        out[i + j] += x[i] * y[j];
    }
    return out;
  }
  size_t n = 1;
  while (n < x.size() + y.size() - 1) n <<= 1;
  std::vector<std::complex<double>> fa(n), fb(n);
  for (size_t i = 0; i < x.size(); ++i) fa[i] = x[i];
  for (size_t i = 0; i < y.size(); ++i) fb[i] = y[i];
  fft(fa, false);
  fft(fb, false);
  for (size_t i = 0; i < n; ++i) fa[i] *= fb[i];
  fft(fa, true);
  std::vector<double> out(full);
  for (size_t i = 0; i < full; ++i) out[i] = fa[i].real();
  return out;
}

}  // namespace

std::vector<double> power_series_inverse_one_minus(const std::vector<double>& p,
                                                   size_t n) {
  if (n == 0) return {};
  const double a0 = 1.0 - (p.empty() ? 0.0 : p[0]);
  if (a0 == 0.0)
    throw std::invalid_argument("series inversion needs p[0] != 1");
  // invert a(z) = 1 - p(z) by Newton doubling: q <- q (2 - a q)
  std::vector<double> a(std::min(n, std::max<size_t>(p.size(), 1)), 0.0);
  a[0] = a0;
  for (size_t i = 1; i < a.size() && i < p.size(); ++i) a[i] = -p[i];
  std::vector<double> q{1.0 / a0};
  size_t m = 1;
  while (m < n) {
    m = std::min(2 * m, n);
    std::vector<double> head(a.begin(),
                             a.begin() + static_cast<long>(std::min(m, a.size())));
    std::vector<double> t = multiply_trunc(head, q, m);
    t.resize(m, 0.0);
    for (double& v : t) v = -v;
    t[0] += 2.0;
    q = multiply_trunc(q, t, m);
    q.resize(m, 0.0);
  }
  q.resize(n, 0.0);
  return q;
}

}  // namespace greenwalk
