#pragma once

#include <complex>
#include <vector>

namespace greenwalk {

// In-place radix-2 FFT; size must be a power of two.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// First n coefficients of 1 / (1 - p(z)) via Newton power-series inversion,
// where p has coefficients p[0..]. Requires p[0] != 1.
std::vector<double> power_series_inverse_one_minus(const std::vector<double>& p,
                                                   size_t n);

}  // namespace greenwalk
