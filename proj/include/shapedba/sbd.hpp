#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "shapedba/error.hpp"

namespace shapedba {

/// Cross-correlation cc(s) = sum_t x[t] * y[t - s] for every shift
/// s in [-(L - 1), L - 1], stored at index s + L - 1. Computed in the
/// frequency domain with zero padding to a power of two >= 2L - 1.
inline std::vector<double> cross_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size(), "cross_correlation");
  if (x.empty()) throw InvalidArgument("cross_correlation: empty series");
  const std::size_t len = x.size();
  std::size_t nfft = 2;  // Eigen's kissfft cannot do a length-1 transform
  while (nfft < 2 * len - 1) nfft <<= 1;

  std::vector<std::complex<double>> fx(nfft), fy(nfft);
  for (std::size_t t = 0; t < len; ++t) {
    fx[t] = x[t];
    fy[t] = y[t];
  }
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> sx, sy, prod(nfft), r;
  fft.fwd(sx, fx);
  fft.fwd(sy, fy);
  for (std::size_t f = 0; f < nfft; ++f) prod[f] = sx[f] * std::conj(sy[f]);
  fft.inv(r, prod);

  std::vector<double> out(2 * len - 1);
  for (std::size_t s = 0; s < len; ++s) out[len - 1 + s] = r[s].real();
  for (std::size_t s = 1; s < len; ++s) out[len - 1 - s] = r[nfft - s].real();
  return out;
}

/// y delayed by `shift` samples (negative advances), zero filled.
inline std::vector<double> shift_series(std::span<const double> y, long shift) {
  const long len = static_cast<long>(y.size());
  std::vector<double> out(y.size(), 0.0);
  for (long t = 0; t < len; ++t) {
    const long src = t - shift;
    if (src >= 0 && src < len) out[static_cast<std::size_t>(t)] = y[static_cast<std::size_t>(src)];
  }
  return out;
}

struct SbdResult {
  double distance = 1.0;  // in [0, 2]
  long shift = 0;         // y shifted by `shift` best matches x
};

/// Shape-based distance: 1 minus the maximum coefficient-normalised
/// cross-correlation. A zero-norm argument gives distance 1, shift 0.
inline SbdResult sbd(std::span<const double> x, std::span<const double> y) {
  const std::vector<double> cc = cross_correlation(x, y);
  double nx = 0.0, ny = 0.0;
  for (double v : x) nx += v * v;
  for (double v : y) ny += v * v;
  const double denom = std::sqrt(nx * ny);
  if (denom == 0.0) return {1.0, 0};

  std::size_t best = 0;
  for (std::size_t k = 1; k < cc.size(); ++k) {
    if (cc[k] > cc[best]) best = k;
  }
  const long shift = static_cast<long>(best) - static_cast<long>(x.size() - 1);
  // The peak is re-evaluated in the time domain so sbd(x, x) is exactly 0.
  const std::vector<double> aligned = shift_series(y, shift);
  double peak = 0.0;
  for (std::size_t t = 0; t < x.size(); ++t) peak += x[t] * aligned[t];
  const double ncc = peak / denom;
  double d = 1.0 - ncc;
  if (d < 0.0) d = 0.0;  // rounding when y is a positive multiple of x
  return {d, shift};
}

}  // namespace shapedba
