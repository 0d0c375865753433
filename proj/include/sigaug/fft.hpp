#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "sigaug/errors.hpp"

namespace sigaug {

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// In-place iterative radix-2 FFT. Forward is unnormalised; the inverse
/// applies 1/N so fft followed by inverse fft is the identity.
template <typename Scalar>
void fft_inplace(std::span<std::complex<Scalar>> data, bool inverse = false) {
  const std::size_t n = data.size();
  if (n == 0) throw ShapeError("fft of length 0");
  if (!is_power_of_two(n)) throw ShapeError("fft length " + std::to_string(n) + " is not a power of two");

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const Scalar sign = inverse ? Scalar(1) : Scalar(-1);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const Scalar angle = sign * Scalar(2) * std::numbers::pi_v<Scalar> / static_cast<Scalar>(len);
    const std::size_t half = len / 2;
    // Twiddles computed directly rather than by repeated multiplication.
    std::vector<std::complex<Scalar>> tw(half);
    for (std::size_t k = 0; k < half; ++k) {
      tw[k] = std::polar(Scalar(1), angle * static_cast<Scalar>(k));
    }
    for (std::size_t start = 0; start < n; start += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const std::complex<Scalar> u = data[start + k];
        const std::complex<Scalar> v = data[start + k + half] * tw[k];
        data[start + k] = u + v;
        data[start + k + half] = u - v;
      }
    }
  }
  if (inverse) {
    const Scalar scale = Scalar(1) / static_cast<Scalar>(n);
    for (auto& x : data) x *= scale;
  }
}

// Zero-pads to the next power of two.
template <typename Scalar>
std::vector<std::complex<Scalar>> fft(std::span<const std::complex<Scalar>> x) {
  if (x.empty()) throw ShapeError("fft of length 0");
  std::vector<std::complex<Scalar>> out(next_power_of_two(x.size()));
  std::copy(x.begin(), x.end(), out.begin());
  fft_inplace<Scalar>(out);
  return out;
}

template <typename Scalar>
std::vector<std::complex<Scalar>> ifft(std::span<const std::complex<Scalar>> x) {
  std::vector<std::complex<Scalar>> out(x.begin(), x.end());
  fft_inplace<Scalar>(out, true);
  return out;
}

template <typename Scalar>
std::vector<std::complex<Scalar>> fft_real(std::span<const Scalar> x) {
  if (x.empty()) throw ShapeError("fft of length 0");
  std::vector<std::complex<Scalar>> out(next_power_of_two(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i];
  fft_inplace<Scalar>(out);
  return out;
}

}  // namespace sigaug
