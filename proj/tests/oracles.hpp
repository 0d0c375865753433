#pragma once

// Slow, obviously-correct reference implementations used as test oracles.

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "sigaug/tensor.hpp"

namespace oracle {

using sigaug::Index;

// x: C x L (one sample), w: F x C x K as w[f][c][k]. Zero padding.
inline Eigen::MatrixXd conv1d(const Eigen::MatrixXd& x, const std::vector<std::vector<std::vector<double>>>& w,
                              const std::vector<double>& bias, Index stride, Index pad) {
  const Index C = x.rows(), L = x.cols(), F = static_cast<Index>(w.size());
  const Index K = static_cast<Index>(w[0][0].size());
  const Index out = (L + 2 * pad - K) / stride + 1;
  Eigen::MatrixXd y(F, out);
  for (Index f = 0; f < F; ++f) {
    for (Index m = 0; m < out; ++m) {
      double acc = bias[f];
      for (Index c = 0; c < C; ++c) {
        for (Index k = 0; k < K; ++k) {
          const Index j = m * stride + k - pad;
          if (j >= 0 && j < L) acc += w[f][c][k] * x(c, j);
        }
      }
      y(f, m) = acc;
    }
  }
  return y;
}

// Scatter-add: each input element x(c, m) emits w[f][c][k] * x(c, m) at position m*s + k - p.
inline Eigen::MatrixXd conv1d_transpose(const Eigen::MatrixXd& x,
                                        const std::vector<std::vector<std::vector<double>>>& w,
                                        const std::vector<double>& bias, Index stride, Index pad) {
  const Index C = x.rows(), L = x.cols(), F = static_cast<Index>(w.size());
  const Index K = static_cast<Index>(w[0][0].size());
  const Index out = (L - 1) * stride - 2 * pad + K;
  Eigen::MatrixXd y(F, out);
  for (Index f = 0; f < F; ++f) y.row(f).setConstant(bias[f]);
  for (Index f = 0; f < F; ++f) {
    for (Index c = 0; c < C; ++c) {
      for (Index m = 0; m < L; ++m) {
        for (Index k = 0; k < K; ++k) {
          const Index j = m * stride + k - pad;
          if (j >= 0 && j < out) y(f, j) += w[f][c][k] * x(c, m);
        }
      }
    }
  }
  return y;
}

inline std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x, bool inverse = false) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = sign * 2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

inline Eigen::MatrixXd matmul(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(a.rows(), b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < b.cols(); ++j)
      for (Index k = 0; k < a.cols(); ++k) c(i, j) += a(i, k) * b(k, j);
  return c;
}

}  // namespace oracle
