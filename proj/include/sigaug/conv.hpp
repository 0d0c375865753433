#pragma once

#include <sstream>

#include "sigaug/tensor.hpp"

namespace sigaug {

struct ConvSpec {
  Index in_channels = 1;
  Index out_channels = 1;
  Index kernel_size = 1;
  Index stride = 1;
  Index padding = 0;

  void validate() const {
    if (in_channels < 1 || out_channels < 1 || kernel_size < 1 || stride < 1 || padding < 0) {
      std::ostringstream os;
      os << "invalid conv spec: in=" << in_channels << " out=" << out_channels << " K=" << kernel_size
         << " s=" << stride << " p=" << padding;
      throw ShapeError(os.str());
    }
  }
  bool operator==(const ConvSpec&) const = default;
};

// floor((L + 2p - K) / s) + 1
inline Index conv_output_length(Index length, Index kernel, Index stride, Index padding) {
  if (length + 2 * padding < kernel) {
    std::ostringstream os;
    os << "conv1d input length " << length << " with padding " << padding << " is shorter than kernel "
       << kernel;
    throw ShapeError(os.str());
  }
  return (length + 2 * padding - kernel) / stride + 1;
}

// (L - 1) s - 2p + K
inline Index conv_transpose_output_length(Index length, Index kernel, Index stride, Index padding) {
  const Index full = (length - 1) * stride + kernel;
  if (length < 1 || full <= 2 * padding) {
    std::ostringstream os;
    os << "conv1d_transpose with L=" << length << " K=" << kernel << " s=" << stride << " p=" << padding
       << " has non-positive output length";
    throw ShapeError(os.str());
  }
  return full - 2 * padding;
}

/// Unfolds kernel windows into columns: result(c*K + k, b*Lout + m) = x(c, b*L + m*s + k - p),
/// zero outside the signal.
template <typename Scalar>
MatrixX<Scalar> im2col(const FeatureMapT<Scalar>& x, Index kernel, Index stride, Index padding) {
  const Index channels = x.channels(), len = x.length, batch = x.batch();
  const Index out_len = conv_output_length(len, kernel, stride, padding);
  MatrixX<Scalar> cols = MatrixX<Scalar>::Zero(channels * kernel, batch * out_len);
  for (Index b = 0; b < batch; ++b) {
    for (Index m = 0; m < out_len; ++m) {
      const Index col = b * out_len + m;
      const Index start = m * stride - padding;
      for (Index c = 0; c < channels; ++c) {
        for (Index k = 0; k < kernel; ++k) {
          const Index j = start + k;
          if (j >= 0 && j < len) cols(c * kernel + k, col) = x.values(c, b * len + j);
        }
      }
    }
  }
  return cols;
}

/// Adjoint of im2col: scatter-adds each column's kernel window back into a
/// signal of length `out_len`. `in_len` is the number of columns per sample.
template <typename Scalar>
FeatureMapT<Scalar> col2im(const MatrixX<Scalar>& cols, Index channels, Index in_len, Index out_len,
                           Index kernel, Index stride, Index padding) {
  if (cols.rows() != channels * kernel || in_len < 1 || cols.cols() % in_len != 0) {
    std::ostringstream os;
    os << "col2im: columns " << cols.rows() << "x" << cols.cols() << " do not match channels=" << channels
       << " K=" << kernel << " per-sample length " << in_len;
    throw ShapeError(os.str());
  }
  const Index batch = cols.cols() / in_len;
  MatrixX<Scalar> out = MatrixX<Scalar>::Zero(channels, batch * out_len);
  for (Index b = 0; b < batch; ++b) {
    for (Index m = 0; m < in_len; ++m) {
      const Index col = b * in_len + m;
      const Index start = m * stride - padding;
      for (Index c = 0; c < channels; ++c) {
        for (Index k = 0; k < kernel; ++k) {
          const Index j = start + k;
          if (j >= 0 && j < out_len) out(c, b * out_len + j) += cols(c * kernel + k, col);
        }
      }
    }
  }
  return FeatureMapT<Scalar>(std::move(out), out_len);
}

/// Cross-correlation y(f, m) = sum_c sum_k w(f, c*K + k) x(c, m*s + k - p) + bias(f).
/// `kernel` is F x (C_in * K).
template <typename Scalar>
FeatureMapT<Scalar> conv1d(const FeatureMapT<Scalar>& x, const MatrixX<Scalar>& kernel,
                           const VectorX<Scalar>& bias, const ConvSpec& spec) {
  spec.validate();
  if (x.channels() != spec.in_channels || kernel.rows() != spec.out_channels ||
      kernel.cols() != spec.in_channels * spec.kernel_size || bias.size() != spec.out_channels) {
    std::ostringstream os;
    os << "conv1d: input " << x.shape_string() << " kernel " << kernel.rows() << "x" << kernel.cols()
       << " bias " << bias.size() << " incompatible with spec in=" << spec.in_channels
       << " out=" << spec.out_channels << " K=" << spec.kernel_size;
    throw ShapeError(os.str());
  }
  const Index out_len = conv_output_length(x.length, spec.kernel_size, spec.stride, spec.padding);
  MatrixX<Scalar> y = kernel * im2col(x, spec.kernel_size, spec.stride, spec.padding);
  y.colwise() += bias;
  return FeatureMapT<Scalar>(std::move(y), out_len);
}

/// Transposed convolution: every input element emits a scaled copy of the
/// kernel at offset m*s - p. `kernel` is (F_out * K) x C_in, i.e. the
/// transpose of the matching conv1d kernel, so conv1d_transpose is the adjoint
/// of conv1d when bias is zero.
template <typename Scalar>
FeatureMapT<Scalar> conv1d_transpose(const FeatureMapT<Scalar>& x, const MatrixX<Scalar>& kernel,
                                     const VectorX<Scalar>& bias, const ConvSpec& spec) {
  spec.validate();
  if (x.channels() != spec.in_channels || kernel.cols() != spec.in_channels ||
      kernel.rows() != spec.out_channels * spec.kernel_size || bias.size() != spec.out_channels) {
    std::ostringstream os;
    os << "conv1d_transpose: input " << x.shape_string() << " kernel " << kernel.rows() << "x"
       << kernel.cols() << " bias " << bias.size() << " incompatible with spec in=" << spec.in_channels
       << " out=" << spec.out_channels << " K=" << spec.kernel_size;
    throw ShapeError(os.str());
  }
  const Index out_len = conv_transpose_output_length(x.length, spec.kernel_size, spec.stride, spec.padding);
  MatrixX<Scalar> cols = kernel * x.values;
  FeatureMapT<Scalar> y =
      col2im(cols, spec.out_channels, x.length, out_len, spec.kernel_size, spec.stride, spec.padding);
  y.values.colwise() += bias;
  return y;
}

}  // namespace sigaug
