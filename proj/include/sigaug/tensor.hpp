#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <cstring>
#include <sstream>
#include <string>

#include "sigaug/errors.hpp"

namespace sigaug {

using Index = Eigen::Index;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// One signal per row; rows are contiguous so a batch maps directly onto a
// single-channel feature map.
template <typename Scalar>
using SignalBatchT = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// a * b. Narrow right-hand sides go column by column through GEMV, which
// avoids the panel packing that dominates small-batch GEMM.
template <typename A, typename B>
MatrixX<typename A::Scalar> matmul(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  constexpr Index kNarrow = 8;
  MatrixX<typename A::Scalar> out(a.rows(), b.cols());
  if (b.cols() <= kNarrow) {
    for (Index j = 0; j < b.cols(); ++j) out.col(j).noalias() = a * b.col(j);
  } else {
    out.noalias() = a * b;
  }
  return out;
}
using SignalBatch = SignalBatchT<double>;

/// Batched multi-channel 1D activations.
///
/// `values` is channels x (batch * length); sample b occupies the column block
/// [b * length, (b + 1) * length). Dense layers use length == 1, so a column is
/// one sample's feature vector.
template <typename Scalar>
struct FeatureMapT {
  MatrixX<Scalar> values;
  Index length = 0;

  FeatureMapT() = default;
  FeatureMapT(MatrixX<Scalar> v, Index len) : values(std::move(v)), length(len) {
    if (length <= 0 || values.cols() % length != 0) {
      std::ostringstream os;
      os << "feature map with " << values.cols() << " columns is not a whole number of length-"
         << length << " samples";
      throw ShapeError(os.str());
    }
  }

  Index channels() const { return values.rows(); }
  Index batch() const { return length == 0 ? 0 : values.cols() / length; }

  auto sample(Index b) { return values.middleCols(b * length, length); }
  auto sample(Index b) const { return values.middleCols(b * length, length); }

  std::string shape_string() const {
    std::ostringstream os;
    os << "[batch=" << batch() << ", channels=" << channels() << ", length=" << length << "]";
    return os.str();
  }
};
using FeatureMap = FeatureMapT<double>;

template <typename Scalar>
FeatureMapT<Scalar> to_feature_map(const SignalBatchT<Scalar>& signals) {
  MatrixX<Scalar> v = Eigen::Map<const MatrixX<Scalar>>(signals.data(), 1, signals.size());
  return FeatureMapT<Scalar>(std::move(v), signals.cols());
}

// Channel 0 of every sample as one row per sample.
template <typename Scalar>
SignalBatchT<Scalar> to_signal_batch(const FeatureMapT<Scalar>& fm, Index channel = 0) {
  SignalBatchT<Scalar> out(fm.batch(), fm.length);
  for (Index b = 0; b < fm.batch(); ++b) {
    out.row(b) = fm.values.row(channel).segment(b * fm.length, fm.length);
  }
  return out;
}

// Per-sample flatten in channel-major order: (C x B*L) -> (C*L x B).
template <typename Scalar>
FeatureMapT<Scalar> flatten(const FeatureMapT<Scalar>& fm) {
  const Index c = fm.channels(), len = fm.length, batch = fm.batch();
  MatrixX<Scalar> out(c * len, batch);
  for (Index b = 0; b < batch; ++b) {
    for (Index ch = 0; ch < c; ++ch) {
      out.col(b).segment(ch * len, len) = fm.values.row(ch).segment(b * len, len).transpose();
    }
  }
  return FeatureMapT<Scalar>(std::move(out), 1);
}

// Inverse of flatten.
template <typename Scalar>
FeatureMapT<Scalar> unflatten(const FeatureMapT<Scalar>& flat, Index channels, Index length) {
  if (flat.length != 1 || flat.channels() != channels * length) {
    std::ostringstream os;
    os << "cannot unflatten " << flat.shape_string() << " into " << channels << " x " << length;
    throw ShapeError(os.str());
  }
  const Index batch = flat.batch();
  MatrixX<Scalar> out(channels, batch * length);
  for (Index b = 0; b < batch; ++b) {
    for (Index ch = 0; ch < channels; ++ch) {
      out.row(ch).segment(b * length, length) = flat.values.col(b).segment(ch * length, length).transpose();
    }
  }
  return FeatureMapT<Scalar>(std::move(out), length);
}

// Order-sensitive checksum of the bit patterns of a matrix.
inline std::uint64_t checksum_bits(const Eigen::MatrixXd& m, std::uint64_t h = 1469598103934665603ULL) {
  for (Index i = 0; i < m.size(); ++i) {
    std::uint64_t bits;
    const double v = m.data()[i];
    std::memcpy(&bits, &v, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (bits >> (8 * byte)) & 0xffU;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace sigaug
