#include "sigaug/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "sigaug/fft.hpp"

namespace sigaug {

namespace {

using cplx = std::complex<double>;

// Angular frequency of DFT bin k for unit sample spacing.
double bin_omega(std::size_t k, std::size_t n) {
  const double w = 2.0 * std::numbers::pi / static_cast<double>(n);
  return k <= n / 2 ? w * static_cast<double>(k) : -w * static_cast<double>(n - k);
}

void check_scales(const Eigen::VectorXd& scales, Index length) {
  if (scales.size() == 0) throw ShapeError("wavelet transform: empty scale list");
  for (Index i = 0; i < scales.size(); ++i) {
    if (!(scales[i] > 0.0) || scales[i] > static_cast<double>(length) / 4.0) {
      std::ostringstream os;
      os << "wavelet scale " << scales[i] << " outside (0, L/4] for L=" << length;
      throw ShapeError(os.str());
    }
  }
}

}  // namespace

double morlet_fourier_factor(double omega0) {
  return 4.0 * std::numbers::pi / (omega0 + std::sqrt(2.0 + omega0 * omega0));
}

Eigen::VectorXd log_scales(double smallest, double largest, Index count) {
  Eigen::VectorXd s(count);
  if (count == 1) {
    s[0] = smallest;
    return s;
  }
  const double ratio = std::log(largest / smallest) / static_cast<double>(count - 1);
  for (Index j = 0; j < count; ++j) s[j] = smallest * std::exp(ratio * static_cast<double>(j));
  s[count - 1] = largest;
  return s;
}

Eigen::VectorXd default_scales(Index signal_length) {
  return log_scales(2.0, static_cast<double>(signal_length) / 4.0, 32);
}

ComplexMatrix morlet_cwt(std::span<const double> signal, const Eigen::VectorXd& scales) {
  const auto len = static_cast<Index>(signal.size());
  check_scales(scales, len);
  const std::size_t n = next_power_of_two(2 * signal.size());
  std::vector<cplx> spectrum(n);
  for (std::size_t i = 0; i < signal.size(); ++i) spectrum[i] = signal[i];
  fft_inplace<double>(spectrum);

  const double norm0 = std::pow(std::numbers::pi, -0.25);
  ComplexMatrix out(scales.size(), len);
  std::vector<cplx> buf(n);
  for (Index j = 0; j < scales.size(); ++j) {
    const double s = scales[j];
    const double amp = std::sqrt(2.0 * std::numbers::pi * s) * norm0;
    for (std::size_t k = 0; k < n; ++k) {
      const double w = bin_omega(k, n);
      if (w > 0.0) {
        const double d = s * w - kMorletOmega0;
        buf[k] = spectrum[k] * (amp * std::exp(-0.5 * d * d));
      } else {
        buf[k] = 0.0;
      }
    }
    fft_inplace<double>(buf, true);
    for (Index t = 0; t < len; ++t) out(j, t) = buf[t];
  }
  return out;
}

Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> cone_of_influence(const Eigen::VectorXd& scales,
                                                                     Index length) {
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask(scales.size(), length);
  for (Index j = 0; j < scales.size(); ++j) {
    const double edge = std::numbers::sqrt2 * scales[j];
    for (Index t = 0; t < length; ++t) {
      mask(j, t) = static_cast<double>(std::min(t, length - 1 - t)) >= edge;
    }
  }
  return mask;
}

namespace {

// Gaussian smoothing along time of each row (row j with sigma = width * s_j),
// as a linear (zero-padded) convolution evaluated through the FFT.
ComplexMatrix smooth_time(const ComplexMatrix& q, const Eigen::VectorXd& scales, double width) {
  const Index len = q.cols();
  const double max_sigma = width * scales.maxCoeff();
  const std::size_t n = next_power_of_two(static_cast<std::size_t>(len + static_cast<Index>(std::ceil(8.0 * max_sigma)) + 1));
  ComplexMatrix out(q.rows(), len);
  std::vector<cplx> buf(n);
  for (Index j = 0; j < q.rows(); ++j) {
    std::fill(buf.begin(), buf.end(), cplx{});
    for (Index t = 0; t < len; ++t) buf[t] = q(j, t);
    fft_inplace<double>(buf);
    const double sigma = width * scales[j];
    for (std::size_t k = 0; k < n; ++k) {
      const double w = bin_omega(k, n);
      buf[k] *= std::exp(-0.5 * sigma * sigma * w * w);
    }
    fft_inplace<double>(buf, true);
    for (Index t = 0; t < len; ++t) out(j, t) = buf[t];
  }
  return out;
}

ComplexMatrix smooth_scale(const ComplexMatrix& q, Index window) {
  const Index half = window / 2;
  ComplexMatrix out(q.rows(), q.cols());
  for (Index j = 0; j < q.rows(); ++j) {
    const Index lo = std::max<Index>(0, j - half), hi = std::min<Index>(q.rows() - 1, j + half);
    out.row(j) = q.middleRows(lo, hi - lo + 1).colwise().sum() / static_cast<double>(hi - lo + 1);
  }
  return out;
}

ComplexMatrix smooth(const ComplexMatrix& q, const Eigen::VectorXd& scales, const CoherenceSmoothing& sm) {
  return smooth_scale(smooth_time(q, scales, sm.time_width), sm.scale_window);
}

}  // namespace

CoherenceMap wavelet_coherence(std::span<const double> x, std::span<const double> y,
                               const Eigen::VectorXd& scales, const CoherenceSmoothing& smoothing) {
  if (x.size() != y.size()) {
    throw ShapeError("wavelet coherence: signal lengths " + std::to_string(x.size()) + " and " +
                     std::to_string(y.size()) + " differ");
  }
  if (smoothing.time_width <= 0.0 || smoothing.scale_window < 1 || smoothing.scale_window % 2 == 0) {
    throw ShapeError("wavelet coherence: time width must be > 0 and scale window a positive odd count");
  }
  const auto len = static_cast<Index>(x.size());
  const ComplexMatrix wx = morlet_cwt(x, scales);
  const ComplexMatrix wy = morlet_cwt(y, scales);
  const Eigen::VectorXd inv_s = scales.cwiseInverse();

  const ComplexMatrix cross = inv_s.asDiagonal() * wx.cwiseProduct(wy.conjugate());
  const ComplexMatrix px = inv_s.asDiagonal() * wx.cwiseAbs2().cast<cplx>();
  const ComplexMatrix py = inv_s.asDiagonal() * wy.cwiseAbs2().cast<cplx>();

  const ComplexMatrix s_cross = smooth(cross, scales, smoothing);
  const Eigen::MatrixXd s_px = smooth(px, scales, smoothing).real();
  const Eigen::MatrixXd s_py = smooth(py, scales, smoothing).real();

  CoherenceMap map;
  map.scales = scales;
  map.mask = cone_of_influence(scales, len);
  map.values = Eigen::MatrixXd::Zero(scales.size(), len);
  const double floor_x = 1e-12 * std::max(0.0, s_px.maxCoeff());
  const double floor_y = 1e-12 * std::max(0.0, s_py.maxCoeff());
  for (Index j = 0; j < scales.size(); ++j) {
    for (Index t = 0; t < len; ++t) {
      const double a = s_px(j, t), b = s_py(j, t);
      if (!(a > floor_x) || !(b > floor_y)) {
        ++map.zero_energy_cells;
        continue;
      }
      map.values(j, t) = std::clamp(std::norm(s_cross(j, t)) / (a * b), 0.0, 1.0);
    }
  }
  return map;
}

double mean_coherence(const CoherenceMap& map) {
  if (map.mask.rows() != map.values.rows() || map.mask.cols() != map.values.cols()) {
    throw ShapeError("coherence map mask does not match its values");
  }
  const Index count = map.mask.count();
  if (count == 0) throw ShapeError("coherence map is fully masked");
  return map.mask.select(map.values.array(), 0.0).sum() / static_cast<double>(count);
}

void write_csv(std::ostream& os, const CoherenceMap& map) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(9);
  for (Index j = 0; j < map.values.rows(); ++j) {
    os << map.scales[j];
    for (Index t = 0; t < map.values.cols(); ++t) os << ',' << map.values(j, t);
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace sigaug
