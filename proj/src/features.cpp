#include "sigaug/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sigaug/fft.hpp"

namespace sigaug {

Eigen::VectorXd FeatureVector::to_vector() const {
  Eigen::VectorXd v(kSize);
  v << mean, stddev, rms, peak_to_peak, skewness, kurtosis, crest_factor, spectral_centroid, band_energy[0],
      band_energy[1], band_energy[2], band_energy[3];
  return v;
}

FeatureVector extract_features(std::span<const double> signal, double sample_rate) {
  if (signal.size() < 64) throw ShapeError("feature extraction needs at least 64 samples");
  if (!(sample_rate > 0.0)) throw ShapeError("feature extraction needs a positive sample rate");
  const Eigen::Map<const Eigen::VectorXd> x(signal.data(), static_cast<Index>(signal.size()));
  const auto n = static_cast<double>(x.size());

  FeatureVector f;
  f.mean = x.mean();
  const Eigen::ArrayXd c = x.array() - f.mean;
  const double m2 = c.square().mean();
  f.stddev = std::sqrt(m2);
  f.rms = std::sqrt(x.squaredNorm() / n);
  f.peak_to_peak = x.maxCoeff() - x.minCoeff();
  // Relative threshold so that rounding noise on a constant signal counts as zero variance.
  if (m2 > 1e-24 * std::max(1.0, f.mean * f.mean)) {
    f.skewness = c.cube().mean() / std::pow(m2, 1.5);
    f.kurtosis = c.square().square().mean() / (m2 * m2);
  } else {
    f.degenerate = true;
  }
  if (f.rms > 0.0) {
    f.crest_factor = x.cwiseAbs().maxCoeff() / f.rms;
  } else {
    f.degenerate = true;
  }

  const std::vector<std::complex<double>> spec = fft_real<double>(signal);
  const std::size_t nfft = spec.size();
  const double bin_hz = sample_rate / static_cast<double>(nfft);
  const double nyquist = sample_rate / 2.0;
  double total = 0.0, weighted = 0.0;
  std::array<double, 4> bands{};
  for (std::size_t k = 0; k <= nfft / 2; ++k) {
    const double mag = std::abs(spec[k]);
    const double energy = mag * mag;
    const double freq = bin_hz * static_cast<double>(k);
    weighted += freq * mag;
    total += mag;
    const int band = freq < nyquist / 8 ? 0 : freq < nyquist / 4 ? 1 : freq < nyquist / 2 ? 2 : 3;
    bands[band] += energy;
  }
  f.spectral_centroid = total > 0.0 ? weighted / total : 0.0;
  const double energy = bands[0] + bands[1] + bands[2] + bands[3];
  if (energy > 0.0) {
    for (int b = 0; b < 4; ++b) f.band_energy[b] = bands[b] / energy;
  } else {
    f.band_energy.fill(0.25);
    f.degenerate = true;
  }
  return f;
}

double mape(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.empty() || y_true.size() != y_pred.size()) {
    throw ShapeError("mape: need equal, non-zero lengths (got " + std::to_string(y_true.size()) + " and " +
                     std::to_string(y_pred.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == 0.0) throw std::domain_error("mape: true value " + std::to_string(i) + " is zero");
    sum += std::abs(y_true[i] - y_pred[i]) / std::abs(y_true[i]);
  }
  return 100.0 * sum / static_cast<double>(y_true.size());
}

double mape(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred) {
  return mape(std::span<const double>(y_true.data(), static_cast<std::size_t>(y_true.size())),
              std::span<const double>(y_pred.data(), static_cast<std::size_t>(y_pred.size())));
}

}  // namespace sigaug
