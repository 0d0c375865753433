#pragma once

#include <array>
#include <span>

#include "sigaug/tensor.hpp"

namespace sigaug {

/// Hand-crafted time and frequency statistics of one signal.
struct FeatureVector {
  double mean = 0.0;
  double stddev = 0.0;
  double rms = 0.0;
  double peak_to_peak = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess: 3 for a Gaussian
  double crest_factor = 0.0;
  double spectral_centroid = 0.0;  // Hz
  // Energy fractions in [0, fN/8), [fN/8, fN/4), [fN/4, fN/2), [fN/2, fN].
  std::array<double, 4> band_energy{};
  // Set when the signal has zero variance (skewness, kurtosis reported as 0)
  // or zero energy (crest factor 0, band energy split evenly).
  bool degenerate = false;

  static constexpr Index kSize = 12;
  Eigen::VectorXd to_vector() const;
};

// Requires at least 64 samples.
FeatureVector extract_features(std::span<const double> signal, double sample_rate);

// (100 / n) sum |t - p| / |t|. Throws on n == 0, length mismatch or a zero true value.
double mape(std::span<const double> y_true, std::span<const double> y_pred);
double mape(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

}  // namespace sigaug
