#pragma once

#include <iosfwd>
#include <span>

#include "sigaug/tensor.hpp"

namespace sigaug {

inline constexpr double kMorletOmega0 = 6.0;

// Fourier period of a Morlet wavelet at scale s is s * this factor.
double morlet_fourier_factor(double omega0 = kMorletOmega0);

// `count` log-spaced scales from `smallest` to `largest` (inclusive).
Eigen::VectorXd log_scales(double smallest, double largest, Index count);
// 32 scales from 2 samples to L/4.
Eigen::VectorXd default_scales(Index signal_length);

using ComplexMatrix = Eigen::MatrixXcd;

/// Continuous wavelet transform with the analytic Morlet wavelet, one row per
/// scale. Computed per scale in the frequency domain on a zero-padded copy of
/// the signal, with L2 normalisation sqrt(2 pi s).
ComplexMatrix morlet_cwt(std::span<const double> signal, const Eigen::VectorXd& scales);

// true where min(n, L-1-n) >= sqrt(2) * s, i.e. outside the edge-affected region.
Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> cone_of_influence(const Eigen::VectorXd& scales, Index length);

struct CoherenceSmoothing {
  // Gaussian time smoothing with standard deviation time_width * s samples.
  double time_width = 1.0;
  // Boxcar across this many neighbouring scales (odd).
  Index scale_window = 3;
};

struct CoherenceMap {
  Eigen::MatrixXd values;                                   // scales x time, each in [0, 1]
  Eigen::VectorXd scales;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> mask;  // true = inside cone of influence
  Index zero_energy_cells = 0;                              // forced to 0, see wavelet_coherence
};

/// |S(Wx conj(Wy) / s)|^2 / (S(|Wx|^2 / s) S(|Wy|^2 / s)) with S = scale
/// boxcar after Gaussian time smoothing. Cells where either smoothed power
/// vanishes are set to 0 and counted in zero_energy_cells.
CoherenceMap wavelet_coherence(std::span<const double> x, std::span<const double> y,
                               const Eigen::VectorXd& scales, const CoherenceSmoothing& smoothing = {});

// Mean over cells inside the cone of influence. Throws if none are.
double mean_coherence(const CoherenceMap& map);

// Rows = scales, 9 significant digits.
void write_csv(std::ostream& os, const CoherenceMap& map);

}  // namespace sigaug
