#pragma once

#include <iosfwd>
#include <span>
#include <string_view>

#include "sigaug/tensor.hpp"

namespace sigaug {

enum class WindowKind { rectangular, hann };

std::string_view window_name(WindowKind w);
WindowKind parse_window(std::string_view name);

struct StftSpec {
  Index window = 64;
  Index hop = 32;
  WindowKind window_kind = WindowKind::hann;

  // Requires 1 <= hop <= window <= signal_length and a power-of-two window.
  void validate(Index signal_length) const;
  bool operator==(const StftSpec&) const = default;
  Index frames(Index signal_length) const { return (signal_length - window) / hop + 1; }
  Index bins() const { return window / 2 + 1; }
};

// Periodic Hann (0.5 - 0.5 cos(2 pi n / W)) or all ones.
Eigen::VectorXd window_coefficients(const StftSpec& spec);

struct Spectrogram {
  Eigen::MatrixXd magnitudes;  // frames x bins, all >= 0
  Index frames() const { return magnitudes.rows(); }
  Index bins() const { return magnitudes.cols(); }
};

Spectrogram stft_magnitude(std::span<const double> signal, const StftSpec& spec);

/// (1/M)(1/T) sum_i || |STFT(real_i)| - |STFT(gen_i)| ||_F^2 over row pairs.
double spectral_loss(const SignalBatch& real, const SignalBatch& generated, const StftSpec& spec);

struct SpectralLossGrad {
  double value = 0.0;
  SignalBatch grad;  // d loss / d generated
};

// Value plus exact gradient w.r.t. the generated batch. Bins where the
// generated magnitude is exactly zero contribute a zero subgradient.
SpectralLossGrad spectral_loss_with_grad(const SignalBatch& real, const SignalBatch& generated,
                                         const StftSpec& spec);

// Rows = frames, 9 significant digits.
void write_csv(std::ostream& os, const Spectrogram& s);

}  // namespace sigaug
