#include "sigaug/stft.hpp"

#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <vector>

#include "sigaug/fft.hpp"

namespace sigaug {

std::string_view window_name(WindowKind w) { return w == WindowKind::hann ? "hann" : "rectangular"; }

WindowKind parse_window(std::string_view name) {
  if (name == "hann") return WindowKind::hann;
  if (name == "rectangular") return WindowKind::rectangular;
  throw std::invalid_argument("unknown window '" + std::string(name) + "'");
}

void StftSpec::validate(Index signal_length) const {
  if (hop < 1 || window < hop || window > signal_length) {
    std::ostringstream os;
    os << "stft: need 1 <= hop <= window <= length, got hop=" << hop << " window=" << window
       << " length=" << signal_length;
    throw ShapeError(os.str());
  }
  if (!is_power_of_two(static_cast<std::size_t>(window))) {
    throw ShapeError("stft window " + std::to_string(window) + " is not a power of two");
  }
}

Eigen::VectorXd window_coefficients(const StftSpec& spec) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(spec.window);
  if (spec.window_kind == WindowKind::hann) {
    for (Index n = 0; n < spec.window; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / static_cast<double>(spec.window));
    }
  }
  return w;
}

namespace {

void frame_spectrum(std::span<const double> x, Index start, const Eigen::VectorXd& win,
                    std::vector<std::complex<double>>& buf) {
  const Index w = win.size();
  buf.assign(static_cast<std::size_t>(w), {});
  for (Index n = 0; n < w; ++n) buf[n] = win[n] * x[start + n];
  fft_inplace<double>(buf);
}

}  // namespace

Spectrogram stft_magnitude(std::span<const double> signal, const StftSpec& spec) {
  const auto len = static_cast<Index>(signal.size());
  spec.validate(len);
  const Index frames = spec.frames(len), bins = spec.bins();
  const Eigen::VectorXd win = window_coefficients(spec);
  Spectrogram s;
  s.magnitudes.resize(frames, bins);
  std::vector<std::complex<double>> buf;
  for (Index t = 0; t < frames; ++t) {
    frame_spectrum(signal, t * spec.hop, win, buf);
    for (Index k = 0; k < bins; ++k) s.magnitudes(t, k) = std::abs(buf[k]);
  }
  return s;
}

namespace {

void require_same_shape(const SignalBatch& a, const SignalBatch& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    std::ostringstream os;
    os << "spectral loss: real batch " << a.rows() << "x" << a.cols() << " vs generated batch " << b.rows()
       << "x" << b.cols();
    throw ShapeError(os.str());
  }
  if (a.rows() == 0) throw ShapeError("spectral loss: empty batch");
}

}  // namespace

double spectral_loss(const SignalBatch& real, const SignalBatch& generated, const StftSpec& spec) {
  require_same_shape(real, generated);
  double total = 0.0;
  Index frames = 0;
  for (Index i = 0; i < real.rows(); ++i) {
    const Eigen::VectorXd r = real.row(i).transpose();
    const Eigen::VectorXd g = generated.row(i).transpose();
    const Spectrogram sr = stft_magnitude({r.data(), static_cast<std::size_t>(r.size())}, spec);
    const Spectrogram sg = stft_magnitude({g.data(), static_cast<std::size_t>(g.size())}, spec);
    total += (sr.magnitudes - sg.magnitudes).squaredNorm();
    frames = sr.frames();
  }
  return total / (static_cast<double>(real.rows()) * static_cast<double>(frames));
}

SpectralLossGrad spectral_loss_with_grad(const SignalBatch& real, const SignalBatch& generated,
                                         const StftSpec& spec) {
  require_same_shape(real, generated);
  const Index batch = real.rows(), len = real.cols();
  spec.validate(len);
  const Index frames = spec.frames(len), bins = spec.bins(), w = spec.window;
  const Eigen::VectorXd win = window_coefficients(spec);
  const double scale = 1.0 / (static_cast<double>(batch) * static_cast<double>(frames));

  SpectralLossGrad out;
  out.grad = SignalBatch::Zero(batch, len);
  std::vector<std::complex<double>> xr, xg, u(static_cast<std::size_t>(w));
  for (Index i = 0; i < batch; ++i) {
    const Eigen::VectorXd r = real.row(i).transpose();
    const Eigen::VectorXd g = generated.row(i).transpose();
    const std::span<const double> rs{r.data(), static_cast<std::size_t>(len)};
    const std::span<const double> gs{g.data(), static_cast<std::size_t>(len)};
    for (Index t = 0; t < frames; ++t) {
      frame_spectrum(rs, t * spec.hop, win, xr);
      frame_spectrum(gs, t * spec.hop, win, xg);
      std::fill(u.begin(), u.end(), std::complex<double>{});
      for (Index k = 0; k < bins; ++k) {
        const double mg = std::abs(xg[k]);
        const double diff = mg - std::abs(xr[k]);
        out.value += scale * diff * diff;
        if (mg > 0.0) u[k] = (2.0 * scale * diff / mg) * std::conj(xg[k]);
      }
      // Re(sum_k u_k e^{-2 pi i k n / W}) is d loss / d (windowed sample n).
      fft_inplace<double>(u);
      for (Index n = 0; n < w; ++n) out.grad(i, t * spec.hop + n) += win[n] * u[n].real();
    }
  }
  return out;
}

void write_csv(std::ostream& os, const Spectrogram& s) {
  const auto flags = os.flags();
  const auto prec = os.precision();
  os << std::setprecision(9);
  for (Index t = 0; t < s.frames(); ++t) {
    for (Index k = 0; k < s.bins(); ++k) {
      if (k) os << ',';
      os << s.magnitudes(t, k);
    }
    os << '\n';
  }
  os.flags(flags);
  os.precision(prec);
}

}  // namespace sigaug
