#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sigaug/rng.hpp"
#include "sigaug/tensor.hpp"

namespace sigaug {

struct MachiningParams {
  double spindle_rpm = 0.0;
  double feed_mm_min = 0.0;
  double depth_um = 0.0;

  bool valid() const { return spindle_rpm > 0.0 && feed_mm_min > 0.0 && depth_um > 0.0; }
  bool operator==(const MachiningParams&) const = default;
};

struct LabeledSignal {
  std::uint32_t id = 0;
  Eigen::VectorXd signal;   // force, N
  MachiningParams params;
  double ra = 0.0;          // surface roughness, um
  double sample_rate = 0.0; // Hz
  bool generated = false;
};

// Membership of a sample list is part of its type: functions that fit a model
// take a TrainSplit and nothing converts a TestSplit into one.
template <typename Tag>
struct Split {
  std::vector<LabeledSignal> samples;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  auto begin() const { return samples.begin(); }
  auto end() const { return samples.end(); }
  const LabeledSignal& operator[](std::size_t i) const { return samples[i]; }
};
using TrainSplit = Split<struct TrainTag>;
using TestSplit = Split<struct TestTag>;

// Generated samples carry ids at or above this offset.
inline constexpr std::uint32_t kGeneratedIdBase = 1u << 24;

/// Train-set affine maps: signals to [-1, 1] using the global min/max over all
/// training samples, labels to [0, 1].
struct NormalizationRecord {
  double signal_min = 0.0, signal_max = 1.0;
  double label_min = 0.0, label_max = 1.0;

  double normalize_signal(double v) const { return 2.0 * (v - signal_min) / (signal_max - signal_min) - 1.0; }
  double denormalize_signal(double v) const { return (v + 1.0) * 0.5 * (signal_max - signal_min) + signal_min; }
  double normalize_label(double ra) const { return (ra - label_min) / (label_max - label_min); }
  double denormalize_label(double y) const { return y * (label_max - label_min) + label_min; }

  Eigen::VectorXd normalize(const Eigen::VectorXd& s) const;
  Eigen::VectorXd denormalize(const Eigen::VectorXd& s) const;
  bool operator==(const NormalizationRecord&) const = default;
};

// Throws ShapeError on an empty split or a degenerate (min == max) range.
NormalizationRecord fit_normalization(const TrainSplit& train);

struct Dataset {
  TrainSplit train;
  TestSplit test;
  NormalizationRecord norm;
  Index length = 0;
  double sample_rate = 0.0;
};

struct SurrogateConfig {
  Index length = 1024;
  double sample_rate = 8192.0;
  std::vector<double> rpm_levels{5760.0, 6240.0, 6720.0, 7200.0};
  std::vector<double> feed_levels{40.0, 60.0, 80.0, 100.0};
  std::vector<double> depth_levels{2.0, 4.0, 6.0, 8.0};
  Index train_count = 52;
  Index test_count = 12;
  // Ra = ra_coefficient * feed^2 / (1 + depth / depth_reference) * (1 + label_noise * N(0,1))
  double ra_coefficient = 1e-5;
  double depth_reference = 10.0;
  double label_noise = 0.05;
  // g(Ra) = amplitude * (gain_floor + Ra / ra_reference)
  double amplitude = 1.0;
  double gain_floor = 0.2;
  double ra_reference = 0.05;
  Index harmonics = 5;
  double harmonic_decay = 0.5;
  double noise_ratio = 0.05;  // sigma(Ra) = noise_ratio * g(Ra)

  void validate() const;
};

double surrogate_gain(double ra, const SurrogateConfig& config);

/// sum_h amplitude-weighted harmonics of the spindle frequency with the given
/// phases, plus white noise when `noise` is non-null.
Eigen::VectorXd render_surrogate_signal(const MachiningParams& params, double ra, std::span<const double> phases,
                                        const SurrogateConfig& config, Rng* noise);

struct SurrogateDraw {
  Dataset dataset;
  std::vector<std::vector<double>> phases;  // indexed by sample id
};

SurrogateDraw synth_dataset_with_phases(const SurrogateConfig& config, std::uint64_t seed);
Dataset synth_dataset(const SurrogateConfig& config, std::uint64_t seed);

// Row-per-sample signal matrix, normalised with `record`.
template <typename Samples>
SignalBatch normalized_signals(const Samples& samples, const NormalizationRecord& record) {
  SignalBatch out(static_cast<Index>(samples.size()), samples.size() ? samples.begin()->signal.size() : 0);
  Index i = 0;
  for (const auto& s : samples) out.row(i++) = record.normalize(s.signal).transpose();
  return out;
}

template <typename Samples>
Eigen::VectorXd normalized_labels(const Samples& samples, const NormalizationRecord& record) {
  Eigen::VectorXd out(static_cast<Index>(samples.size()));
  Index i = 0;
  for (const auto& s : samples) out[i++] = record.normalize_label(s.ra);
  return out;
}

std::string encode_dataset(const Dataset& ds);
Dataset decode_dataset(std::string_view bytes);
void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

// id, split, rpm, feed, depth, ra, then one column per signal sample.
void export_csv(const Dataset& ds, std::ostream& os);

}  // namespace sigaug
