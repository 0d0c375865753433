#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sigaug/dataset.hpp"
#include "sigaug/gan.hpp"
#include "sigaug/wavelet.hpp"

namespace sigaug {

// Fresh model whose normalisation and sample rate come from the dataset.
GanModel make_gan(Variant variant, const Dataset& data, const GanHyperParams& hyper, std::uint64_t seed,
                  std::string config_hash = {});

// Runs `epochs` further epochs drawing minibatches and noise from model.rng.
TrainLog train_gan(GanModel& model, const TrainSplit& train, Index epochs,
                   const std::function<void(const TrainLogEntry&)>& progress = {});

// Samples at or above this spindle speed form the high-frequency subset (top half of the levels).
double high_frequency_threshold(std::vector<double> rpm_levels);

struct CoherenceRow {
  std::uint32_t id = 0;
  double rpm = 0.0;
  double ra = 0.0;
  double mean_wc = 0.0;
  bool high_frequency = false;
};

struct CoherenceStudy {
  std::vector<CoherenceRow> rows;
  double aggregate = 0.0;
  double high_frequency_aggregate = 0.0;
  Index clamped_labels = 0;
};

/// One generated signal per test label, compared with the real test signal
/// of that label by mean wavelet coherence inside the cone of influence.
CoherenceStudy coherence_study(GanModel& model, const Dataset& data, const CoherenceSmoothing& smoothing,
                               double high_rpm, Rng& rng);
// Each real test signal against itself; every value should be 1.
CoherenceStudy self_coherence(const Dataset& data, const CoherenceSmoothing& smoothing, double high_rpm);

// id,rpm,ra,mean_wc,high_frequency
void write_coherence_csv(std::ostream& os, const CoherenceStudy& study);

double pearson(std::span<const double> x, std::span<const double> y);
double rms(const Eigen::VectorXd& v);

}  // namespace sigaug
