#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sigaug/gan.hpp"
#include "sigaug/predictors.hpp"

namespace sigaug {

/// Real training split plus k * |real| generated samples. Generated labels
/// are uniform over the real label range; their machining parameters are
/// copied from the real sample with the nearest label. Throws ConfigError for
/// a checkpoint that was never trained.
TrainSplit augment_dataset(const TrainSplit& real, GanModel& model, Index scale, std::uint64_t seed);

struct SweepConfig {
  std::vector<PredictorKind> kinds{PredictorKind::ridge, PredictorKind::mlp, PredictorKind::cnn1d};
  std::vector<Index> scales{0, 5, 7, 10, 15, 20};
  std::vector<std::uint64_t> seeds{0, 1, 2};
  PredictorConfig predictor;

  void validate() const;
};

struct SweepRow {
  PredictorKind kind = PredictorKind::ridge;
  Index scale = 0;
  Index train_size = 0;
  std::uint64_t seed = 0;
  double mape_percent = 0.0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
  // First scale whose median MAPE improves on the previous scale by less than one point.
  std::map<PredictorKind, std::optional<Index>> plateau;
  bool leakage_free = true;
  std::vector<std::uint32_t> test_ids;
};

// Median over seeds of the rows for one (kind, scale).
double median_mape(const SweepReport& report, PredictorKind kind, Index scale);

SweepReport run_sweep(const Dataset& data, GanModel& model, const SweepConfig& config, std::uint64_t master_seed);

// kind,scale,train_size,seed,mape_percent
void write_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace sigaug
