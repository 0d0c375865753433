#include "sigaug/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "sigaug/errors.hpp"

namespace sigaug {

TrainSplit augment_dataset(const TrainSplit& real, GanModel& model, Index scale, std::uint64_t seed) {
  if (scale < 0) throw ConfigError("augmentation scale must be >= 0");
  if (real.empty()) throw ShapeError("augment_dataset: empty real split");
  TrainSplit out = real;
  if (scale == 0) return out;
  if (model.epochs_trained == 0) throw ConfigError("augment_dataset: checkpoint is untrained (0 epochs)");

  double lo = real[0].ra, hi = real[0].ra;
  for (const auto& s : real) {
    lo = std::min(lo, s.ra);
    hi = std::max(hi, s.ra);
  }
  Rng rng(seed);
  const auto count = static_cast<std::size_t>(scale) * real.size();
  std::vector<double> labels(count);
  for (auto& y : labels) y = rng.uniform(lo, hi);

  Generation gen = generate_labeled(model, labels, rng);
  for (auto& s : gen.samples) {
    const LabeledSignal* nearest = &real[0];
    for (const auto& r : real) {
      if (std::abs(r.ra - s.ra) < std::abs(nearest->ra - s.ra)) nearest = &r;
    }
    s.params = nearest->params;
    out.samples.push_back(std::move(s));
  }
  return out;
}

void SweepConfig::validate() const {
  if (kinds.empty()) throw ConfigError("sweep.models is empty");
  if (scales.empty()) throw ConfigError("sweep.scales is empty");
  if (seeds.empty()) throw ConfigError("sweep.seeds is empty");
  for (Index k : scales) {
    if (k < 0) throw ConfigError("sweep.scales entries must be >= 0");
  }
  predictor.validate();
}

double median_mape(const SweepReport& report, PredictorKind kind, Index scale) {
  std::vector<double> v;
  for (const auto& r : report.rows) {
    if (r.kind == kind && r.scale == scale) v.push_back(r.mape_percent);
  }
  if (v.empty()) throw ShapeError("median_mape: no rows for the requested kind and scale");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

SweepReport run_sweep(const Dataset& data, GanModel& model, const SweepConfig& config, std::uint64_t master_seed) {
  config.validate();
  SweepReport report;
  for (const auto& s : data.test) report.test_ids.push_back(s.id);
  const std::set<std::uint32_t> test_ids(report.test_ids.begin(), report.test_ids.end());
  Eigen::VectorXd truth(static_cast<Index>(data.test.size()));
  for (std::size_t i = 0; i < data.test.size(); ++i) truth[static_cast<Index>(i)] = data.test[i].ra;

  for (std::uint64_t seed : config.seeds) {
    const std::uint64_t row_seed = derive_seed(master_seed, seed);
    for (Index scale : config.scales) {
      // One augmented set per (seed, scale), shared by all predictor kinds.
      const TrainSplit train = augment_dataset(data.train, model, scale, derive_seed(row_seed, 2 * scale));
      for (const auto& s : train) {
        if (test_ids.count(s.id) != 0) report.leakage_free = false;
      }
      for (PredictorKind kind : config.kinds) {
        SweepRow row{kind, scale, static_cast<Index>(train.size()), seed, 0.0};
        try {
          auto predictor = train_predictor(kind, train, config.predictor,
                                           derive_seed(row_seed, 2 * scale + 1 + 1000 * static_cast<int>(kind)));
          row.mape_percent = mape(truth, predictor->predict(data.test.samples));
        } catch (const std::exception& e) {
          std::ostringstream msg;
          msg << "sweep row kind=" << predictor_name(kind) << " scale=" << scale << " seed=" << seed << ": "
              << e.what();
          if (dynamic_cast<const NumericalError*>(&e)) throw NumericalError(msg.str());
          throw std::runtime_error(msg.str());
        }
        report.rows.push_back(row);
      }
    }
  }

  std::vector<Index> scales = config.scales;
  std::sort(scales.begin(), scales.end());
  scales.erase(std::unique(scales.begin(), scales.end()), scales.end());
  for (PredictorKind kind : config.kinds) {
    std::optional<Index> plateau;
    for (std::size_t i = 1; i < scales.size() && !plateau; ++i) {
      if (median_mape(report, kind, scales[i - 1]) - median_mape(report, kind, scales[i]) < 1.0) plateau = scales[i];
    }
    report.plateau[kind] = plateau;
  }
  return report;
}

void write_sweep_csv(std::ostream& os, const SweepReport& report) {
  os << "kind,scale,train_size,seed,mape_percent\n";
  const auto old = os.precision(6);
  for (const auto& r : report.rows) {
    os << predictor_name(r.kind) << ',' << r.scale << ',' << r.train_size << ',' << r.seed << ','
       << std::defaultfloat << std::setprecision(6) << r.mape_percent << '\n';
  }
  os.precision(old);
}

}  // namespace sigaug
