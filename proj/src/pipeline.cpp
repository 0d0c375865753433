#include "sigaug/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "sigaug/errors.hpp"

namespace sigaug {

GanModel make_gan(Variant variant, const Dataset& data, const GanHyperParams& hyper, std::uint64_t seed,
                  std::string config_hash) {
  GanModel model(variant, data.length, hyper, seed);
  model.norm = data.norm;
  model.sample_rate = data.sample_rate;
  model.config_hash = std::move(config_hash);
  return model;
}

TrainLog train_gan(GanModel& model, const TrainSplit& train, Index epochs,
                   const std::function<void(const TrainLogEntry&)>& progress) {
  const TrainingData data = make_training_data(train, model.norm, model.hyper.class_bins);
  TrainLog log;
  for (Index e = 0; e < epochs; ++e) {
    log.push_back(train_epoch(model, data, model.rng));
    if (progress) progress(log.back());
  }
  return log;
}

double high_frequency_threshold(std::vector<double> rpm_levels) {
  if (rpm_levels.empty()) throw ConfigError("no spindle speed levels configured");
  std::sort(rpm_levels.begin(), rpm_levels.end());
  rpm_levels.erase(std::unique(rpm_levels.begin(), rpm_levels.end()), rpm_levels.end());
  return rpm_levels[rpm_levels.size() / 2];
}

namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

void summarize(CoherenceStudy& study) {
  double all = 0.0, high = 0.0;
  Index high_count = 0;
  for (const auto& r : study.rows) {
    all += r.mean_wc;
    if (r.high_frequency) {
      high += r.mean_wc;
      ++high_count;
    }
  }
  study.aggregate = study.rows.empty() ? 0.0 : all / static_cast<double>(study.rows.size());
  study.high_frequency_aggregate = high_count ? high / static_cast<double>(high_count) : 0.0;
}

}  // namespace

CoherenceStudy coherence_study(GanModel& model, const Dataset& data, const CoherenceSmoothing& smoothing,
                               double high_rpm, Rng& rng) {
  if (data.test.empty()) throw ShapeError("coherence: dataset has no test samples");
  if (model.signal_length != data.length) throw ShapeError("coherence: checkpoint and dataset lengths differ");
  std::vector<double> labels;
  for (const auto& s : data.test) labels.push_back(s.ra);
  const Generation gen = generate_labeled(model, labels, rng);
  const Eigen::VectorXd scales = default_scales(data.length);
  CoherenceStudy study;
  study.clamped_labels = gen.clamped_labels;
  for (std::size_t i = 0; i < data.test.size(); ++i) {
    const auto& real = data.test[i];
    const CoherenceMap map =
        wavelet_coherence(as_span(gen.samples[i].signal), as_span(real.signal), scales, smoothing);
    study.rows.push_back({real.id, real.params.spindle_rpm, real.ra, mean_coherence(map),
                          real.params.spindle_rpm >= high_rpm});
  }
  summarize(study);
  return study;
}

CoherenceStudy self_coherence(const Dataset& data, const CoherenceSmoothing& smoothing, double high_rpm) {
  const Eigen::VectorXd scales = default_scales(data.length);
  CoherenceStudy study;
  for (const auto& real : data.test) {
    const CoherenceMap map = wavelet_coherence(as_span(real.signal), as_span(real.signal), scales, smoothing);
    study.rows.push_back({real.id, real.params.spindle_rpm, real.ra, mean_coherence(map),
                          real.params.spindle_rpm >= high_rpm});
  }
  summarize(study);
  return study;
}

void write_coherence_csv(std::ostream& os, const CoherenceStudy& study) {
  os << "id,rpm,ra,mean_wc,high_frequency\n" << std::setprecision(9);
  for (const auto& r : study.rows) {
    os << r.id << ',' << r.rpm << ',' << r.ra << ',' << r.mean_wc << ',' << (r.high_frequency ? 1 : 0) << '\n';
  }
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ShapeError("pearson: need two equal-length series of >= 2 values");
  const Eigen::Map<const Eigen::ArrayXd> a(x.data(), static_cast<Index>(x.size()));
  const Eigen::Map<const Eigen::ArrayXd> b(y.data(), static_cast<Index>(y.size()));
  const Eigen::ArrayXd da = a - a.mean(), db = b - b.mean();
  const double denom = std::sqrt(da.square().sum() * db.square().sum());
  if (denom == 0.0) throw std::domain_error("pearson: a series has zero variance");
  return (da * db).sum() / denom;
}

double rms(const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

}  // namespace sigaug
