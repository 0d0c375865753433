#include "sigaug/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "sigaug/binary_io.hpp"

namespace sigaug {

Eigen::VectorXd NormalizationRecord::normalize(const Eigen::VectorXd& s) const {
  return s.unaryExpr([this](double v) { return normalize_signal(v); });
}

Eigen::VectorXd NormalizationRecord::denormalize(const Eigen::VectorXd& s) const {
  return s.unaryExpr([this](double v) { return denormalize_signal(v); });
}

NormalizationRecord fit_normalization(const TrainSplit& train) {
  if (train.empty()) throw ShapeError("cannot fit normalization on an empty training split");
  NormalizationRecord r;
  r.signal_min = r.label_min = std::numeric_limits<double>::infinity();
  r.signal_max = r.label_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : train) {
    r.signal_min = std::min(r.signal_min, s.signal.minCoeff());
    r.signal_max = std::max(r.signal_max, s.signal.maxCoeff());
    r.label_min = std::min(r.label_min, s.ra);
    r.label_max = std::max(r.label_max, s.ra);
  }
  if (!(r.signal_max > r.signal_min)) throw ShapeError("degenerate signal range: min == max");
  if (!(r.label_max > r.label_min)) throw ShapeError("degenerate label range: min == max");
  return r;
}

void SurrogateConfig::validate() const {
  const auto positive = [](const std::vector<double>& v) {
    return !v.empty() && std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
  };
  if (length < 64 || sample_rate <= 0.0) throw ShapeError("surrogate: need length >= 64 and sample_rate > 0");
  if (!positive(rpm_levels) || !positive(feed_levels) || !positive(depth_levels)) {
    throw ShapeError("surrogate: machining parameter levels must be non-empty and strictly positive");
  }
  if (train_count < 1 || test_count < 1) throw ShapeError("surrogate: train and test counts must be >= 1");
  const auto grid = rpm_levels.size() * feed_levels.size() * depth_levels.size();
  if (grid < static_cast<std::size_t>(train_count + test_count)) {
    std::ostringstream os;
    os << "surrogate: parameter grid has " << grid << " distinct points, fewer than the "
       << train_count + test_count << " samples requested";
    throw ShapeError(os.str());
  }
  const double top = *std::max_element(rpm_levels.begin(), rpm_levels.end()) / 60.0 * static_cast<double>(harmonics);
  if (top >= sample_rate / 2.0) throw ShapeError("surrogate: highest harmonic is above Nyquist");
  if (harmonics < 1 || harmonic_decay <= 0.0 || amplitude <= 0.0 || ra_reference <= 0.0 || gain_floor < 0.0) {
    throw ShapeError("surrogate: invalid amplitude model");
  }
}

double surrogate_gain(double ra, const SurrogateConfig& c) { return c.amplitude * (c.gain_floor + ra / c.ra_reference); }

Eigen::VectorXd render_surrogate_signal(const MachiningParams& params, double ra, std::span<const double> phases,
                                        const SurrogateConfig& c, Rng* noise) {
  const double f = params.spindle_rpm / 60.0;
  const double gain = surrogate_gain(ra, c);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(c.length);
  for (Index h = 1; h <= c.harmonics; ++h) {
    const double a = std::pow(c.harmonic_decay, static_cast<double>(h - 1)) * gain;
    const double w = 2.0 * std::numbers::pi * static_cast<double>(h) * f / c.sample_rate;
    for (Index n = 0; n < c.length; ++n) x[n] += a * std::sin(w * static_cast<double>(n) + phases[h - 1]);
  }
  if (noise) {
    const double sigma = c.noise_ratio * gain;
    for (Index n = 0; n < c.length; ++n) x[n] += sigma * noise->normal();
  }
  return x;
}

SurrogateDraw synth_dataset_with_phases(const SurrogateConfig& c, std::uint64_t seed) {
  c.validate();
  Rng rng(seed);

  std::vector<MachiningParams> grid;
  for (double rpm : c.rpm_levels)
    for (double feed : c.feed_levels)
      for (double depth : c.depth_levels) grid.push_back({rpm, feed, depth});
  rng.shuffle(std::span(grid));
  const auto total = static_cast<std::size_t>(c.train_count + c.test_count);
  grid.resize(total);
  // Keep the first draw order stable by parameters so ids are meaningful.
  std::sort(grid.begin(), grid.end(), [](const auto& a, const auto& b) {
    return std::tie(a.spindle_rpm, a.feed_mm_min, a.depth_um) < std::tie(b.spindle_rpm, b.feed_mm_min, b.depth_um);
  });

  SurrogateDraw draw;
  std::vector<LabeledSignal> all;
  for (std::size_t i = 0; i < total; ++i) {
    const auto& p = grid[i];
    const double factor = std::max(0.5, 1.0 + c.label_noise * rng.normal());
    const double ra = c.ra_coefficient * p.feed_mm_min * p.feed_mm_min / (1.0 + p.depth_um / c.depth_reference) * factor;
    std::vector<double> phases(static_cast<std::size_t>(c.harmonics));
    for (auto& ph : phases) ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
    LabeledSignal s;
    s.id = static_cast<std::uint32_t>(i);
    s.params = p;
    s.ra = ra;
    s.sample_rate = c.sample_rate;
    s.signal = render_surrogate_signal(p, ra, phases, c, &rng);
    all.push_back(std::move(s));
    draw.phases.push_back(std::move(phases));
  }

  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  rng.shuffle(std::span(order));
  Dataset& ds = draw.dataset;
  ds.length = c.length;
  ds.sample_rate = c.sample_rate;
  for (std::size_t i = 0; i < total; ++i) {
    auto& s = all[order[i]];
    if (i < static_cast<std::size_t>(c.train_count)) {
      ds.train.samples.push_back(std::move(s));
    } else {
      ds.test.samples.push_back(std::move(s));
    }
  }
  ds.norm = fit_normalization(ds.train);
  return draw;
}

Dataset synth_dataset(const SurrogateConfig& config, std::uint64_t seed) {
  return std::move(synth_dataset_with_phases(config, seed).dataset);
}

namespace {

constexpr std::string_view kDatasetMagic = "SGD1";
constexpr std::uint32_t kDatasetVersion = 1;

void write_samples(ByteWriter& w, const std::vector<LabeledSignal>& samples) {
  for (const auto& s : samples) {
    w.u32(s.id);
    w.u8(s.generated ? 1 : 0);
    w.f64(s.params.spindle_rpm);
    w.f64(s.params.feed_mm_min);
    w.f64(s.params.depth_um);
    w.f64(s.ra);
    for (Index n = 0; n < s.signal.size(); ++n) w.f64(s.signal[n]);
  }
}

void read_samples(ByteReader& r, std::uint32_t count, Index length, double rate, std::vector<LabeledSignal>& out) {
  for (std::uint32_t i = 0; i < count; ++i) {
    LabeledSignal s;
    s.id = r.u32();
    const auto flag = r.u8();
    if (flag > 1) throw FormatError("dataset: invalid generated flag on sample " + std::to_string(s.id));
    s.generated = flag == 1;
    s.params.spindle_rpm = r.f64();
    s.params.feed_mm_min = r.f64();
    s.params.depth_um = r.f64();
    s.ra = r.f64();
    s.sample_rate = rate;
    s.signal.resize(length);
    for (Index n = 0; n < length; ++n) s.signal[n] = r.f64();
    if (!s.params.valid() || !(s.ra > 0.0) || !s.signal.allFinite()) {
      throw FormatError("dataset: sample " + std::to_string(s.id) + " has non-positive parameters/label or non-finite values");
    }
    out.push_back(std::move(s));
  }
}

}  // namespace

std::string encode_dataset(const Dataset& ds) {
  ByteWriter w;
  w.bytes(kDatasetMagic);
  w.u32(kDatasetVersion);
  w.u32(static_cast<std::uint32_t>(ds.train.size()));
  w.u32(static_cast<std::uint32_t>(ds.test.size()));
  w.u32(static_cast<std::uint32_t>(ds.length));
  w.f64(ds.sample_rate);
  w.f64(ds.norm.signal_min);
  w.f64(ds.norm.signal_max);
  w.f64(ds.norm.label_min);
  w.f64(ds.norm.label_max);
  for (const auto* split : {&ds.train.samples, &ds.test.samples}) {
    for (const auto& s : *split) {
      if (s.signal.size() != ds.length) {
        throw ShapeError("dataset: sample " + std::to_string(s.id) + " has length " + std::to_string(s.signal.size()) +
                         ", expected " + std::to_string(ds.length));
      }
    }
  }
  write_samples(w, ds.train.samples);
  write_samples(w, ds.test.samples);
  return w.data();
}

Dataset decode_dataset(std::string_view bytes) {
  ByteReader r(bytes, "dataset");
  const auto magic = r.bytes(4);
  if (magic != kDatasetMagic) throw FormatError("dataset: bad magic '" + std::string(magic) + "', expected SGD1");
  const auto version = r.u32();
  if (version != kDatasetVersion) {
    throw FormatError("dataset: unsupported version " + std::to_string(version));
  }
  Dataset ds;
  const auto n_train = r.u32(), n_test = r.u32();
  ds.length = r.u32();
  ds.sample_rate = r.f64();
  if (ds.length < 1 || !(ds.sample_rate > 0.0)) throw FormatError("dataset: invalid length or sample rate in header");
  ds.norm.signal_min = r.f64();
  ds.norm.signal_max = r.f64();
  ds.norm.label_min = r.f64();
  ds.norm.label_max = r.f64();
  const std::size_t per_sample = 4 + 1 + 8 * 4 + 8 * static_cast<std::size_t>(ds.length);
  if (bytes.size() - r.position() != per_sample * (static_cast<std::size_t>(n_train) + n_test)) {
    throw FormatError("dataset: payload size does not match header counts (" + std::to_string(n_train) + " train, " +
                      std::to_string(n_test) + " test, L=" + std::to_string(ds.length) + ")");
  }
  read_samples(r, n_train, ds.length, ds.sample_rate, ds.train.samples);
  read_samples(r, n_test, ds.length, ds.sample_rate, ds.test.samples);
  return ds;
}

void save_dataset(const Dataset& ds, const std::string& path) { write_file(path, encode_dataset(ds)); }

Dataset load_dataset(const std::string& path) { return decode_dataset(read_file(path)); }

void export_csv(const Dataset& ds, std::ostream& os) {
  const auto prec = os.precision();
  os << std::setprecision(17);
  os << "id,split,rpm,feed,depth,ra";
  for (Index n = 0; n < ds.length; ++n) os << ",s" << n;
  os << '\n';
  const auto rows = [&](const std::vector<LabeledSignal>& samples, const char* split) {
    for (const auto& s : samples) {
      os << s.id << ',' << split << ',' << s.params.spindle_rpm << ',' << s.params.feed_mm_min << ','
         << s.params.depth_um << ',' << s.ra;
      for (Index n = 0; n < s.signal.size(); ++n) os << ',' << s.signal[n];
      os << '\n';
    }
  };
  rows(ds.train.samples, "train");
  rows(ds.test.samples, "test");
  os.precision(prec);
}

}  // namespace sigaug
