#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sigaug/dataset.hpp"
#include "sigaug/fft.hpp"

using namespace sigaug;

namespace {

double rms(const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(v.size())); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("sigaug_test_" + name)).string();
}

}  // namespace

TEST_CASE("split sizes and determinism") {
  SurrogateConfig cfg;
  Dataset a = synth_dataset(cfg, 1), b = synth_dataset(cfg, 1), c = synth_dataset(cfg, 2);
  CHECK(a.train.size() == 52);
  CHECK(a.test.size() == 12);
  CHECK(encode_dataset(a) == encode_dataset(b));
  CHECK(encode_dataset(a) != encode_dataset(c));

  auto pa = synth_dataset_with_phases(cfg, 1).phases, pc = synth_dataset_with_phases(cfg, 2).phases;
  CHECK(pa != pc);

  cfg.rpm_levels = {6000};
  cfg.feed_levels = {50, 60};
  CHECK_THROWS_AS(synth_dataset(cfg, 1), ShapeError);
}

TEST_CASE("train and test are disjoint under every seed") {
  SurrogateConfig cfg;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    Dataset d = synth_dataset(cfg, seed);
    std::set<std::uint32_t> train_ids, test_ids;
    for (const auto& s : d.train) train_ids.insert(s.id);
    for (const auto& s : d.test) test_ids.insert(s.id);
    CHECK(train_ids.size() == 52);
    CHECK(test_ids.size() == 12);
    for (auto id : test_ids) CHECK(train_ids.count(id) == 0);
  }
}

TEST_CASE("dominant FFT bin is the spindle frequency") {
  SurrogateConfig cfg;
  auto draw = synth_dataset_with_phases(cfg, 4);
  const double bin_width = cfg.sample_rate / static_cast<double>(cfg.length);
  for (const auto* split : {&draw.dataset.train.samples, &draw.dataset.test.samples}) {
    for (const auto& s : *split) {
      Eigen::VectorXd clean = render_surrogate_signal(s.params, s.ra, draw.phases[s.id], cfg, nullptr);
      auto spec = fft_real<double>(std::span<const double>(clean.data(), clean.size()));
      std::size_t peak = 0;
      for (std::size_t k = 1; k <= spec.size() / 2; ++k)
        if (std::abs(spec[k]) > std::abs(spec[peak])) peak = k;
      CHECK(peak == static_cast<std::size_t>(std::lround(s.params.spindle_rpm / 60.0 / bin_width)));
    }
  }
}

TEST_CASE("normalization") {
  Dataset d = synth_dataset(SurrogateConfig{}, 3);
  double lo = 1e300, hi = -1e300;
  for (const auto& s : d.train) {
    Eigen::VectorXd n = d.norm.normalize(s.signal);
    CHECK((d.norm.denormalize(n) - s.signal).cwiseAbs().maxCoeff() <= 1e-12);
    lo = std::min(lo, n.minCoeff());
    hi = std::max(hi, n.maxCoeff());
    CHECK(d.norm.denormalize_label(d.norm.normalize_label(s.ra)) == doctest::Approx(s.ra).epsilon(1e-12));
  }
  CHECK(lo == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(hi == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.norm.normalize_signal(d.norm.signal_max + 1.0) > 1.0);
  CHECK(d.norm.normalize_label(d.norm.label_max * 2.0) > 1.0);

  TrainSplit flat;
  LabeledSignal s;
  s.signal = Eigen::VectorXd::Constant(64, 3.0);
  s.ra = 0.1;
  flat.samples = {s, s};
  CHECK_THROWS_AS(fit_normalization(flat), ShapeError);
  CHECK_THROWS_AS(fit_normalization(TrainSplit{}), ShapeError);
}

TEST_CASE("dataset files") {
  Dataset d = synth_dataset(SurrogateConfig{}, 6);
  const std::string path = temp_path("roundtrip.sgd");
  save_dataset(d, path);
  Dataset back = load_dataset(path);
  CHECK(encode_dataset(back) == encode_dataset(d));
  CHECK(back.norm == d.norm);
  for (std::size_t i = 0; i < d.test.size(); ++i) CHECK(back.test[i].id == d.test[i].id);
  std::filesystem::remove(path);

  std::string bytes = encode_dataset(d);
  std::string bad = bytes;
  bad[1] = '!';
  CHECK_THROWS_AS(decode_dataset(bad), FormatError);
  CHECK_THROWS_AS(decode_dataset(std::string_view(bytes).substr(0, bytes.size() - 8)), FormatError);
  CHECK_THROWS_AS(load_dataset(temp_path("does_not_exist.sgd")), std::runtime_error);

  std::ostringstream csv;
  export_csv(d, csv);
  std::istringstream in(csv.str());
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 64);
}

TEST_CASE("signal RMS increases with Ra") {
  SurrogateConfig cfg;
  // Same rpm levels and phases for every (feed, depth) cell, so only the gain differs.
  std::map<double, double> rms_by_ra;
  const std::vector<double> phases{0.3, 1.1, 2.0, 4.0, 5.5};
  for (double feed : cfg.feed_levels) {
    for (double depth : cfg.depth_levels) {
      const double ra = cfg.ra_coefficient * feed * feed / (1.0 + depth / cfg.depth_reference);
      double total = 0.0;
      for (double rpm : cfg.rpm_levels)
        total += rms(render_surrogate_signal({rpm, feed, depth}, ra, phases, cfg, nullptr));
      rms_by_ra[ra] = total / static_cast<double>(cfg.rpm_levels.size());
    }
  }
  double prev = -1.0;
  for (auto [ra, r] : rms_by_ra) {
    CHECK(r > prev);
    prev = r;
  }

  // And on a drawn dataset the relation survives label and signal noise.
  Dataset d = synth_dataset(cfg, 8);
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : d.train) pts.emplace_back(s.ra, rms(s.signal));
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += x, my += y;
  mx /= pts.size(), my /= pts.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (auto [x, y] : pts) sxy += (x - mx) * (y - my), sxx += (x - mx) * (x - mx), syy += (y - my) * (y - my);
  CHECK(sxy / std::sqrt(sxx * syy) > 0.95);
}
