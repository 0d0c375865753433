#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "sigaug/features.hpp"
#include "sigaug/gan.hpp"
#include "sigaug/predictors.hpp"
#include "sigaug/sweep.hpp"

using namespace sigaug;

namespace {

struct TrainedSetup {
  Dataset data;
  GanModel model;
  TrainedSetup() : data(make_data()), model(Variant::has_cgan, data.length, hyper(), 4) {
    model.norm = data.norm;
    model.sample_rate = data.sample_rate;
    auto train = make_training_data(data.train, data.norm, model.hyper.class_bins);
    Rng rng(1);
    train_epoch(model, train, rng);
    model.epochs_trained = 1;
  }
  static Dataset make_data() {
    SurrogateConfig cfg;
    cfg.length = 256;
    return synth_dataset(cfg, 2);
  }
  static GanHyperParams hyper() {
    GanHyperParams h;
    h.stft = StftSpec{64, 32, WindowKind::hann};
    return h;
  }
};

}  // namespace

TEST_CASE("features of simple signals") {
  std::vector<double> c(256, -2.5);
  auto fc = extract_features(c, 1000.0);
  CHECK(fc.mean == -2.5);
  CHECK(fc.stddev == 0.0);
  CHECK(fc.rms == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(fc.peak_to_peak == 0.0);
  CHECK(fc.skewness == 0.0);
  CHECK(fc.kurtosis == 0.0);
  CHECK(fc.degenerate);

  std::vector<double> s(1024);
  for (int n = 0; n < 1024; ++n) s[n] = std::sin(2.0 * std::numbers::pi * n / 64.0);
  auto fs = extract_features(s, 1024.0);
  CHECK(std::abs(fs.rms - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(std::abs(fs.crest_factor - std::sqrt(2.0)) <= 1e-12);
  CHECK(fs.spectral_centroid == doctest::Approx(16.0).epsilon(1e-6));
  CHECK_FALSE(fs.degenerate);

  double total = 0.0;
  for (double b : fs.band_energy) total += b;
  CHECK(std::abs(total - 1.0) <= 1e-12);

  std::vector<double> shifted(s);
  for (auto& v : shifted) v += 7.0;
  auto ft = extract_features(shifted, 1024.0);
  CHECK(ft.mean == doctest::Approx(fs.mean + 7.0).epsilon(1e-12));
  CHECK(ft.stddev == doctest::Approx(fs.stddev).epsilon(1e-12));
  CHECK(ft.peak_to_peak == doctest::Approx(fs.peak_to_peak).epsilon(1e-12));

  CHECK_THROWS(extract_features(std::vector<double>(32, 1.0), 100.0));
  CHECK(fs.to_vector().size() == FeatureVector::kSize);
}

TEST_CASE("gaussian kurtosis is near 3") {
  double sum = 0.0;
  for (int seed = 0; seed < 20; ++seed) {
    Rng rng(500 + seed);
    std::vector<double> x(4096);
    for (auto& v : x) v = rng.normal();
    const double k = extract_features(x, 1.0).kurtosis;
    CHECK(std::abs(k - 3.0) <= 0.3);
    sum += k;
  }
  CHECK(std::abs(sum / 20.0 - 3.0) <= 0.1);
}

TEST_CASE("mape") {
  const std::vector<double> t{100}, p{110};
  CHECK(std::abs(mape(t, p) - 10.0) <= 1e-12);
  const std::vector<double> t2{2, 4}, p2{1, 5};
  CHECK(std::abs(mape(t2, p2) - 37.5) <= 1e-12);
  CHECK(mape(t2, t2) == 0.0);

  Rng rng(3);
  Eigen::VectorXd truth(30), pred(30), doubled(30);
  for (Index i = 0; i < 30; ++i) {
    truth[i] = rng.uniform(0.5, 3.0);
    const double err = rng.normal();
    pred[i] = truth[i] + err;
    doubled[i] = truth[i] + 2.0 * err;
  }
  CHECK(std::abs(mape(truth, doubled) - 2.0 * mape(truth, pred)) <= 1e-12);

  CHECK_THROWS_AS(mape(std::vector<double>{}, std::vector<double>{}), ShapeError);
  CHECK_THROWS_AS(mape(t2, p), ShapeError);
  CHECK_THROWS_AS(mape(std::vector<double>{0.0}, std::vector<double>{1.0}), std::domain_error);
}

TEST_CASE("ridge regression") {
  Rng rng(10);
  const Index n = 40, d = 5;
  Eigen::MatrixXd x(n, d);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal() * (1.0 + static_cast<double>(i % d));
  Eigen::VectorXd beta(d);
  beta << 1.5, -2.0, 0.25, 3.0, -0.75;
  Eigen::VectorXd y = (x * beta).array() + 4.0;

  auto exact = RidgeModel::fit(x, y, 1e-14);
  CHECK((exact.coefficients() - beta).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(std::abs(exact.intercept() - 4.0) < 1e-6);

  Eigen::VectorXd noisy = y + 0.3 * Eigen::VectorXd::NullaryExpr(n, [&] { return rng.normal(); });
  auto once = RidgeModel::fit(x, noisy, 0.7);
  Eigen::MatrixXd x2(2 * n, d);
  x2 << x, x;
  Eigen::VectorXd y2(2 * n);
  y2 << noisy, noisy;
  auto twice = RidgeModel::fit(x2, y2, 0.7);
  Eigen::MatrixXd probe = Eigen::MatrixXd::Random(7, d);
  CHECK((once.predict(probe) - twice.predict(probe)).cwiseAbs().maxCoeff() < 1e-9);

  Eigen::MatrixXd collinear(n, 3);
  collinear.col(0) = x.col(0);
  collinear.col(1) = 2.0 * x.col(0);
  collinear.col(2) = x.col(1);
  try {
    RidgeModel::fit(collinear, y, 0.0);
    FAIL("expected NumericalError");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("lambda") != std::string::npos);
  }
  CHECK_NOTHROW(RidgeModel::fit(collinear, y, 1.0));
}

TEST_CASE("mlp fits a constant label") {
  Dataset d = TrainedSetup::make_data();
  TrainSplit train = d.train;
  for (auto& s : train.samples) s.ra = 0.042;
  PredictorConfig cfg;
  cfg.epochs = 200;
  auto mlp = train_predictor(PredictorKind::mlp, train, cfg, 1);
  Eigen::VectorXd pred = mlp->predict(train.samples);
  CHECK(mape(Eigen::VectorXd::Constant(pred.size(), 0.042), pred) < 1.0);
}

TEST_CASE("predictors are deterministic") {
  Dataset d = TrainedSetup::make_data();
  PredictorConfig cfg;
  cfg.epochs = 5;
  for (auto kind : {PredictorKind::ridge, PredictorKind::mlp, PredictorKind::cnn1d}) {
    auto a = train_predictor(kind, d.train, cfg, 9), b = train_predictor(kind, d.train, cfg, 9);
    CHECK(a->predict(d.test.samples) == b->predict(d.test.samples));
    CHECK(a->kind() == kind);
    CHECK(parse_predictor(predictor_name(kind)) == kind);
  }
  CHECK_THROWS_AS(parse_predictor("svr"), ConfigError);
}

TEST_CASE("augmentation and sweep") {
  TrainedSetup s;
  CHECK(augment_dataset(s.data.train, s.model, 10, 1).size() == 572);
  CHECK(augment_dataset(s.data.train, s.model, 20, 1).size() == 1092);
  auto same = augment_dataset(s.data.train, s.model, 0, 1);
  REQUIRE(same.size() == 52);
  for (std::size_t i = 0; i < 52; ++i) {
    CHECK(same[i].id == s.data.train[i].id);
    CHECK(same[i].signal == s.data.train[i].signal);
  }
  auto aug = augment_dataset(s.data.train, s.model, 2, 5);
  double lo = 1e300, hi = -1e300;
  for (const auto& x : s.data.train) lo = std::min(lo, x.ra), hi = std::max(hi, x.ra);
  for (std::size_t i = 52; i < aug.size(); ++i) {
    CHECK(aug[i].generated);
    CHECK(aug[i].ra >= lo);
    CHECK(aug[i].ra <= hi);
    CHECK(aug[i].params.valid());
  }
  CHECK_THROWS_AS(augment_dataset(s.data.train, s.model, -1, 1), ConfigError);

  GanModel untrained(Variant::has_cgan, s.data.length, TrainedSetup::hyper(), 4);
  untrained.norm = s.data.norm;
  CHECK_THROWS_AS(augment_dataset(s.data.train, untrained, 5, 1), ConfigError);

  SweepConfig cfg;
  cfg.kinds = {PredictorKind::ridge, PredictorKind::mlp};
  cfg.scales = {0, 1, 2};
  cfg.seeds = {0, 1};
  cfg.predictor.epochs = 3;
  auto report = run_sweep(s.data, s.model, cfg, 11);
  CHECK(report.rows.size() == 2 * 3 * 2);
  CHECK(report.leakage_free);
  std::set<std::uint32_t> test_ids(report.test_ids.begin(), report.test_ids.end());
  CHECK(test_ids.size() == 12);
  for (const auto& t : s.data.test) CHECK(test_ids.count(t.id) == 1);
  for (const auto& row : report.rows) {
    CHECK(row.train_size == 52 * (1 + row.scale));
    CHECK(std::isfinite(row.mape_percent));
  }

  auto again = run_sweep(s.data, s.model, cfg, 11);
  std::ostringstream a, b;
  write_sweep_csv(a, report);
  write_sweep_csv(b, again);
  CHECK(a.str() == b.str());
  CHECK(a.str().rfind("kind,scale,train_size,seed,mape_percent\n", 0) == 0);
}
