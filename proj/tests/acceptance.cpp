// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset; the exit status is 0 only if every selected
// criterion passes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <sys/wait.h>

#include "oracles.hpp"
#include "sigaug/binary_io.hpp"
#include "sigaug/config.hpp"
#include "sigaug/fft.hpp"
#include "sigaug/gradcheck_suite.hpp"
#include "sigaug/losses.hpp"
#include "sigaug/pipeline.hpp"
#include "sigaug/sweep.hpp"

using namespace sigaug;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      failures.push_back(what);
    }
  }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

std::vector<double> white_noise(Rng& rng, Index n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (auto& x : v) x = rng.normal();
  return v;
}

// Shared setup for criteria 6-8: the default surrogate and the seed set.
constexpr std::uint64_t kDataSeed = 1;
const std::vector<std::uint64_t> kTrainSeeds{11, 12, 13};

const RunConfig& base_config() {
  static const RunConfig cfg = [] {
    RunConfig c;
    c.seed = kDataSeed;
    c.validate();
    return c;
  }();
  return cfg;
}

const Dataset& surrogate() {
  static const Dataset ds = synth_dataset(base_config().data, kDataSeed);
  return ds;
}

std::map<std::pair<Variant, std::uint64_t>, GanModel>& trained_cache() {
  static std::map<std::pair<Variant, std::uint64_t>, GanModel> cache;
  return cache;
}

GanModel& trained(Variant v, std::uint64_t seed) {
  auto& cache = trained_cache();
  auto it = cache.find({v, seed});
  if (it == cache.end()) {
    const RunConfig& cfg = base_config();
    GanModel m = make_gan(v, surrogate(), cfg.gan, seed, config_hash(cfg));
    train_gan(m, surrogate().train, cfg.gan.epochs);
    it = cache.emplace(std::make_pair(v, seed), std::move(m)).first;
  }
  return it->second;
}

// 1 ------------------------------------------------------------------------
Outcome gradient_exactness() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto lines = run_gradcheck_suite();
  const double elapsed = seconds_since(t0);
  double worst = 0.0, worst_spectral = 0.0;
  for (const auto& l : lines) {
    o.require(l.passed(), l.name + " max_rel=" + fmt(l.result.max_relative_error));
    const bool spectral = l.tolerance > 1e-4;
    o.require(l.tolerance <= (spectral ? 1e-3 : 1e-4), l.name + " tolerance too loose");
    (spectral ? worst_spectral : worst) = std::max(spectral ? worst_spectral : worst, l.result.max_relative_error);
  }
  o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  o.detail << lines.size() << " checks, max_rel " << fmt(worst, 3) << " (spectral path " << fmt(worst_spectral, 3)
           << "), " << fmt(elapsed, 3) << " s";
  return o;
}

// 2 ------------------------------------------------------------------------
struct LinearCritic {
  Dense layer;
  explicit LinearCritic(const Eigen::VectorXd& w) : layer(w.size(), 1, Activation::identity) {
    layer.weight() = w.transpose();
  }
  SignalBatch input_gradient(const SignalBatch& x, const Eigen::VectorXd&) {
    layer.forward(FeatureMap(Eigen::MatrixXd(x.transpose()), 1));
    return layer.backward(FeatureMap(Eigen::MatrixXd::Ones(1, x.rows()), 1)).values.transpose();
  }
};

Outcome loss_identities() {
  Outcome o;
  constexpr double tol = 1e-9;
  auto near = [&](double got, double want, const std::string& what) {
    o.require(std::abs(got - want) <= tol, what + " = " + fmt(got, 12) + ", want " + fmt(want, 12));
  };
  Eigen::VectorXd s(2);
  s << 0.2, 0.8;
  near(g_loss_adversarial(s).value, -0.5, "adversarial loss");

  near(g_loss_hybrid(-0.5, 2.0, 0.5, 0.5), 0.75, "hybrid 0.5/0.5");
  near(g_loss_hybrid(-0.7, 3.0, 1.0, 0.0), -0.7, "hybrid gamma1=1");
  near(g_loss_hybrid(-0.7, 3.0, 0.0, 1.0), 3.0, "hybrid gamma1=0");
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const double g1 = rng.uniform(), a1 = rng.normal(), a2 = rng.normal(), s1 = rng.uniform(0, 5), s2 = rng.uniform(0, 5);
    const double c = rng.normal();
    near(g_loss_hybrid(a1 + c * a2, s1 + c * s2, g1, 1 - g1),
         g_loss_hybrid(a1, s1, g1, 1 - g1) + c * g_loss_hybrid(a2, s2, g1, 1 - g1), "hybrid linearity");
  }
  bool rejected = false;
  try {
    HybridWeights(0.6, 0.5);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  o.require(rejected, "gamma1 + gamma2 != 1 accepted");

  Eigen::VectorXd half = Eigen::VectorXd::Constant(4, 0.5);
  near(d_loss_cgan(half, half).value, 2.0 * std::log(2.0), "discriminator loss at 0.5");

  Eigen::VectorXd real(3), fake(3);
  real << 0.9, 0.7, 0.6;
  fake << 0.2, 0.4, 0.1;
  Eigen::MatrixXd logits = Eigen::MatrixXd::Random(5, 3);
  const std::vector<int> bins{0, 2, 4};
  auto zero = acgan_losses(real, fake, logits, logits, bins, 0.0);
  near(zero.generator, g_loss_log(fake).value, "acgan generator at alpha=0");
  near(zero.discriminator, d_loss_cgan(real, fake).value, "acgan discriminator at alpha=0");
  for (int B : {2, 5, 9}) {
    near(softmax_cross_entropy(Eigen::MatrixXd::Constant(B, 3, 0.37), std::vector<int>{0, 1, B - 1}).value,
         std::log(static_cast<double>(B)), "uniform cross-entropy B=" + std::to_string(B));
  }

  Eigen::VectorXd critic_fake(4);
  critic_fake << 0.1, 0.5, 0.2, 0.4;
  near(wcgan_losses(critic_fake, critic_fake, 0.0, 10.0).generator, -0.3, "wcgan generator");
  near(wcgan_losses(critic_fake, critic_fake, 0.0, 10.0).discriminator, 0.0, "wcgan discriminator, equal critics");

  Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(64, [&] { return rng.normal(); });
  LinearCritic unit(w / w.norm());
  near(gradient_penalty(unit, SignalBatch::Random(5, 64), Eigen::VectorXd::Zero(5)), 0.0, "penalty at unit norm");

  SignalBatch r = SignalBatch::Random(3, 16), f = SignalBatch::Random(3, 16);
  o.require(interpolate_pairs(r, f, Eigen::VectorXd::Ones(3)) == r, "interpolation theta=1");
  o.require(interpolate_pairs(r, f, Eigen::VectorXd::Zero(3)) == f, "interpolation theta=0");
  SignalBatch two(1, 1), nil(1, 1);
  two(0, 0) = 2.0;
  nil(0, 0) = 0.0;
  Eigen::VectorXd quarter(1);
  quarter << 0.25;
  near(interpolate_pairs(two, nil, quarter)(0, 0), 0.5, "interpolation theta=0.25");

  o.detail << "all identities within " << tol;
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome spectral_machinery() {
  Outcome o;
  Rng rng(3);
  double fft_err = 0.0, parseval_err = 0.0;
  for (std::size_t n = 1; n <= 256; n *= 2) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.normal(), rng.normal()};
    const auto want = oracle::dft(x);
    const auto got = fft<double>(x);
    double et = 0.0, ef = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      fft_err = std::max(fft_err, std::abs(got[k] - want[k]));
      et += std::norm(x[k]);
      ef += std::norm(got[k]);
    }
    parseval_err = std::max(parseval_err, std::abs(et - ef / static_cast<double>(n)) / et);
  }
  o.require(fft_err <= 1e-9, "fft vs dft " + fmt(fft_err));
  o.require(parseval_err <= 1e-9, "parseval " + fmt(parseval_err));

  double sym_err = 0.0, self_loss = 0.0;
  for (Index w : {8, 16, 64}) {
    StftSpec spec{w, w / 2, WindowKind::hann};
    SignalBatch a(4, 256), b(4, 256);
    for (Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal(), b.data()[i] = rng.normal();
    self_loss = std::max(self_loss, std::abs(spectral_loss(a, a, spec)));
    const double ab = spectral_loss(a, b, spec), ba = spectral_loss(b, a, spec);
    sym_err = std::max(sym_err, std::abs(ab - ba) / ab);
  }
  o.require(self_loss == 0.0, "spectral_loss(x, x) = " + fmt(self_loss));
  o.require(sym_err <= 1e-12, "spectral loss asymmetry " + fmt(sym_err));

  Index frame_cases = 0;
  for (Index L = 1; L <= 300; L += 7) {
    for (Index W = 1; W <= L; W *= 2) {
      for (Index H = 1; H <= W; H += std::max<Index>(1, W / 4)) {
        StftSpec spec{W, H, WindowKind::rectangular};
        std::vector<double> x(static_cast<std::size_t>(L), 1.0);
        const Index want = (L - W) / H + 1;
        o.require(stft_magnitude(x, spec).frames() == want && spec.frames(L) == want,
                  "frame count L=" + std::to_string(L) + " W=" + std::to_string(W) + " H=" + std::to_string(H));
        ++frame_cases;
      }
    }
  }
  o.detail << "fft err " << fmt(fft_err, 3) << ", parseval " << fmt(parseval_err, 3) << ", loss asymmetry "
           << fmt(sym_err, 3) << ", " << frame_cases << " frame-count cases";
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome wavelet_coherence_properties() {
  Outcome o;
  const Index L = 1024;
  const Eigen::VectorXd scales = default_scales(L);
  double self_err = 0.0, amp_err = 0.0;
  for (int seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    auto x = white_noise(rng, L);
    std::vector<double> twice(x);
    for (auto& v : twice) v *= 2.0;
    const auto self = wavelet_coherence(x, x, scales);
    const auto amp = wavelet_coherence(x, twice, scales);
    for (Index i = 0; i < self.values.rows(); ++i) {
      for (Index j = 0; j < self.values.cols(); ++j) {
        if (!self.mask(i, j)) continue;
        self_err = std::max(self_err, std::abs(self.values(i, j) - 1.0));
        amp_err = std::max(amp_err, std::abs(amp.values(i, j) - 1.0));
      }
    }
  }
  o.require(self_err <= 1e-6, "WC(x,x) deviation " + fmt(self_err));
  o.require(amp_err <= 1e-6, "WC(x,2x) deviation " + fmt(amp_err));

  double noise_sum = 0.0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    Rng rng(100 + seed);
    auto a = white_noise(rng, L), b = white_noise(rng, L);
    noise_sum += mean_coherence(wavelet_coherence(a, b, scales));
  }
  const double noise_mean = noise_sum / seeds;
  o.require(noise_mean < 0.5, "white-noise mean WC " + fmt(noise_mean));

  Rng fuzz(9);
  double lo = 1.0, hi = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index n = 64 + static_cast<Index>(fuzz.below(960));
    std::vector<double> a(n), b(n);
    const double sa = std::pow(10.0, fuzz.uniform(-6, 6)), sb = std::pow(10.0, fuzz.uniform(-6, 6));
    const int mode = static_cast<int>(fuzz.below(4));
    for (Index i = 0; i < n; ++i) {
      a[i] = sa * (mode == 0 ? std::sin(0.3 * i) : fuzz.normal());
      b[i] = mode == 1 ? 0.0 : sb * (mode == 2 ? a[i] / sa + 0.1 * fuzz.normal() : fuzz.normal());
      if (mode == 3 && fuzz.uniform() < 0.1) b[i] = 0.0;
    }
    CoherenceSmoothing sm{fuzz.uniform(0.05, 4.0), 1 + 2 * static_cast<Index>(fuzz.below(4))};
    const auto map = wavelet_coherence(a, b, log_scales(1.0 + fuzz.uniform(), n / 4.0, 2 + static_cast<Index>(fuzz.below(40))), sm);
    o.require(map.values.allFinite(), "non-finite coherence under fuzzing");
    lo = std::min(lo, map.values.minCoeff());
    hi = std::max(hi, map.values.maxCoeff());
  }
  o.require(lo >= 0.0 && hi <= 1.0, "fuzzed range [" + fmt(lo) + ", " + fmt(hi) + "]");
  o.detail << "self dev " << fmt(self_err, 3) << ", amplitude dev " << fmt(amp_err, 3) << ", white noise "
           << fmt(noise_mean) << " over " << seeds << " seeds, fuzz range [" << fmt(lo, 3) << ", " << fmt(hi, 3)
           << "]";
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome training_protocol() {
  Outcome o;
  const auto t0 = Clock::now();
  const RunConfig& cfg = base_config();
  const Dataset& ds = surrogate();
  GanModel model = make_gan(Variant::has_cgan, ds, cfg.gan, 0, config_hash(cfg));
  const TrainingData data = make_training_data(ds.train, ds.norm, cfg.gan.class_bins);
  std::vector<double> spectral;
  for (int epoch = 1; epoch <= 50; ++epoch) {
    const std::uint64_t g_before = checksum(model.generator.parameters());
    const std::uint64_t d_before = checksum(model.discriminator.parameters());
    const TrainLogEntry e = train_epoch(model, data, model.rng);
    const std::uint64_t g_after = checksum(model.generator.parameters());
    const std::uint64_t d_after = checksum(model.discriminator.parameters());
    const std::string at = " at epoch " + std::to_string(epoch);
    o.require(e.g_at_start == g_before && e.g_after_phase1 == g_before, "generator moved during phase 1" + at);
    o.require(e.d_after_phase1 != d_before, "discriminator not updated in phase 1" + at);
    o.require(e.d_after_phase2 == e.d_after_phase1 && d_after == e.d_after_phase1,
              "discriminator moved during phase 2" + at);
    o.require(g_after != g_before, "generator not updated in phase 2" + at);
    o.require(std::isfinite(e.d_loss) && std::isfinite(e.g_loss) && e.spectral && std::isfinite(*e.spectral),
              "non-finite loss" + at);
    spectral.push_back(e.spectral.value_or(NAN));
  }
  const double first = std::accumulate(spectral.begin(), spectral.begin() + 5, 0.0) / 5.0;
  const double last = std::accumulate(spectral.end() - 5, spectral.end(), 0.0) / 5.0;
  o.require(last < first, "spectral component did not decrease");
  const double elapsed = seconds_since(t0);
  o.require(elapsed < 600.0, "runtime " + fmt(elapsed) + " s");
  o.detail << "50 epochs, freezing verified every epoch, spectral 5-epoch mean " << fmt(first) << " -> " << fmt(last)
           << ", " << fmt(elapsed, 3) << " s";
  return o;
}

// 6 ------------------------------------------------------------------------
Outcome variant_comparison() {
  Outcome o;
  const auto t0 = Clock::now();
  const RunConfig& cfg = base_config();
  const double high_rpm = high_frequency_threshold(cfg.data.rpm_levels);
  std::map<std::string, double> hf, all;
  for (std::uint64_t seed : kTrainSeeds) {
    auto study = [&](GanModel& m) {
      Rng rng(derive_seed(seed, 13));
      return coherence_study(m, surrogate(), cfg.wc, high_rpm, rng);
    };
    GanModel untrained = make_gan(Variant::has_cgan, surrogate(), cfg.gan, seed, config_hash(cfg));
    const std::vector<std::pair<std::string, CoherenceStudy>> studies{
        {"has-cgan", study(trained(Variant::has_cgan, seed))},
        {"cgan-conv", study(trained(Variant::cgan_conv, seed))},
        {"untrained", study(untrained)}};
    for (const auto& [name, s] : studies) {
      hf[name] += s.high_frequency_aggregate / static_cast<double>(kTrainSeeds.size());
      all[name] += s.aggregate / static_cast<double>(kTrainSeeds.size());
    }
  }
  o.require(hf["has-cgan"] >= hf["cgan-conv"], "HAS-CGAN below conv-CGAN");
  o.require(hf["has-cgan"] > hf["untrained"], "HAS-CGAN not above untrained");
  o.require(hf["cgan-conv"] > hf["untrained"], "conv-CGAN not above untrained");
  o.detail << "high-frequency mean WC over " << kTrainSeeds.size() << " seeds: has-cgan " << fmt(hf["has-cgan"])
           << ", cgan-conv " << fmt(hf["cgan-conv"]) << ", untrained " << fmt(hf["untrained"]) << " (all rows: "
           << fmt(all["has-cgan"]) << " / " << fmt(all["cgan-conv"]) << " / " << fmt(all["untrained"]) << "), "
           << fmt(seconds_since(t0), 3) << " s";
  return o;
}

// 7 ------------------------------------------------------------------------
Outcome conditioning_fidelity() {
  Outcome o;
  GanModel& model = trained(Variant::has_cgan, kTrainSeeds.front());
  const Dataset& ds = surrogate();
  Rng rng(derive_seed(kTrainSeeds.front(), 7));
  std::vector<double> labels(200);
  for (auto& y : labels) y = rng.uniform(ds.norm.label_min, ds.norm.label_max);
  const Generation gen = generate_labeled(model, labels, rng);
  std::vector<double> amplitude;
  for (const auto& s : gen.samples) amplitude.push_back(rms(s.signal));
  const double r = pearson(labels, amplitude);
  o.require(gen.samples.size() == 200, "sample count");
  o.require(r > 0.8, "pearson " + fmt(r));
  o.detail << "pearson(label, rms) = " << fmt(r) << " over " << gen.samples.size() << " samples";
  return o;
}

// 8 ------------------------------------------------------------------------
Outcome sweep_study() {
  Outcome o;
  GanModel& model = trained(Variant::has_cgan, kTrainSeeds.front());
  const auto t0 = Clock::now();
  const RunConfig& cfg = base_config();
  const SweepReport report = run_sweep(surrogate(), model, cfg.sweep, kTrainSeeds.front());
  const double elapsed = seconds_since(t0);
  const double k0 = median_mape(report, PredictorKind::cnn1d, 0);
  const double k10 = median_mape(report, PredictorKind::cnn1d, 10);
  o.require(k10 < k0, "cnn1d MAPE k=10 " + fmt(k10) + " not below k=0 " + fmt(k0));
  const auto plateau = report.plateau.at(PredictorKind::cnn1d);
  o.require(plateau.has_value() && *plateau <= 20, "plateau detector did not fire");

  std::multiset<std::uint32_t> want;
  for (const auto& s : surrogate().test) want.insert(s.id);
  const std::multiset<std::uint32_t> got(report.test_ids.begin(), report.test_ids.end());
  o.require(report.leakage_free && got == want, "test leakage audit");
  o.require(report.rows.size() == cfg.sweep.kinds.size() * cfg.sweep.scales.size() * cfg.sweep.seeds.size(),
            "row count");
  o.require(elapsed < 1800.0, "runtime " + fmt(elapsed) + " s");
  o.detail << "cnn1d median MAPE k=0 " << fmt(k0) << "%, k=10 " << fmt(k10) << "%, plateau at k="
           << (plateau ? std::to_string(*plateau) : std::string("none")) << ", " << report.rows.size()
           << " rows audited, " << fmt(elapsed, 3) << " s";
  for (auto kind : cfg.sweep.kinds) {
    o.detail << "\n      " << predictor_name(kind) << ":";
    for (auto k : cfg.sweep.scales) o.detail << " k" << k << "=" << fmt(median_mape(report, kind, k));
  }
  return o;
}

// 9 ------------------------------------------------------------------------
int run_cli(const std::string& args) {
  const std::string cmd = std::string(SIGAUG_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "sigaug_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  auto path = [&](const std::string& f) { return (dir / f).string(); };
  auto same = [&](const std::string& a, const std::string& b, const std::string& what) {
    o.require(fs::exists(path(a)) && fs::exists(path(b)) && read_file(path(a)) == read_file(path(b)),
              what + " differs between runs");
  };
  auto strip_times = [](const std::string& s) { return std::regex_replace(s, std::regex(" time=[0-9.]+s"), ""); };
  const std::string small = "--quiet --set data.length=256 --set stft.window=64 --set stft.hop=32 --seed 5 ";

  int commands = 0;
  for (const std::string run : {"1", "2"}) {
    const std::string data = path("data" + run + ".sgd"), ckpt = path("gan" + run + ".sgf");
    int rc = run_cli("synth " + small + "--csv " + data + ".csv --out " + data);
    rc |= run_cli("train-gan --variant has-cgan " + small + "--set gan.epochs=3 --data " + path("data1.sgd") +
                  " --out " + ckpt);
    rc |= run_cli("train-gan --variant acgan " + small + "--set gan.epochs=2 --data " + path("data1.sgd") +
                  " --out " + path("ac" + run + ".sgf"));
    rc |= run_cli("generate " + small + "--count 20 --checkpoint " + path("gan1.sgf") + " --out " +
                  path("gen" + run + ".csv"));
    rc |= run_cli("coherence " + small + "--checkpoint " + path("gan1.sgf") + " --data " + path("data1.sgd") +
                  " --out " + path("wc" + run + ".csv"));
    rc |= run_cli("sweep " + small + "--set predictor.epochs=3 --scales 0,2 --seeds 0,1 --checkpoint " +
                  path("gan1.sgf") + " --data " + path("data1.sgd") + " --out " + path("sweep" + run + ".csv"));
    rc |= run_cli("report " + small + "--data " + path("data1.sgd") + " --checkpoint " + path("gan1.sgf") +
                  " --sweep " + path("sweep1.csv") + " --out " + path("report" + run + ".txt"));
    const int gc = run_cli("gradcheck --quiet --out " + path("gradcheck" + run + ".txt"));
    o.require(rc == 0, "a command failed in run " + run);
    o.require(gc == 0, "gradcheck exit status " + std::to_string(gc));
    commands = 8;
  }
  same("data1.sgd", "data2.sgd", "synth dataset");
  same("data1.sgd.csv", "data2.sgd.csv", "synth csv");
  same("gan1.sgf", "gan2.sgf", "has-cgan checkpoint");
  same("gan1.sgf.trainlog.csv", "gan2.sgf.trainlog.csv", "training log");
  same("ac1.sgf", "ac2.sgf", "acgan checkpoint");
  same("gen1.csv", "gen2.csv", "generate");
  same("wc1.csv", "wc2.csv", "coherence");
  same("wc1.csv.summary.csv", "wc2.csv.summary.csv", "coherence summary");
  same("sweep1.csv", "sweep2.csv", "sweep");
  same("report1.txt", "report2.txt", "report");
  o.require(strip_times(read_file(path("gradcheck1.txt"))) == strip_times(read_file(path("gradcheck2.txt"))),
            "gradcheck report differs (ignoring timings)");

  // Byte-exact round trips through the library.
  int round_trips = 0;
  for (const char* f : {"gan1.sgf", "ac1.sgf"}) {
    const std::string bytes = read_file(path(f));
    GanModel m = checkpoint_load(path(f));
    checkpoint_save(m, path(std::string(f) + ".resaved"));
    o.require(read_file(path(std::string(f) + ".resaved")) == bytes, std::string(f) + " checkpoint round trip");
    ++round_trips;
  }
  const std::string dbytes = read_file(path("data1.sgd"));
  save_dataset(load_dataset(path("data1.sgd")), path("data1.resaved"));
  o.require(read_file(path("data1.resaved")) == dbytes, "dataset round trip");
  const RunConfig cfg = base_config();
  o.require(serialize_config(parse_config(serialize_config(cfg))) == serialize_config(cfg), "config round trip");
  round_trips += 2;

  fs::remove_all(dir);
  o.detail << commands << " commands run twice with identical outputs, " << round_trips << " byte-exact round trips";
  return o;
}

struct Criterion {
  int number;
  const char* title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient exactness", gradient_exactness},
      {2, "loss identities", loss_identities},
      {3, "spectral machinery", spectral_machinery},
      {4, "wavelet coherence", wavelet_coherence_properties},
      {5, "training protocol", training_protocol},
      {6, "variant comparison", variant_comparison},
      {7, "conditioning fidelity", conditioning_fidelity},
      {8, "sweep study", sweep_study},
      {9, "determinism and serialization", determinism},
  };
  std::set<int> selected;
  std::ofstream report;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--report" && i + 1 < argc) {
      report.open(argv[++i]);
      continue;
    }
    selected.insert(std::atoi(argv[i]));
  }

  bool ok = true;
  for (const auto& c : all) {
    if (!selected.empty() && !selected.count(c.number)) continue;
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.failures.push_back(std::string("exception: ") + e.what());
    }
    ok = ok && out.pass;
    std::ostringstream line;
    line << (out.pass ? "PASS" : "FAIL") << " criterion " << c.number << " (" << c.title
         << "): " << out.detail.str() << '\n';
    for (const auto& f : out.failures) line << "      failed: " << f << '\n';
    std::cout << line.str() << std::flush;
    if (report) report << line.str() << std::flush;
  }
  return ok ? 0 : 1;
}
