#include "sigaug/gradcheck_suite.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "sigaug/gan.hpp"
#include "sigaug/losses.hpp"
#include "sigaug/stft.hpp"

namespace sigaug {

namespace {

constexpr Index kLength = 64;
constexpr Index kLayerBatch = 3;
// Full stacks are checked on two samples to keep the suite well under a minute.
constexpr Index kBatch = 2;

Eigen::MatrixXd gaussian(Rng& rng, Index rows, Index cols, double stddev = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal(0.0, stddev);
  return m;
}

std::function<void()> maybe_corrupt(std::function<void()> grads, std::vector<Parameter>& params, bool corrupt) {
  if (!corrupt) return grads;
  return [grads = std::move(grads), &params] {
    grads();
    for (auto& p : params) *p.grad *= 1.01;
  };
}

// loss = sum(R .* layer(x)) for a fixed random projection R.
GradCheckLine check_layer(const std::string& name, Layer& layer, const FeatureMap& x, Rng& rng, bool corrupt) {
  const FeatureMap probe = layer.forward(x);
  const Eigen::MatrixXd r = gaussian(rng, probe.values.rows(), probe.values.cols());
  layer.backward(FeatureMap(r, probe.length));
  std::vector<Parameter> params;
  layer.collect_parameters(params, name);
  auto loss = [&] { return layer.forward(x).values.cwiseProduct(r).sum(); };
  auto grads = [&] {
    zero_grads(params);
    const FeatureMap y = layer.forward(x);
    layer.backward(FeatureMap(r, y.length));
  };
  auto kinks = [&] {
    std::uint64_t h = 0;
    layer.hash_kinks(h);
    return h;
  };
  return {name, grad_check(params, loss, maybe_corrupt(grads, params, corrupt), 1e-5, kinks), 1e-4};
}

GanHyperParams reduced_hyper() {
  GanHyperParams hp;
  hp.batch_size = kBatch;
  hp.stft = StftSpec{16, 8, WindowKind::hann};
  return hp;
}

SignalBatch random_signals(Rng& rng) {
  SignalBatch x(kBatch, kLength);
  for (Index i = 0; i < x.size(); ++i) x.data()[i] = std::tanh(rng.normal());
  return x;
}

Eigen::VectorXd random_labels(Rng& rng) {
  Eigen::VectorXd y(kBatch);
  for (Index i = 0; i < kBatch; ++i) y[i] = rng.uniform();
  return y;
}

// Variant D loss on one forward over [real; fake].
GradCheckLine check_discriminator(Variant v, Rng& rng, bool corrupt) {
  const GanHyperParams hp = reduced_hyper();
  Discriminator d(v, kLength, hp.class_bins);
  d.init(rng, 0.2);
  SignalBatch both(2 * kBatch, kLength);
  both << random_signals(rng), random_signals(rng);
  Eigen::VectorXd labels(2 * kBatch);
  const Eigen::VectorXd y = random_labels(rng);
  labels << y, y;
  std::vector<int> bins;
  for (Index i = 0; i < kBatch; ++i) bins.push_back(label_bin(y[i], static_cast<int>(hp.class_bins)));

  auto evaluate = [&](Eigen::VectorXd* d_scores, Eigen::MatrixXd* d_logits) {
    const DiscriminatorOutput out = d.forward(both, labels);
    const Eigen::VectorXd real = out.scores.head(kBatch), fake = out.scores.tail(kBatch);
    Eigen::VectorXd gs(2 * kBatch);
    Eigen::MatrixXd gl;
    double value = 0.0;
    if (v == Variant::wcgan) {
      value = wcgan_losses(real, fake, 0.0, 0.0).discriminator;
      gs << Eigen::VectorXd::Constant(kBatch, -1.0 / kBatch), Eigen::VectorXd::Constant(kBatch, 1.0 / kBatch);
    } else if (v == Variant::acgan) {
      const AcganLosses l = acgan_losses(real, fake, out.class_logits.leftCols(kBatch),
                                         out.class_logits.rightCols(kBatch), bins, hp.alpha);
      value = l.discriminator;
      gs << l.d_grad_real_scores, l.d_grad_fake_scores;
      gl = Eigen::MatrixXd::Zero(out.class_logits.rows(), 2 * kBatch);
      gl.leftCols(kBatch) = l.d_grad_real_logits;
    } else {
      const BceLoss l = d_loss_cgan(real, fake);
      value = l.value;
      gs << l.grad_real, l.grad_fake;
    }
    if (d_scores) *d_scores = gs;
    if (d_logits) *d_logits = gl;
    return value;
  };

  std::vector<Parameter> params = d.parameters();
  auto grads = [&] {
    zero_grads(params);
    Eigen::VectorXd gs;
    Eigen::MatrixXd gl;
    evaluate(&gs, &gl);
    d.backward(gs, gl, BackwardFlags{true, false});
  };
  auto kinks = [&] {
    std::uint64_t h = 0;
    d.hash_kinks(h);
    return h;
  };
  return {"discriminator " + std::string(variant_name(v)),
          grad_check(params, [&] { return evaluate(nullptr, nullptr); }, maybe_corrupt(grads, params, corrupt), 1e-5,
                     kinks),
          1e-4};
}

// Generator parameters through a frozen D, optionally plus the spectral term.
GradCheckLine check_generator(Variant v, Rng& rng, bool corrupt) {
  const GanHyperParams hp = reduced_hyper();
  Generator g(v, kLength, hp.noise.latent);
  g.init(rng, 0.1);
  Discriminator d(v, kLength, hp.class_bins);
  d.init(rng, 0.2);
  const Eigen::MatrixXd z = sample_sinusoidal_noise(hp.noise, rng, kBatch);
  const Eigen::VectorXd y = random_labels(rng);
  const SignalBatch real = random_signals(rng);
  std::vector<int> bins;
  for (Index i = 0; i < kBatch; ++i) bins.push_back(label_bin(y[i], static_cast<int>(hp.class_bins)));
  const bool hybrid = v == Variant::has_cgan;
  const HybridWeights w(hp.gamma1, hp.gamma2);

  auto evaluate = [&](SignalBatch* d_fake) {
    const SignalBatch fake = g.forward(z, y);
    const DiscriminatorOutput out = d.forward(fake, y);
    double value = 0.0;
    Eigen::VectorXd gs;
    Eigen::MatrixXd gl;
    if (v == Variant::wcgan) {
      value = -out.scores.mean();
      gs = Eigen::VectorXd::Constant(kBatch, -1.0 / kBatch);
    } else if (v == Variant::acgan) {
      const ScoreLoss adv = g_loss_log(out.scores);
      const CrossEntropy ce = softmax_cross_entropy(out.class_logits, bins);
      value = adv.value + hp.alpha * ce.value;
      gs = adv.grad;
      gl = hp.alpha * ce.grad;
    } else {
      const ScoreLoss l = g_loss_adversarial(out.scores);
      value = l.value;
      gs = l.grad;
    }
    if (d_fake) *d_fake = d.backward(gs, gl, BackwardFlags{false, true});
    if (hybrid) {
      const SpectralLossGrad s = spectral_loss_with_grad(real, fake, hp.stft);
      value = g_loss_hybrid(value, s.value, w);
      if (d_fake) *d_fake = w.gamma1() * *d_fake + w.gamma2() * s.grad;
    }
    return value;
  };

  std::vector<Parameter> params = g.parameters();
  auto grads = [&] {
    zero_grads(params);
    SignalBatch d_fake;
    evaluate(&d_fake);
    g.backward(d_fake);
  };
  auto kinks = [&] {
    std::uint64_t h = 0;
    g.hash_kinks(h);
    d.hash_kinks(h);
    return h;
  };
  return {"generator " + std::string(variant_name(v)) + (hybrid ? " (spectral loss)" : ""),
          grad_check(params, [&] { return evaluate(nullptr); }, maybe_corrupt(grads, params, corrupt), 1e-5, kinks),
          hybrid ? 1e-3 : 1e-4};
}

// Discriminator input gradient (what the gradient penalty and the generator
// see) against central differences in the signal entries. The objective is
// sum(scores) plus a fixed projection of the class logits when present.
GradCheckLine check_input_gradient(Variant v, Rng& rng, bool corrupt) {
  Discriminator d(v, kLength, 5);
  d.init(rng, 0.2);
  SignalBatch x = random_signals(rng);
  const Eigen::VectorXd y = random_labels(rng);
  Eigen::MatrixXd r;
  if (d.has_class_head()) r = gaussian(rng, 5, kBatch);
  auto objective = [&] {
    const DiscriminatorOutput out = d.forward(x, y);
    return out.scores.sum() + (r.size() ? out.class_logits.cwiseProduct(r).sum() : 0.0);
  };
  objective();
  SignalBatch analytic = d.backward(Eigen::VectorXd::Ones(kBatch), r, BackwardFlags{false, true});
  if (corrupt) analytic *= 1.01;
  std::uint64_t base = 0;
  objective();
  d.hash_kinks(base);
  const double floor = std::max(1e-12, 1e-7 * analytic.cwiseAbs().maxCoeff());
  const double eps = 1e-5;
  GradCheckResult res;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      const double orig = x(i, j);
      std::uint64_t hp = 0, hm = 0;
      x(i, j) = orig + eps;
      const double plus = objective();
      d.hash_kinks(hp);
      x(i, j) = orig - eps;
      const double minus = objective();
      d.hash_kinks(hm);
      x(i, j) = orig;
      if (hp != base || hm != base) {
        ++res.skipped_kinks;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err =
          std::abs(analytic(i, j) - numeric) / std::max({std::abs(analytic(i, j)), std::abs(numeric), floor});
      ++res.checked;
      if (err >= res.max_relative_error) {
        res.max_relative_error = err;
        res.worst_parameter = "signal";
        res.worst_index = i * x.cols() + j;
        res.worst_analytic = analytic(i, j);
        res.worst_numeric = numeric;
      }
    }
  }
  return {"input gradient " + std::string(variant_name(v)), res, 1e-4};
}

}  // namespace

std::vector<GradCheckLine> run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  Rng rng(options.seed);
  const bool bad = options.corrupt_gradients;
  std::vector<GradCheckLine> lines;
  auto clock = std::chrono::steady_clock::now();
  auto timed = [&](GradCheckLine line) {
    const auto now = std::chrono::steady_clock::now();
    line.seconds = std::chrono::duration<double>(now - clock).count();
    clock = now;
    lines.push_back(std::move(line));
  };

  {
    Dense layer(12, 7, Activation::tanh);
    layer.init_gaussian(rng, 0.4);
    timed(check_layer("dense", layer, FeatureMap(gaussian(rng, 12, kLayerBatch), 1), rng, bad));
  }
  {
    Dense layer(12, 7, Activation::sigmoid);
    layer.init_gaussian(rng, 0.4);
    timed(check_layer("dense sigmoid", layer, FeatureMap(gaussian(rng, 12, kLayerBatch), 1), rng, bad));
  }
  {
    Conv1d layer(ConvSpec{2, 4, 20, 4, 8}, Activation::leaky_relu);
    layer.init_gaussian(rng, 0.3);
    timed(check_layer("conv1d", layer, FeatureMap(gaussian(rng, 2, kLayerBatch * kLength), kLength), rng, bad));
  }
  {
    ConvTranspose1d layer(ConvSpec{4, 2, 20, 4, 8}, Activation::relu);
    layer.init_gaussian(rng, 0.3);
    timed(check_layer("conv_transpose1d", layer, FeatureMap(gaussian(rng, 4, kLayerBatch * 16), 16), rng, bad));
  }
  {
    // Reshapes have no parameters of their own; check them between two dense layers.
    Sequential s;
    s.add<Dense>(6, 32, Activation::tanh);
    s.add<Unflatten>(4, 8);
    s.add<Conv1d>(ConvSpec{4, 3, 4, 2, 1}, Activation::tanh);
    s.add<Flatten>();
    s.add<Dense>(12, 2, Activation::identity);
    for (std::size_t i : {0u, 2u, 4u}) static_cast<ParamLayer&>(s[i]).init_gaussian(rng, 0.4);
    const FeatureMap x(gaussian(rng, 6, kLayerBatch), 1);
    const FeatureMap probe = s.forward(x);
    const Eigen::MatrixXd r = gaussian(rng, probe.values.rows(), probe.values.cols());
    s.backward(FeatureMap(r, 1));
    std::vector<Parameter> params;
    s.collect_parameters(params, "reshape");
    auto grads = [&] {
      zero_grads(params);
      s.forward(x);
      s.backward(FeatureMap(r, 1));
    };
    timed({"flatten/unflatten",
                     grad_check(params, [&] { return s.forward(x).values.cwiseProduct(r).sum(); },
                                maybe_corrupt(grads, params, bad)),
                     1e-4});
  }

  // The conv generator is shared by every conv variant; the loss-specific
  // paths into it are covered by the input-gradient lines.
  for (Variant v : {Variant::cgan_dense, Variant::cgan_conv, Variant::has_cgan}) {
    timed(check_generator(v, rng, bad));
  }
  for (Variant v : {Variant::cgan_conv, Variant::acgan, Variant::wcgan}) {
    timed(check_discriminator(v, rng, bad));
  }
  for (Variant v : {Variant::acgan, Variant::wcgan}) timed(check_input_gradient(v, rng, bad));
  return lines;
}

void write_gradcheck_report(std::ostream& os, const std::vector<GradCheckLine>& lines) {
  for (const auto& l : lines) {
    os << (l.passed() ? "PASS " : "FAIL ") << std::left << std::setw(34) << l.name << std::right
       << " max_rel=" << std::scientific << std::setprecision(3) << l.result.max_relative_error
       << " tol=" << l.tolerance << std::defaultfloat << " checked=" << l.result.checked
       << " skipped_kinks=" << l.result.skipped_kinks << " time=" << std::fixed << std::setprecision(2)
       << l.seconds << "s" << std::defaultfloat;
    if (!l.passed() && !l.result.worst_parameter.empty()) {
      os << " worst=" << l.result.worst_parameter << "[" << l.result.worst_index << "] analytic=" << std::scientific
         << l.result.worst_analytic << " numeric=" << l.result.worst_numeric << std::defaultfloat;
    }
    os << '\n';
  }
}

}  // namespace sigaug
