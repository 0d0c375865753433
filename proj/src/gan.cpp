#include "sigaug/gan.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace sigaug {

std::string_view variant_name(Variant v) {
  switch (v) {
    case Variant::cgan_dense: return "cgan-dense";
    case Variant::cgan_conv: return "cgan-conv";
    case Variant::acgan: return "acgan";
    case Variant::wcgan: return "wcgan";
    case Variant::has_cgan: return "has-cgan";
  }
  return "?";
}

Variant parse_variant(std::string_view name) {
  if (name == "cgan-dense" || name == "dense-cgan") return Variant::cgan_dense;
  if (name == "cgan-conv" || name == "conv-cgan") return Variant::cgan_conv;
  if (name == "acgan") return Variant::acgan;
  if (name == "wcgan") return Variant::wcgan;
  if (name == "has-cgan") return Variant::has_cgan;
  throw std::invalid_argument("unknown GAN variant '" + std::string(name) +
                              "' (expected cgan-dense, cgan-conv, acgan, wcgan or has-cgan)");
}

void NoiseSpec::validate() const {
  if (latent < 1 || !(f_lo <= f_hi) || f_lo < 0.0) {
    std::ostringstream os;
    os << "noise spec: need latent >= 1 and 0 <= f_lo <= f_hi, got latent=" << latent << " f_lo=" << f_lo
       << " f_hi=" << f_hi;
    throw std::invalid_argument(os.str());
  }
}

Eigen::MatrixXd sample_sinusoidal_noise(const NoiseSpec& spec, Rng& rng, Index count) {
  spec.validate();
  Eigen::MatrixXd z(count, spec.latent);
  const auto d = static_cast<double>(spec.latent);
  for (Index i = 0; i < count; ++i) {
    const double f = rng.uniform(spec.f_lo, spec.f_hi);
    const double phi = rng.uniform(0.0, 2.0 * std::numbers::pi);
    for (Index k = 0; k < spec.latent; ++k) {
      z(i, k) = std::sin(2.0 * std::numbers::pi * f * static_cast<double>(k) / d + phi);
    }
  }
  return z;
}

void GanHyperParams::validate() const {
  HybridWeights(gamma1, gamma2);
  noise.validate();
  std::ostringstream os;
  if (batch_size < 1) os << "batch size must be >= 1; ";
  if (beta < 0.0) os << "beta must be >= 0; ";
  if (!(clip > 0.0)) os << "clip bound must be > 0; ";
  if (class_bins < 2) os << "class bins must be >= 2; ";
  if (alpha < 0.0) os << "alpha must be >= 0; ";
  if (!(lr_g > 0.0) || !(lr_d > 0.0)) os << "learning rates must be > 0; ";
  if (epochs < 0) os << "epochs must be >= 0; ";
  if (!(init_std > 0.0)) os << "init std must be > 0; ";
  if (!os.str().empty()) throw std::invalid_argument("GAN hyperparameters: " + os.str());
}

namespace {

void require_gan_length(Index length) {
  if (length < 64 || length % 64 != 0) {
    throw ShapeError("GAN signal length must be a positive multiple of 64, got " + std::to_string(length));
  }
}

ConvSpec gan_conv(Index in, Index out) { return ConvSpec{in, out, kGanKernel, kGanStride, kGanPadding}; }

std::vector<std::string> describe_all(const Sequential& s) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s[i].describe());
  return out;
}

void init_sequential(Sequential& s, Rng& rng, double stddev) {
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (auto* p = dynamic_cast<ParamLayer*>(&s[i])) p->init_gaussian(rng, stddev);
  }
}

}  // namespace

// Generator -------------------------------------------------------------------

Generator::Generator(Variant variant, Index length, Index latent)
    : length_(length), latent_(latent), dense_(variant == Variant::cgan_dense) {
  require_gan_length(length);
  if (dense_) {
    net_.add<Dense>(latent + 1, 128, Activation::relu);
    net_.add<Dense>(128, 256, Activation::relu);
    net_.add<Dense>(256, length, Activation::tanh);
  } else {
    const Index seed_len = length / 64;
    net_.add<Dense>(latent + 1, 64 * seed_len, Activation::relu);
    net_.add<Unflatten>(64, seed_len);
    net_.add<ConvTranspose1d>(gan_conv(64, 32), Activation::relu);
    net_.add<ConvTranspose1d>(gan_conv(32, 16), Activation::relu);
    net_.add<ConvTranspose1d>(gan_conv(16, 1), Activation::tanh);
  }
}

void Generator::init(Rng& rng, double stddev) { init_sequential(net_, rng, stddev); }

SignalBatch Generator::forward(const Eigen::MatrixXd& z, const Eigen::VectorXd& labels) {
  if (z.cols() != latent_ || z.rows() != labels.size()) {
    std::ostringstream os;
    os << "generator: noise " << z.rows() << "x" << z.cols() << " and " << labels.size()
       << " labels do not match latent dimension " << latent_;
    throw ShapeError(os.str());
  }
  for (Index i = 0; i < labels.size(); ++i) {
    if (!(labels[i] >= 0.0 && labels[i] <= 1.0)) {
      throw ShapeError("generator: label " + std::to_string(labels[i]) + " is not normalised to [0, 1]");
    }
  }
  Eigen::MatrixXd input(latent_ + 1, z.rows());
  input.topRows(latent_) = z.transpose();
  input.row(latent_) = labels.transpose();
  const FeatureMap out = net_.forward(FeatureMap(std::move(input), 1));
  if (dense_) return out.values.transpose();  // L x M
  return to_signal_batch(out);
}

void Generator::backward(const SignalBatch& grad) {
  const FeatureMap g = dense_ ? FeatureMap(grad.transpose(), 1) : to_feature_map(grad);
  net_.backward(g, BackwardFlags{true, false});
}

std::vector<Parameter> Generator::parameters() {
  std::vector<Parameter> p;
  net_.collect_parameters(p, "generator");
  return p;
}

std::vector<std::string> Generator::describe() const { return describe_all(net_); }

// Discriminator ---------------------------------------------------------------

Discriminator::Discriminator(Variant variant, Index length, Index class_bins)
    : head_(length, 1, variant == Variant::wcgan ? Activation::identity : Activation::sigmoid), length_(length) {
  require_gan_length(length);
  trunk_.add<Conv1d>(gan_conv(2, 16), Activation::leaky_relu);
  trunk_.add<Conv1d>(gan_conv(16, 32), Activation::leaky_relu);
  trunk_.add<Conv1d>(gan_conv(32, 64), Activation::leaky_relu);
  trunk_.add<Flatten>();
  if (variant == Variant::acgan) class_head_.emplace(length, class_bins, Activation::identity);
}

void Discriminator::init(Rng& rng, double stddev) {
  init_sequential(trunk_, rng, stddev);
  head_.init_gaussian(rng, stddev);
  if (class_head_) class_head_->init_gaussian(rng, stddev);
}

DiscriminatorOutput Discriminator::forward(const SignalBatch& x, const Eigen::VectorXd& labels) {
  if (x.cols() != length_ || x.rows() != labels.size()) {
    std::ostringstream os;
    os << "discriminator: batch " << x.rows() << "x" << x.cols() << " with " << labels.size()
       << " labels, expected signals of length " << length_;
    throw ShapeError(os.str());
  }
  const Index batch = x.rows();
  Eigen::MatrixXd input(2, batch * length_);
  input.row(0) = to_feature_map(x).values;
  for (Index b = 0; b < batch; ++b) input.row(1).segment(b * length_, length_).setConstant(labels[b]);
  const FeatureMap features = trunk_.forward(FeatureMap(std::move(input), length_));
  DiscriminatorOutput out;
  out.scores = head_.forward(features).values.row(0).transpose();
  if (class_head_) out.class_logits = class_head_->forward(features).values;
  return out;
}

SignalBatch Discriminator::backward(const Eigen::VectorXd& d_scores, const Eigen::MatrixXd& d_logits,
                                    BackwardFlags flags) {
  const BackwardFlags head_flags{flags.params, true};
  FeatureMap g = head_.backward(FeatureMap(d_scores.transpose(), 1), head_flags);
  if (class_head_) {
    const Eigen::MatrixXd dl =
        d_logits.size() ? d_logits : Eigen::MatrixXd::Zero(class_head_->out_features(), d_scores.size());
    g.values += class_head_->backward(FeatureMap(dl, 1), head_flags).values;
  }
  const FeatureMap dx = trunk_.backward(g, flags);
  if (!flags.input) return {};
  return to_signal_batch(dx, 0);
}

SignalBatch Discriminator::input_gradient(const SignalBatch& x, const Eigen::VectorXd& labels) {
  forward(x, labels);
  return backward(Eigen::VectorXd::Ones(x.rows()), {}, BackwardFlags{false, true});
}

std::vector<Parameter> Discriminator::parameters() {
  std::vector<Parameter> p;
  trunk_.collect_parameters(p, "discriminator");
  head_.collect_parameters(p, "discriminator.head");
  if (class_head_) class_head_->collect_parameters(p, "discriminator.class_head");
  return p;
}

void Discriminator::clip_weights(double bound) {
  for (auto& p : parameters()) *p.value = p.value->cwiseMax(-bound).cwiseMin(bound);
}

double Discriminator::max_abs_weight() {
  double m = 0.0;
  for (auto& p : parameters()) m = std::max(m, p.value->cwiseAbs().maxCoeff());
  return m;
}

void Discriminator::hash_kinks(std::uint64_t& h) const {
  trunk_.hash_kinks(h);
  head_.hash_kinks(h);
}

std::vector<std::string> Discriminator::describe() const {
  auto out = describe_all(trunk_);
  out.push_back(head_.describe());
  if (class_head_) out.push_back(class_head_->describe());
  return out;
}

// GanModel --------------------------------------------------------------------

GanModel::GanModel(Variant v, Index length, GanHyperParams h, std::uint64_t s)
    : variant(v),
      signal_length(length),
      hyper((h.validate(), std::move(h))),
      seed(s),
      generator(v, length, hyper.noise.latent),
      discriminator(v, length, hyper.class_bins),
      g_opt(AdamConfig{hyper.lr_g, hyper.adam_beta1, hyper.adam_beta2, 1e-8}),
      d_opt(AdamConfig{hyper.lr_d, hyper.adam_beta1, hyper.adam_beta2, 1e-8}),
      rng(derive_seed(s, 1)) {
  if (variant == Variant::has_cgan) hyper.stft.validate(length);
  Rng init_rng(derive_seed(s, 0));
  generator.init(init_rng, hyper.init_std);
  discriminator.init(init_rng, hyper.init_std);
}

TrainingData make_training_data(const TrainSplit& train, const NormalizationRecord& norm, Index class_bins) {
  TrainingData d;
  d.signals = normalized_signals(train, norm);
  d.labels = normalized_labels(train, norm);
  for (Index i = 0; i < d.labels.size(); ++i) {
    d.bins.push_back(label_bin(d.labels[i], static_cast<int>(class_bins)));
  }
  return d;
}

Generation generate_labeled(GanModel& model, const std::vector<double>& labels, Rng& rng) {
  Generation out;
  constexpr Index kChunk = 64;
  const auto n = static_cast<Index>(labels.size());
  for (Index start = 0; start < n; start += kChunk) {
    const Index count = std::min(kChunk, n - start);
    Eigen::VectorXd y(count);
    for (Index i = 0; i < count; ++i) {
      const double raw = model.norm.normalize_label(labels[static_cast<std::size_t>(start + i)]);
      y[i] = std::clamp(raw, 0.0, 1.0);
      if (y[i] != raw) ++out.clamped_labels;
    }
    const Eigen::MatrixXd z = sample_sinusoidal_noise(model.hyper.noise, rng, count);
    const SignalBatch x = model.generator.forward(z, y);
    for (Index i = 0; i < count; ++i) {
      LabeledSignal s;
      s.id = kGeneratedIdBase + static_cast<std::uint32_t>(start + i);
      s.generated = true;
      s.ra = model.norm.denormalize_label(y[i]);
      s.sample_rate = model.sample_rate;
      s.signal = model.norm.denormalize(x.row(i).transpose());
      out.samples.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace sigaug
