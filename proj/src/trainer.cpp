#include <chrono>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sigaug/errors.hpp"
#include "sigaug/gan.hpp"

namespace sigaug {

namespace {

std::vector<std::vector<Index>> make_batches(Index count, Index batch_size, Rng& rng) {
  std::vector<Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Index{0});
  rng.shuffle(std::span(order));
  std::vector<std::vector<Index>> batches;
  for (Index start = 0; start < count; start += batch_size) {
    const Index end = std::min(count, start + batch_size);
    batches.emplace_back(order.begin() + start, order.begin() + end);
  }
  return batches;
}

SignalBatch gather_rows(const SignalBatch& m, const std::vector<Index>& idx) {
  SignalBatch out(static_cast<Index>(idx.size()), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Index>(i)) = m.row(idx[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
  Eigen::VectorXd out(static_cast<Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(i)] = v[idx[i]];
  return out;
}

std::vector<int> gather(const std::vector<int>& v, const std::vector<Index>& idx) {
  std::vector<int> out;
  for (Index i : idx) out.push_back(v[static_cast<std::size_t>(i)]);
  return out;
}

void check_finite(const GanModel& model, Index epoch, const char* phase, double d_loss, double g_loss, double spectral) {
  if (std::isfinite(d_loss) && std::isfinite(g_loss) && std::isfinite(spectral)) return;
  std::ostringstream os;
  os << "non-finite loss in " << phase << " of epoch " << epoch << " (variant " << variant_name(model.variant)
     << "): d_loss=" << d_loss << " g_loss=" << g_loss << " spectral=" << spectral;
  throw NumericalError(os.str());
}

}  // namespace

TrainLogEntry train_epoch(GanModel& model, const TrainingData& data, Rng& rng) {
  const auto started = std::chrono::steady_clock::now();
  const Index count = data.signals.rows();
  if (count < 1) throw ShapeError("train_epoch: no training samples");
  if (data.signals.cols() != model.signal_length) {
    throw ShapeError("train_epoch: training signals have length " + std::to_string(data.signals.cols()) +
                     ", model expects " + std::to_string(model.signal_length));
  }
  const GanHyperParams& hp = model.hyper;
  const Variant variant = model.variant;
  const bool wasserstein = variant == Variant::wcgan;
  const bool acgan = variant == Variant::acgan;
  const bool hybrid = variant == Variant::has_cgan;

  TrainLogEntry log;
  log.epoch = model.epochs_trained + 1;
  auto g_params = model.generator.parameters();
  auto d_params = model.discriminator.parameters();
  log.g_at_start = checksum(g_params);

  // Phase 1: discriminator, generator frozen.
  double d_sum = 0.0, penalty_sum = 0.0;
  const auto d_batches = make_batches(count, hp.batch_size, rng);
  for (const auto& idx : d_batches) {
    const SignalBatch real = gather_rows(data.signals, idx);
    const Eigen::VectorXd y = gather(data.labels, idx);
    const Index m = real.rows();
    const SignalBatch fake = model.generator.forward(sample_sinusoidal_noise(hp.noise, rng, m), y);

    double penalty = 0.0;
    if (wasserstein) {
      const Interpolation mix = interpolate_pairs(real, fake, rng);
      penalty = gradient_penalty(model.discriminator, mix.mixed, y);
      penalty_sum += penalty;
    }

    SignalBatch both(2 * m, real.cols());
    both.topRows(m) = real;
    both.bottomRows(m) = fake;
    Eigen::VectorXd yy(2 * m);
    yy << y, y;
    const DiscriminatorOutput out = model.discriminator.forward(both, yy);
    const Eigen::VectorXd real_scores = out.scores.head(m), fake_scores = out.scores.tail(m);

    Eigen::VectorXd d_scores(2 * m);
    Eigen::MatrixXd d_logits;
    double loss = 0.0;
    if (wasserstein) {
      loss = wcgan_losses(real_scores, fake_scores, penalty, hp.beta).discriminator;
      d_scores << Eigen::VectorXd::Constant(m, -1.0 / static_cast<double>(m)),
          Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
    } else if (acgan) {
      const std::vector<int> bins = gather(data.bins, idx);
      const AcganLosses l = acgan_losses(real_scores, fake_scores, out.class_logits.leftCols(m),
                                         out.class_logits.rightCols(m), bins, hp.alpha);
      loss = l.discriminator;
      d_scores << l.d_grad_real_scores, l.d_grad_fake_scores;
      d_logits = Eigen::MatrixXd::Zero(out.class_logits.rows(), 2 * m);
      d_logits.leftCols(m) = l.d_grad_real_logits;
    } else {
      const BceLoss l = d_loss_cgan(real_scores, fake_scores);
      loss = l.value;
      d_scores << l.grad_real, l.grad_fake;
    }
    check_finite(model, log.epoch, "discriminator phase", loss, 0.0, 0.0);
    d_sum += loss;

    zero_grads(d_params);
    model.discriminator.backward(d_scores, d_logits, BackwardFlags{true, false});
    model.d_opt.step(d_params);
    if (wasserstein) model.discriminator.clip_weights(hp.clip);
  }
  log.g_after_phase1 = checksum(g_params);
  log.d_after_phase1 = checksum(d_params);

  // Phase 2: generator, discriminator frozen.
  double g_sum = 0.0, spectral_sum = 0.0;
  const HybridWeights weights(hp.gamma1, hp.gamma2);
  const auto g_batches = make_batches(count, hp.batch_size, rng);
  for (const auto& idx : g_batches) {
    const Eigen::VectorXd y = gather(data.labels, idx);
    const Index m = y.size();
    const SignalBatch fake = model.generator.forward(sample_sinusoidal_noise(hp.noise, rng, m), y);
    const DiscriminatorOutput out = model.discriminator.forward(fake, y);

    double loss = 0.0;
    Eigen::VectorXd d_scores;
    Eigen::MatrixXd d_logits;
    if (wasserstein) {
      loss = -out.scores.mean();
      d_scores = Eigen::VectorXd::Constant(m, -1.0 / static_cast<double>(m));
    } else if (acgan) {
      // Generator half of the ACGAN objective: conditioned labels are the targets.
      const ScoreLoss adv = g_loss_log(out.scores);
      const CrossEntropy ce = softmax_cross_entropy(out.class_logits, gather(data.bins, idx));
      loss = adv.value + hp.alpha * ce.value;
      d_scores = adv.grad;
      d_logits = hp.alpha * ce.grad;
    } else {
      const ScoreLoss l = hp.g_loss == GeneratorLoss::log ? g_loss_log(out.scores) : g_loss_adversarial(out.scores);
      loss = l.value;
      d_scores = l.grad;
    }
    SignalBatch d_fake = model.discriminator.backward(d_scores, d_logits, BackwardFlags{false, true});

    double spectral = 0.0;
    if (hybrid) {
      const SignalBatch real = gather_rows(data.signals, idx);
      const SpectralLossGrad s = spectral_loss_with_grad(real, fake, hp.stft);
      spectral = s.value;
      loss = g_loss_hybrid(loss, spectral, weights);
      d_fake = weights.gamma1() * d_fake + weights.gamma2() * s.grad;
      spectral_sum += spectral;
    }
    check_finite(model, log.epoch, "generator phase", 0.0, loss, spectral);
    g_sum += loss;

    zero_grads(g_params);
    model.generator.backward(d_fake);
    model.g_opt.step(g_params);
  }
  log.d_after_phase2 = checksum(d_params);

  log.d_loss = d_sum / static_cast<double>(d_batches.size());
  log.g_loss = g_sum / static_cast<double>(g_batches.size());
  if (hybrid) log.spectral = spectral_sum / static_cast<double>(g_batches.size());
  if (wasserstein) log.gradient_penalty = penalty_sum / static_cast<double>(d_batches.size());
  model.epochs_trained = log.epoch;
  log.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return log;
}

void write_trainlog_csv(std::ostream& os, const TrainLog& log) {
  const auto prec = os.precision();
  os << std::setprecision(9);
  os << "epoch,d_loss,g_loss,spectral_component,gradient_penalty\n";
  for (const auto& e : log) {
    os << e.epoch << ',' << e.d_loss << ',' << e.g_loss << ',';
    if (e.spectral) os << *e.spectral;
    os << ',';
    if (e.gradient_penalty) os << *e.gradient_penalty;
    os << '\n';
  }
  os.precision(prec);
}

}  // namespace sigaug
