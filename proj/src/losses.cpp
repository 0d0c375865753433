#include "sigaug/losses.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sigaug {

namespace {

void require_nonempty(const Eigen::VectorXd& v, const char* what) {
  if (v.size() == 0) throw ShapeError(std::string(what) + ": empty batch");
}

double clamp_prob(double p, bool& clamped) {
  const double c = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  if (c != p) clamped = true;
  return c;
}

}  // namespace

ScoreLoss g_loss_adversarial(const Eigen::VectorXd& fake_scores) {
  require_nonempty(fake_scores, "generator loss");
  const auto m = static_cast<double>(fake_scores.size());
  ScoreLoss out;
  out.value = -fake_scores.sum() / m;
  out.grad = Eigen::VectorXd::Constant(fake_scores.size(), -1.0 / m);
  return out;
}

ScoreLoss g_loss_log(const Eigen::VectorXd& fake_scores) {
  require_nonempty(fake_scores, "generator loss");
  const auto m = static_cast<double>(fake_scores.size());
  ScoreLoss out;
  out.grad.resize(fake_scores.size());
  for (Index i = 0; i < fake_scores.size(); ++i) {
    const double p = clamp_prob(fake_scores[i], out.clamped);
    out.value -= std::log(p) / m;
    out.grad[i] = -1.0 / (m * p);
  }
  return out;
}

HybridWeights::HybridWeights(double gamma1, double gamma2) : g1_(gamma1), g2_(gamma2) {
  if (!(gamma1 >= 0.0 && gamma2 >= 0.0 && gamma1 <= 1.0 && gamma2 <= 1.0) ||
      std::abs(gamma1 + gamma2 - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "hybrid loss weights must be in [0,1] and sum to 1, got gamma1=" << gamma1 << " gamma2=" << gamma2;
    throw std::invalid_argument(os.str());
  }
}

double g_loss_hybrid(double adversarial, double spectral, const HybridWeights& w) {
  return w.gamma1() * adversarial + w.gamma2() * spectral;
}

double g_loss_hybrid(double adversarial, double spectral, double gamma1, double gamma2) {
  return g_loss_hybrid(adversarial, spectral, HybridWeights(gamma1, gamma2));
}

BceLoss d_loss_cgan(const Eigen::VectorXd& real_scores, const Eigen::VectorXd& fake_scores) {
  require_nonempty(real_scores, "discriminator loss");
  require_nonempty(fake_scores, "discriminator loss");
  BceLoss out;
  const auto mr = static_cast<double>(real_scores.size());
  const auto mf = static_cast<double>(fake_scores.size());
  out.grad_real.resize(real_scores.size());
  out.grad_fake.resize(fake_scores.size());
  for (Index i = 0; i < real_scores.size(); ++i) {
    const double p = clamp_prob(real_scores[i], out.clamped);
    out.value -= std::log(p) / mr;
    out.grad_real[i] = -1.0 / (mr * p);
  }
  for (Index i = 0; i < fake_scores.size(); ++i) {
    const double p = clamp_prob(fake_scores[i], out.clamped);
    out.value -= std::log(1.0 - p) / mf;
    out.grad_fake[i] = 1.0 / (mf * (1.0 - p));
  }
  return out;
}

CrossEntropy softmax_cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& targets) {
  if (logits.cols() == 0 || static_cast<std::size_t>(logits.cols()) != targets.size()) {
    throw ShapeError("cross-entropy: " + std::to_string(logits.cols()) + " logit columns vs " +
                     std::to_string(targets.size()) + " targets");
  }
  const Index classes = logits.rows();
  const auto m = static_cast<double>(logits.cols());
  CrossEntropy out;
  out.grad.resize(classes, logits.cols());
  for (Index j = 0; j < logits.cols(); ++j) {
    const int t = targets[static_cast<std::size_t>(j)];
    if (t < 0 || t >= classes) {
      throw std::out_of_range("class bin " + std::to_string(t) + " outside [0, " + std::to_string(classes) + ")");
    }
    const double mx = logits.col(j).maxCoeff();
    const Eigen::VectorXd e = (logits.col(j).array() - mx).exp();
    const double z = e.sum();
    out.value -= (logits(t, j) - mx - std::log(z)) / m;
    out.grad.col(j) = e / (z * m);
    out.grad(t, j) -= 1.0 / m;
  }
  return out;
}

int label_bin(double y, int bins) {
  if (bins < 2) throw std::invalid_argument("need at least 2 label bins");
  const int b = static_cast<int>(std::floor(y * bins));
  return std::clamp(b, 0, bins - 1);
}

AcganLosses acgan_losses(const Eigen::VectorXd& real_scores, const Eigen::VectorXd& fake_scores,
                         const Eigen::MatrixXd& class_logits_real, const Eigen::MatrixXd& class_logits_fake,
                         const std::vector<int>& true_bins, double alpha) {
  AcganLosses out;
  const BceLoss bce = d_loss_cgan(real_scores, fake_scores);
  const CrossEntropy ce_real = softmax_cross_entropy(class_logits_real, true_bins);
  const CrossEntropy ce_fake = softmax_cross_entropy(class_logits_fake, true_bins);
  const ScoreLoss adv = g_loss_log(fake_scores);

  out.discriminator = bce.value + alpha * ce_real.value;
  out.d_grad_real_scores = bce.grad_real;
  out.d_grad_fake_scores = bce.grad_fake;
  out.d_grad_real_logits = alpha * ce_real.grad;

  out.generator = adv.value + alpha * ce_fake.value;
  out.g_grad_fake_scores = adv.grad;
  out.g_grad_fake_logits = alpha * ce_fake.grad;
  return out;
}

WcganLosses wcgan_losses(const Eigen::VectorXd& critic_real, const Eigen::VectorXd& critic_fake, double penalty,
                         double beta) {
  require_nonempty(critic_real, "critic loss");
  require_nonempty(critic_fake, "critic loss");
  WcganLosses out;
  out.generator = -critic_fake.mean();
  out.discriminator = -(critic_real.mean() - critic_fake.mean()) + beta * penalty;
  return out;
}

SignalBatch interpolate_pairs(const SignalBatch& real, const SignalBatch& fake, const Eigen::VectorXd& theta) {
  if (real.rows() != fake.rows() || real.cols() != fake.cols() || theta.size() != real.rows()) {
    throw ShapeError("interpolate_pairs: real, fake and theta shapes disagree");
  }
  SignalBatch out(real.rows(), real.cols());
  for (Index i = 0; i < real.rows(); ++i) out.row(i) = theta[i] * real.row(i) + (1.0 - theta[i]) * fake.row(i);
  return out;
}

Interpolation interpolate_pairs(const SignalBatch& real, const SignalBatch& fake, Rng& rng) {
  Interpolation out;
  out.theta.resize(real.rows());
  for (Index i = 0; i < real.rows(); ++i) out.theta[i] = rng.uniform();
  out.mixed = interpolate_pairs(real, fake, out.theta);
  return out;
}

}  // namespace sigaug
