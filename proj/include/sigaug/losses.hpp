#pragma once

#include <vector>

#include "sigaug/rng.hpp"
#include "sigaug/tensor.hpp"

namespace sigaug {

// Probabilities are clamped into [kProbClamp, 1 - kProbClamp] before logs.
inline constexpr double kProbClamp = 1e-7;

struct ScoreLoss {
  double value = 0.0;
  Eigen::VectorXd grad;  // d value / d scores
  bool clamped = false;
};

// -(1/M) sum D(fake): the generator objective without a logarithm.
ScoreLoss g_loss_adversarial(const Eigen::VectorXd& fake_scores);
// -(1/M) sum log D(fake)
ScoreLoss g_loss_log(const Eigen::VectorXd& fake_scores);

/// Convex weights of the hybrid generator loss. Construction fails unless
/// gamma1 + gamma2 == 1 (to 1e-12) and both are in [0, 1].
class HybridWeights {
 public:
  HybridWeights(double gamma1, double gamma2);
  double gamma1() const { return g1_; }
  double gamma2() const { return g2_; }

 private:
  double g1_, g2_;
};

// gamma1 * adversarial + gamma2 * spectral
double g_loss_hybrid(double adversarial, double spectral, const HybridWeights& w);
double g_loss_hybrid(double adversarial, double spectral, double gamma1, double gamma2);

struct BceLoss {
  double value = 0.0;
  Eigen::VectorXd grad_real, grad_fake;
  bool clamped = false;
};

// -(1/M) sum log D(real) - (1/M) sum log(1 - D(fake))
BceLoss d_loss_cgan(const Eigen::VectorXd& real_scores, const Eigen::VectorXd& fake_scores);

struct CrossEntropy {
  double value = 0.0;
  Eigen::MatrixXd grad;  // d value / d logits, classes x M
};

// Mean softmax cross-entropy of logits (classes x M) against target classes.
CrossEntropy softmax_cross_entropy(const Eigen::MatrixXd& logits, const std::vector<int>& targets);

// Equal-width bin of a normalised label in [0, 1].
int label_bin(double normalized_label, int bins);

struct AcganLosses {
  double generator = 0.0;
  double discriminator = 0.0;
  // Gradients of `discriminator` w.r.t. D outputs on the real/fake halves.
  Eigen::VectorXd d_grad_real_scores, d_grad_fake_scores;
  Eigen::MatrixXd d_grad_real_logits;
  // Gradients of `generator` w.r.t. D outputs on generated samples.
  Eigen::VectorXd g_grad_fake_scores;
  Eigen::MatrixXd g_grad_fake_logits;
};

/// L_G = -mean log D(fake) + alpha * CE(fake logits, target bins)
/// L_D = BCE(real, fake) + alpha * CE(real logits, true bins)
/// With alpha = 0 both reduce to the logarithmic CGAN losses.
AcganLosses acgan_losses(const Eigen::VectorXd& real_scores, const Eigen::VectorXd& fake_scores,
                         const Eigen::MatrixXd& class_logits_real, const Eigen::MatrixXd& class_logits_fake,
                         const std::vector<int>& true_bins, double alpha);

struct WcganLosses {
  double generator = 0.0;      // -mean critic(fake)
  double discriminator = 0.0;  // -(mean critic(real) - mean critic(fake)) + beta * penalty
};

WcganLosses wcgan_losses(const Eigen::VectorXd& critic_real, const Eigen::VectorXd& critic_fake, double penalty,
                         double beta);

struct Interpolation {
  SignalBatch mixed;
  Eigen::VectorXd theta;
};

// theta_i * real_i + (1 - theta_i) * fake_i, theta_i ~ U[0, 1], one per row.
Interpolation interpolate_pairs(const SignalBatch& real, const SignalBatch& fake, Rng& rng);
SignalBatch interpolate_pairs(const SignalBatch& real, const SignalBatch& fake, const Eigen::VectorXd& theta);

/// mean_i (||dD/dx(x_i)||_2 - 1)^2. `critic` is anything with
///   SignalBatch input_gradient(const SignalBatch&, const Eigen::VectorXd& labels)
/// returning the per-sample gradient of its scalar output.
template <typename Critic>
double gradient_penalty(Critic& critic, const SignalBatch& points, const Eigen::VectorXd& labels) {
  if constexpr (requires { critic.is_critic(); }) {
    if (!critic.is_critic()) throw std::invalid_argument("gradient penalty needs a WCGAN critic (linear head)");
  }
  const SignalBatch g = critic.input_gradient(points, labels);
  if (g.rows() == 0) throw ShapeError("gradient penalty: empty batch");
  return (g.rowwise().norm().array() - 1.0).square().mean();
}

}  // namespace sigaug
