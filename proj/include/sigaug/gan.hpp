#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sigaug/adam.hpp"
#include "sigaug/dataset.hpp"
#include "sigaug/layers.hpp"
#include "sigaug/losses.hpp"
#include "sigaug/rng.hpp"
#include "sigaug/stft.hpp"

namespace sigaug {

enum class Variant { cgan_dense, cgan_conv, acgan, wcgan, has_cgan };

std::string_view variant_name(Variant v);
Variant parse_variant(std::string_view name);

// linear: -mean D(fake); log: -mean log D(fake).
enum class GeneratorLoss { linear, log };

struct NoiseSpec {
  Index latent = 100;
  double f_lo = 0.5;  // cycles per latent vector
  double f_hi = 8.0;

  void validate() const;
  bool operator==(const NoiseSpec&) const = default;
};

// M x latent; row i is sin(2 pi f_i k / d + phi_i).
Eigen::MatrixXd sample_sinusoidal_noise(const NoiseSpec& spec, Rng& rng, Index count);

struct GanHyperParams {
  Index batch_size = 13;
  double gamma1 = 0.8;
  double gamma2 = 0.2;
  double alpha = 1.0;   // ACGAN classification weight
  double beta = 10.0;   // WCGAN penalty weight (reported)
  double clip = 0.01;   // WCGAN weight clip
  double lr_g = 2e-4;
  double lr_d = 2e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  Index epochs = 500;
  Index class_bins = 5;
  GeneratorLoss g_loss = GeneratorLoss::linear;
  double init_std = 0.02;
  NoiseSpec noise;
  StftSpec stft;

  // Throws std::invalid_argument; includes the gamma1 + gamma2 == 1 check.
  void validate() const;
  bool operator==(const GanHyperParams&) const = default;
};

// Transpose/strided conv geometry shared by both networks: length changes by 4x per layer.
inline constexpr Index kGanKernel = 20;
inline constexpr Index kGanStride = 4;
inline constexpr Index kGanPadding = 8;

/// Conditional generator. Input is the latent vector with the normalised
/// label appended; conv variants map it through a dense layer to a
/// 64-channel seed of length L/64 and then three transpose convolutions
/// (64->32->16->1), the dense variant uses three dense layers.
class Generator {
 public:
  Generator(Variant variant, Index signal_length, Index latent);

  void init(Rng& rng, double stddev);
  // z is M x latent, labels are normalised to [0, 1]. Output in (-1, 1).
  SignalBatch forward(const Eigen::MatrixXd& z, const Eigen::VectorXd& labels);
  void backward(const SignalBatch& grad);

  std::vector<Parameter> parameters();
  void hash_kinks(std::uint64_t& h) const { net_.hash_kinks(h); }
  std::vector<std::string> describe() const;
  Index signal_length() const { return length_; }
  Index latent() const { return latent_; }

 private:
  Sequential net_;
  Index length_, latent_;
  bool dense_;
};

struct DiscriminatorOutput {
  Eigen::VectorXd scores;          // M
  Eigen::MatrixXd class_logits;    // bins x M, ACGAN only
};

/// Conditional discriminator: signal plus a constant label channel through
/// three strided convolutions (2->16->32->64), then a scalar head (sigmoid,
/// or linear for the WCGAN critic) and for ACGAN a class-logit head.
class Discriminator {
 public:
  Discriminator(Variant variant, Index signal_length, Index class_bins);

  void init(Rng& rng, double stddev);
  DiscriminatorOutput forward(const SignalBatch& x, const Eigen::VectorXd& labels);
  // Returns d loss / d signal. `d_logits` may be empty when there is no class head.
  SignalBatch backward(const Eigen::VectorXd& d_scores, const Eigen::MatrixXd& d_logits, BackwardFlags flags);
  // Per-sample gradient of the scalar head w.r.t. the signal; parameter grads untouched.
  SignalBatch input_gradient(const SignalBatch& x, const Eigen::VectorXd& labels);

  void clip_weights(double bound);
  double max_abs_weight();
  std::vector<Parameter> parameters();
  void hash_kinks(std::uint64_t& h) const;
  std::vector<std::string> describe() const;
  bool has_class_head() const { return class_head_.has_value(); }
  // Unbounded scalar head (WCGAN critic).
  bool is_critic() const { return head_.activation() == Activation::identity; }

 private:
  Sequential trunk_;
  Dense head_;
  std::optional<Dense> class_head_;
  Index length_;
};

struct GanModel {
  GanModel(Variant variant, Index signal_length, GanHyperParams hyper, std::uint64_t seed);

  Variant variant;
  Index signal_length;
  GanHyperParams hyper;
  std::uint64_t seed;
  Generator generator;
  Discriminator discriminator;
  Adam g_opt, d_opt;
  Rng rng;
  Index epochs_trained = 0;
  NormalizationRecord norm;
  double sample_rate = 1.0;
  std::string config_hash;
};

// Normalised real data the trainer draws minibatches from.
struct TrainingData {
  SignalBatch signals;
  Eigen::VectorXd labels;
  std::vector<int> bins;
};

TrainingData make_training_data(const TrainSplit& train, const NormalizationRecord& norm, Index class_bins);

struct TrainLogEntry {
  Index epoch = 0;
  double d_loss = 0.0;
  double g_loss = 0.0;
  std::optional<double> spectral;          // HAS-CGAN only
  std::optional<double> gradient_penalty;  // WCGAN only
  double wall_seconds = 0.0;
  // Parameter checksums around the two phases.
  std::uint64_t g_at_start = 0, g_after_phase1 = 0;
  std::uint64_t d_after_phase1 = 0, d_after_phase2 = 0;
};

/// One epoch of two-phase training. Phase 1 updates only D over every
/// minibatch (fakes from the current G); phase 2 updates only G against the
/// resulting D. Throws NumericalError if any loss becomes non-finite.
TrainLogEntry train_epoch(GanModel& model, const TrainingData& data, Rng& rng);

using TrainLog = std::vector<TrainLogEntry>;

// epoch,d_loss,g_loss,spectral_component,gradient_penalty
void write_trainlog_csv(std::ostream& os, const TrainLog& log);

struct Generation {
  std::vector<LabeledSignal> samples;
  Index clamped_labels = 0;  // labels outside the training range, clamped before conditioning
};

/// Draws one signal per label (physical Ra units) and denormalises it with
/// the model's normalisation record.
Generation generate_labeled(GanModel& model, const std::vector<double>& labels, Rng& rng);

std::string encode_checkpoint(GanModel& model);
GanModel decode_checkpoint(std::string_view bytes);
void checkpoint_save(GanModel& model, const std::string& path);
GanModel checkpoint_load(const std::string& path);

}  // namespace sigaug
