#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "sigaug/conv.hpp"
#include "sigaug/rng.hpp"
#include "sigaug/tensor.hpp"

namespace sigaug {

enum class Activation { identity, relu, leaky_relu, tanh, sigmoid };

inline constexpr double kLeakySlope = 0.2;

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

void activate(Eigen::MatrixXd& values, Activation a);
// grad <- grad * f'(pre), where f' is recovered from the post-activation output.
void activation_backward(Eigen::MatrixXd& grad, const Eigen::MatrixXd& output, Activation a);

// Non-owning view of one parameter block and its gradient accumulator.
struct Parameter {
  std::string name;
  Eigen::MatrixXd* value;
  Eigen::MatrixXd* grad;
};

struct BackwardFlags {
  bool params = true;  // accumulate parameter gradients
  bool input = true;   // return the gradient w.r.t. the layer input
};

class Layer {
 public:
  virtual ~Layer() = default;

  virtual FeatureMap forward(const FeatureMap& x) = 0;
  // Requires a preceding forward(); consumes its cache.
  virtual FeatureMap backward(const FeatureMap& upstream, BackwardFlags flags = {}) = 0;

  virtual void collect_parameters(std::vector<Parameter>& out, const std::string& prefix) { (void)out, (void)prefix; }
  // Folds the sign pattern of piecewise-linear activations into `hash`.
  virtual void hash_kinks(std::uint64_t& hash) const { (void)hash; }
  virtual std::string describe() const = 0;
  virtual std::unique_ptr<Layer> clone() const = 0;
};

// Shared state of the three parameterised layer kinds.
class ParamLayer : public Layer {
 public:
  Activation activation() const { return activation_; }
  const Eigen::MatrixXd& weight() const { return weight_; }
  const Eigen::MatrixXd& bias() const { return bias_; }
  Eigen::MatrixXd& weight() { return weight_; }
  Eigen::MatrixXd& bias() { return bias_; }

  // Gaussian weights, zero bias.
  void init_gaussian(Rng& rng, double stddev);
  void collect_parameters(std::vector<Parameter>& out, const std::string& prefix) override;
  void hash_kinks(std::uint64_t& hash) const override;

 protected:
  ParamLayer(Index weight_rows, Index weight_cols, Index bias_size, Activation a);
  void require_cache(const char* layer) const;

  Activation activation_;
  Eigen::MatrixXd weight_, bias_;
  Eigen::MatrixXd weight_grad_, bias_grad_;
  Eigen::MatrixXd output_;  // post-activation, kept for backward
  bool cache_valid_ = false;
};

/// y = act(W x + b) on feature maps of length 1 (one column per sample).
class Dense final : public ParamLayer {
 public:
  Dense(Index in_features, Index out_features, Activation a);

  FeatureMap forward(const FeatureMap& x) override;
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags flags = {}) override;
  std::string describe() const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

  Index in_features() const { return weight_.cols(); }
  Index out_features() const { return weight_.rows(); }

 private:
  Eigen::MatrixXd input_;
};

/// Strided, padded 1D cross-correlation. Weight is F x (C_in * K).
class Conv1d final : public ParamLayer {
 public:
  Conv1d(const ConvSpec& spec, Activation a);

  FeatureMap forward(const FeatureMap& x) override;
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags flags = {}) override;
  std::string describe() const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1d>(*this); }

  const ConvSpec& spec() const { return spec_; }

 private:
  ConvSpec spec_;
  Eigen::MatrixXd cols_;
  Index input_length_ = 0;
};

/// Transposed 1D convolution (scatter-add of kernel copies). Weight is (F * K) x C_in.
class ConvTranspose1d final : public ParamLayer {
 public:
  ConvTranspose1d(const ConvSpec& spec, Activation a);

  FeatureMap forward(const FeatureMap& x) override;
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags flags = {}) override;
  std::string describe() const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<ConvTranspose1d>(*this); }

  const ConvSpec& spec() const { return spec_; }

 private:
  ConvSpec spec_;
  Eigen::MatrixXd input_;
};

// (C*L x B) dense output -> (C x B*L) sequence.
class Unflatten final : public Layer {
 public:
  Unflatten(Index channels, Index length) : channels_(channels), length_(length) {}
  FeatureMap forward(const FeatureMap& x) override { return unflatten(x, channels_, length_); }
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags) override { return flatten(upstream); }
  std::string describe() const override;
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Unflatten>(*this); }

 private:
  Index channels_, length_;
};

class Flatten final : public Layer {
 public:
  FeatureMap forward(const FeatureMap& x) override {
    channels_ = x.channels();
    length_ = x.length;
    return flatten(x);
  }
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags) override {
    return unflatten(upstream, channels_, length_);
  }
  std::string describe() const override { return "flatten"; }
  std::unique_ptr<Layer> clone() const override { return std::make_unique<Flatten>(*this); }

 private:
  Index channels_ = 0, length_ = 0;
};

/// Ordered layer stack. Copyable (deep copy).
class Sequential {
 public:
  Sequential() = default;
  Sequential(const Sequential& other);
  Sequential& operator=(const Sequential& other);
  Sequential(Sequential&&) noexcept = default;
  Sequential& operator=(Sequential&&) noexcept = default;

  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  FeatureMap forward(const FeatureMap& x);
  FeatureMap backward(const FeatureMap& upstream, BackwardFlags flags = {});

  void collect_parameters(std::vector<Parameter>& out, const std::string& prefix);
  void hash_kinks(std::uint64_t& hash) const;
  std::size_t size() const { return layers_.size(); }
  Layer& operator[](std::size_t i) { return *layers_[i]; }
  const Layer& operator[](std::size_t i) const { return *layers_[i]; }

 private:
  std::vector<std::unique_ptr<Layer>> layers_;
};

void zero_grads(std::vector<Parameter>& params);
std::uint64_t checksum(const std::vector<Parameter>& params);

}  // namespace sigaug
