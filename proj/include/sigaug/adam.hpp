#pragma once

#include <vector>

#include "sigaug/layers.hpp"

namespace sigaug {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moment buffers are created on the first step
/// and must keep matching the parameter list passed on every later step.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // Throws NumericalError naming the parameter if any gradient is non-finite;
  // in that case no parameter is modified.
  void step(std::vector<Parameter>& params);

  const AdamConfig& config() const { return config_; }
  long steps() const { return t_; }
  const std::vector<Eigen::MatrixXd>& first_moments() const { return m_; }
  const std::vector<Eigen::MatrixXd>& second_moments() const { return v_; }

  // Checkpoint restore.
  void restore(long t, std::vector<Eigen::MatrixXd> m, std::vector<Eigen::MatrixXd> v);

 private:
  AdamConfig config_;
  long t_ = 0;
  std::vector<Eigen::MatrixXd> m_, v_;
};

}  // namespace sigaug
