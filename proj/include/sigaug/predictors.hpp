#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "sigaug/dataset.hpp"
#include "sigaug/features.hpp"

namespace sigaug {

enum class PredictorKind { ridge, mlp, cnn1d };

std::string_view predictor_name(PredictorKind k);
PredictorKind parse_predictor(std::string_view name);

struct PredictorConfig {
  double ridge_lambda = 1.0;
  Index epochs = 300;
  double learning_rate = 1e-3;
  Index batch_size = 16;

  void validate() const;
};

/// Ridge regression with intercept on column-standardised inputs. The penalty
/// is scaled by the row count, n * lambda * I, so that repeating every row
/// leaves the solution unchanged.
class RidgeModel {
 public:
  // Throws NumericalError when the system is singular (only possible at lambda == 0).
  static RidgeModel fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda);

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
  // Coefficients and intercept in the original (unstandardised) units.
  Eigen::VectorXd coefficients() const { return weights_.cwiseQuotient(scale_); }
  double intercept() const { return y_mean_ - coefficients().dot(mean_); }

 private:
  Eigen::VectorXd mean_, scale_, weights_;
  double y_mean_ = 0.0;
};

// 12 signal features followed by rpm, feed, depth.
Eigen::MatrixXd feature_matrix(std::span<const LabeledSignal> samples);

class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual PredictorKind kind() const = 0;
  // Predicted Ra for each sample, in physical units.
  virtual Eigen::VectorXd predict(std::span<const LabeledSignal> samples) = 0;
};

std::unique_ptr<Predictor> train_predictor(PredictorKind kind, const TrainSplit& train, const PredictorConfig& config,
                                           std::uint64_t seed);

}  // namespace sigaug
