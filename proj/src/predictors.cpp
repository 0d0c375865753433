#include "sigaug/predictors.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sigaug/adam.hpp"
#include "sigaug/errors.hpp"
#include "sigaug/layers.hpp"
#include "sigaug/rng.hpp"

namespace sigaug {

std::string_view predictor_name(PredictorKind k) {
  switch (k) {
    case PredictorKind::ridge: return "ridge";
    case PredictorKind::mlp: return "mlp";
    case PredictorKind::cnn1d: return "cnn1d";
  }
  return "?";
}

PredictorKind parse_predictor(std::string_view name) {
  if (name == "ridge") return PredictorKind::ridge;
  if (name == "mlp") return PredictorKind::mlp;
  if (name == "cnn1d") return PredictorKind::cnn1d;
  throw ConfigError("unknown predictor '" + std::string(name) + "' (expected ridge, mlp or cnn1d)");
}

void PredictorConfig::validate() const {
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda)) throw ConfigError("ridge.lambda must be >= 0");
  if (epochs < 1) throw ConfigError("predictor.epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("predictor.lr must be > 0");
  if (batch_size < 1) throw ConfigError("predictor.batch must be >= 1");
}

namespace {

// Column mean and standard deviation; constant columns get unit scale.
void column_stats(const Eigen::MatrixXd& x, Eigen::VectorXd& mean, Eigen::VectorXd& scale) {
  mean = x.colwise().mean().transpose();
  scale.resize(x.cols());
  for (Index j = 0; j < x.cols(); ++j) {
    const double var = (x.col(j).array() - mean[j]).square().mean();
    scale[j] = var > 1e-24 * std::max(1.0, mean[j] * mean[j]) ? std::sqrt(var) : 1.0;
  }
}

Eigen::MatrixXd standardize(const Eigen::MatrixXd& x, const Eigen::VectorXd& mean, const Eigen::VectorXd& scale) {
  return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Eigen::MatrixXd params_matrix(std::span<const LabeledSignal> samples) {
  Eigen::MatrixXd p(static_cast<Index>(samples.size()), 3);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = samples[i].params;
    p.row(static_cast<Index>(i)) << m.spindle_rpm, m.feed_mm_min, m.depth_um;
  }
  return p;
}

Eigen::VectorXd labels_of(std::span<const LabeledSignal> samples) {
  Eigen::VectorXd y(static_cast<Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) y[static_cast<Index>(i)] = samples[i].ra;
  return y;
}

class RidgePredictor final : public Predictor {
 public:
  explicit RidgePredictor(RidgeModel m) : model_(std::move(m)) {}
  PredictorKind kind() const override { return PredictorKind::ridge; }
  Eigen::VectorXd predict(std::span<const LabeledSignal> samples) override {
    return model_.predict(feature_matrix(samples));
  }

 private:
  RidgeModel model_;
};

// Affine input/target scaling fitted on the training split.
struct Scaling {
  double signal_mean = 0.0, signal_scale = 1.0;
  Eigen::VectorXd param_mean, param_scale;
  double y_mean = 0.0, y_scale = 1.0;

  static Scaling fit(std::span<const LabeledSignal> samples) {
    Scaling s;
    double sum = 0.0, sq = 0.0;
    Index count = 0;
    for (const auto& x : samples) {
      sum += x.signal.sum();
      count += x.signal.size();
    }
    s.signal_mean = sum / static_cast<double>(count);
    for (const auto& x : samples) sq += (x.signal.array() - s.signal_mean).square().sum();
    const double sd = std::sqrt(sq / static_cast<double>(count));
    s.signal_scale = sd > 0.0 ? sd : 1.0;
    column_stats(params_matrix(samples), s.param_mean, s.param_scale);
    const Eigen::VectorXd y = labels_of(samples);
    s.y_mean = y.mean();
    const double ysd = std::sqrt((y.array() - s.y_mean).square().mean());
    s.y_scale = ysd > 1e-12 * std::abs(s.y_mean) ? ysd : (s.y_mean != 0.0 ? std::abs(s.y_mean) : 1.0);
    return s;
  }

  // Columns are samples.
  Eigen::MatrixXd signals(std::span<const LabeledSignal> samples) const {
    const Index length = samples.front().signal.size();
    Eigen::MatrixXd out(length, static_cast<Index>(samples.size()));
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].signal.size() != length) throw ShapeError("predictor: signals of unequal length");
      out.col(static_cast<Index>(i)) = (samples[i].signal.array() - signal_mean) / signal_scale;
    }
    return out;
  }
  Eigen::MatrixXd params(std::span<const LabeledSignal> samples) const {
    return standardize(params_matrix(samples), param_mean, param_scale).transpose();
  }
};

// Shared minibatch Adam loop for the two network predictors.
class NetPredictor : public Predictor {
 public:
  Eigen::VectorXd predict(std::span<const LabeledSignal> samples) override {
    if (samples.empty()) return {};
    const Eigen::RowVectorXd out = forward(scaling_.signals(samples), scaling_.params(samples));
    return (out.transpose().array() * scaling_.y_scale + scaling_.y_mean).matrix();
  }

  void train(std::span<const LabeledSignal> samples, const PredictorConfig& cfg, std::uint64_t seed) {
    scaling_ = Scaling::fit(samples);
    input_length_ = samples.front().signal.size();
    build(input_length_);
    Rng rng(seed);
    init(rng);
    const Eigen::MatrixXd x = scaling_.signals(samples);
    const Eigen::MatrixXd p = scaling_.params(samples);
    const Eigen::RowVectorXd t =
        ((labels_of(samples).array() - scaling_.y_mean) / scaling_.y_scale).matrix().transpose();

    Adam opt(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
    std::vector<Parameter> params = parameters();
    const auto n = static_cast<Index>(samples.size());
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    for (Index epoch = 0; epoch < cfg.epochs; ++epoch) {
      rng.shuffle(std::span<Index>(order));
      for (Index start = 0; start < n; start += cfg.batch_size) {
        const Index m = std::min(cfg.batch_size, n - start);
        Eigen::MatrixXd xb(x.rows(), m), pb(p.rows(), m);
        Eigen::RowVectorXd tb(m);
        for (Index j = 0; j < m; ++j) {
          const Index r = order[static_cast<std::size_t>(start + j)];
          xb.col(j) = x.col(r);
          pb.col(j) = p.col(r);
          tb[j] = t[r];
        }
        const Eigen::RowVectorXd out = forward(xb, pb);
        const Eigen::RowVectorXd diff = out - tb;
        if (!diff.allFinite()) {
          throw NumericalError(std::string(predictor_name(kind())) + " training diverged at epoch " +
                               std::to_string(epoch));
        }
        zero_grads(params);
        backward(2.0 / static_cast<double>(m) * diff);
        opt.step(params);
      }
    }
  }

 protected:
  virtual void build(Index length) = 0;
  virtual void init(Rng& rng) = 0;
  // x: length x M, p: 3 x M; returns 1 x M.
  virtual Eigen::RowVectorXd forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p) = 0;
  virtual void backward(const Eigen::RowVectorXd& grad) = 0;
  virtual std::vector<Parameter> parameters() = 0;

  static void he_init(ParamLayer& layer, Rng& rng, Index fan_in) {
    layer.init_gaussian(rng, std::sqrt(2.0 / static_cast<double>(fan_in)));
  }

  Scaling scaling_;
  Index input_length_ = 0;
};

class MlpPredictor final : public NetPredictor {
 public:
  PredictorKind kind() const override { return PredictorKind::mlp; }

 protected:
  void build(Index length) override {
    net_ = Sequential();
    net_.add<Dense>(length + 3, 32, Activation::relu);
    net_.add<Dense>(32, 16, Activation::relu);
    net_.add<Dense>(16, 1, Activation::identity);
  }
  void init(Rng& rng) override {
    he_init(static_cast<ParamLayer&>(net_[0]), rng, input_length_ + 3);
    he_init(static_cast<ParamLayer&>(net_[1]), rng, 32);
    static_cast<ParamLayer&>(net_[2]).init_gaussian(rng, std::sqrt(1.0 / 16.0));
  }
  Eigen::RowVectorXd forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p) override {
    Eigen::MatrixXd in(x.rows() + p.rows(), x.cols());
    in << x, p;
    return net_.forward(FeatureMap(std::move(in), 1)).values;
  }
  void backward(const Eigen::RowVectorXd& grad) override {
    net_.backward(FeatureMap(Eigen::MatrixXd(grad), 1), BackwardFlags{true, false});
  }
  std::vector<Parameter> parameters() override {
    std::vector<Parameter> out;
    net_.collect_parameters(out, "mlp");
    return out;
  }

 private:
  Sequential net_;
};

// Two strided convolutions over the raw signal, then one dense layer over the
// flattened maps concatenated with the machining parameters.
class CnnPredictor final : public NetPredictor {
 public:
  PredictorKind kind() const override { return PredictorKind::cnn1d; }

 protected:
  void build(Index length) override {
    const ConvSpec c1{1, 8, 20, 4, 8}, c2{8, 16, 20, 4, 8};
    trunk_ = Sequential();
    trunk_.add<Conv1d>(c1, Activation::relu);
    trunk_.add<Conv1d>(c2, Activation::relu);
    trunk_.add<Flatten>();
    flat_ = 16 * conv_output_length(conv_output_length(length, 20, 4, 8), 20, 4, 8);
    head_ = Dense(flat_ + 3, 1, Activation::identity);
  }
  void init(Rng& rng) override {
    he_init(static_cast<ParamLayer&>(trunk_[0]), rng, 20);
    he_init(static_cast<ParamLayer&>(trunk_[1]), rng, 8 * 20);
    head_.init_gaussian(rng, std::sqrt(1.0 / static_cast<double>(flat_ + 3)));
  }
  Eigen::RowVectorXd forward(const Eigen::MatrixXd& x, const Eigen::MatrixXd& p) override {
    // x columns are samples; a 1-channel map lays them out end to end.
    FeatureMap seq(Eigen::Map<const Eigen::MatrixXd>(x.data(), 1, x.size()), x.rows());
    const FeatureMap flat = trunk_.forward(seq);
    Eigen::MatrixXd in(flat_ + 3, x.cols());
    in << flat.values, p;
    return head_.forward(FeatureMap(std::move(in), 1)).values;
  }
  void backward(const Eigen::RowVectorXd& grad) override {
    const FeatureMap g = head_.backward(FeatureMap(Eigen::MatrixXd(grad), 1), BackwardFlags{true, true});
    trunk_.backward(FeatureMap(g.values.topRows(flat_), 1), BackwardFlags{true, false});
  }
  std::vector<Parameter> parameters() override {
    std::vector<Parameter> out;
    trunk_.collect_parameters(out, "cnn");
    head_.collect_parameters(out, "cnn.head");
    return out;
  }

 private:
  Sequential trunk_;
  Dense head_{1, 1, Activation::identity};
  Index flat_ = 0;
};

}  // namespace

RidgeModel RidgeModel::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double lambda) {
  if (x.rows() == 0 || x.rows() != y.size()) throw ShapeError("ridge: need one target per non-empty row");
  if (!(lambda >= 0.0)) throw ShapeError("ridge: lambda must be >= 0");
  RidgeModel m;
  column_stats(x, m.mean_, m.scale_);
  const Eigen::MatrixXd z = standardize(x, m.mean_, m.scale_);
  m.y_mean_ = y.mean();
  const auto n = static_cast<double>(x.rows());
  Eigen::MatrixXd gram = z.transpose() * z;
  gram.diagonal().array() += n * lambda;
  const Eigen::VectorXd rhs = z.transpose() * (y.array() - m.y_mean_).matrix();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(gram);
  qr.setThreshold(1e-12);
  if (qr.rank() < gram.rows()) {
    throw NumericalError("ridge: normal equations are singular (rank " + std::to_string(qr.rank()) + " of " +
                         std::to_string(gram.rows()) + "); raise ridge.lambda above 0");
  }
  m.weights_ = qr.solve(rhs);
  return m;
}

Eigen::VectorXd RidgeModel::predict(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean_.size()) throw ShapeError("ridge: input has the wrong number of columns");
  return (standardize(x, mean_, scale_) * weights_).array() + y_mean_;
}

Eigen::MatrixXd feature_matrix(std::span<const LabeledSignal> samples) {
  Eigen::MatrixXd out(static_cast<Index>(samples.size()), FeatureVector::kSize + 3);
  const Eigen::MatrixXd p = params_matrix(samples);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const auto r = static_cast<Index>(i);
    out.row(r).head(FeatureVector::kSize) =
        extract_features(std::span<const double>(s.signal.data(), static_cast<std::size_t>(s.signal.size())),
                         s.sample_rate)
            .to_vector()
            .transpose();
    out.row(r).tail(3) = p.row(r);
  }
  return out;
}

std::unique_ptr<Predictor> train_predictor(PredictorKind kind, const TrainSplit& train, const PredictorConfig& config,
                                           std::uint64_t seed) {
  config.validate();
  if (train.empty()) throw ShapeError("train_predictor: empty training split");
  const std::span<const LabeledSignal> samples(train.samples);
  switch (kind) {
    case PredictorKind::ridge:
      return std::make_unique<RidgePredictor>(
          RidgeModel::fit(feature_matrix(samples), labels_of(samples), config.ridge_lambda));
    case PredictorKind::mlp: {
      auto p = std::make_unique<MlpPredictor>();
      p->train(samples, config, seed);
      return p;
    }
    case PredictorKind::cnn1d: {
      auto p = std::make_unique<CnnPredictor>();
      p->train(samples, config, seed);
      return p;
    }
  }
  throw ShapeError("train_predictor: unknown kind");
}

}  // namespace sigaug
