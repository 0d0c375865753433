#include "sigaug/layers.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sigaug {

std::string_view activation_name(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::leaky_relu: return "leaky_relu";
    case Activation::tanh: return "tanh";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::identity, Activation::relu, Activation::leaky_relu, Activation::tanh,
                 Activation::sigmoid}) {
    if (activation_name(a) == name) return a;
  }
  throw std::invalid_argument("unknown activation '" + std::string(name) + "'");
}

void activate(Eigen::MatrixXd& v, Activation a) {
  switch (a) {
    case Activation::identity: break;
    case Activation::relu: v = v.cwiseMax(0.0); break;
    case Activation::leaky_relu:
      v = v.unaryExpr([](double x) { return x > 0.0 ? x : kLeakySlope * x; });
      break;
    case Activation::tanh: v = v.array().tanh().matrix(); break;
    case Activation::sigmoid:
      v = v.unaryExpr([](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
      break;
  }
}

void activation_backward(Eigen::MatrixXd& grad, const Eigen::MatrixXd& y, Activation a) {
  switch (a) {
    case Activation::identity: break;
    case Activation::relu:
      grad = grad.binaryExpr(y, [](double g, double out) { return out > 0.0 ? g : 0.0; });
      break;
    case Activation::leaky_relu:
      grad = grad.binaryExpr(y, [](double g, double out) { return out > 0.0 ? g : kLeakySlope * g; });
      break;
    case Activation::tanh: grad.array() *= (1.0 - y.array().square()); break;
    case Activation::sigmoid: grad.array() *= y.array() * (1.0 - y.array()); break;
  }
}

ParamLayer::ParamLayer(Index rows, Index cols, Index bias_size, Activation a)
    : activation_(a),
      weight_(Eigen::MatrixXd::Zero(rows, cols)),
      bias_(Eigen::MatrixXd::Zero(bias_size, 1)),
      weight_grad_(Eigen::MatrixXd::Zero(rows, cols)),
      bias_grad_(Eigen::MatrixXd::Zero(bias_size, 1)) {}

void ParamLayer::init_gaussian(Rng& rng, double stddev) {
  for (Index i = 0; i < weight_.size(); ++i) weight_.data()[i] = rng.normal(0.0, stddev);
  bias_.setZero();
}

void ParamLayer::collect_parameters(std::vector<Parameter>& out, const std::string& prefix) {
  out.push_back({prefix + ".weight", &weight_, &weight_grad_});
  out.push_back({prefix + ".bias", &bias_, &bias_grad_});
}

void ParamLayer::hash_kinks(std::uint64_t& hash) const {
  if (activation_ != Activation::relu && activation_ != Activation::leaky_relu) return;
  for (Index i = 0; i < output_.size(); ++i) {
    hash ^= output_.data()[i] > 0.0 ? 0x9bU : 0x3cU;
    hash *= 1099511628211ULL;
  }
}

void ParamLayer::require_cache(const char* layer) const {
  if (!cache_valid_) {
    throw std::logic_error(std::string(layer) + ".backward called without a matching forward");
  }
}

// Dense ---------------------------------------------------------------------

Dense::Dense(Index in, Index out, Activation a) : ParamLayer(out, in, out, a) {}

FeatureMap Dense::forward(const FeatureMap& x) {
  if (x.length != 1 || x.channels() != weight_.cols()) {
    std::ostringstream os;
    os << "dense: input " << x.shape_string() << " does not match weight " << weight_.rows() << "x"
       << weight_.cols();
    throw ShapeError(os.str());
  }
  input_ = x.values;
  Eigen::MatrixXd y = matmul(weight_, input_);
  y.colwise() += bias_.col(0);
  activate(y, activation_);
  output_ = y;
  cache_valid_ = true;
  return FeatureMap(std::move(y), 1);
}

FeatureMap Dense::backward(const FeatureMap& upstream, BackwardFlags flags) {
  require_cache("dense");
  if (upstream.values.rows() != output_.rows() || upstream.values.cols() != output_.cols()) {
    throw ShapeError("dense.backward: upstream gradient " + upstream.shape_string() + " does not match output");
  }
  cache_valid_ = false;
  Eigen::MatrixXd g = upstream.values;
  activation_backward(g, output_, activation_);
  if (flags.params) {
    weight_grad_.noalias() += g * input_.transpose();
    bias_grad_.col(0) += g.rowwise().sum();
  }
  if (!flags.input) return {};
  Eigen::MatrixXd dx = matmul(weight_.transpose(), g);
  return FeatureMap(std::move(dx), 1);
}

std::string Dense::describe() const {
  std::ostringstream os;
  os << "dense " << in_features() << "->" << out_features() << " " << activation_name(activation_);
  return os.str();
}

// Conv1d --------------------------------------------------------------------

Conv1d::Conv1d(const ConvSpec& spec, Activation a)
    : ParamLayer(spec.out_channels, spec.in_channels * spec.kernel_size, spec.out_channels, a), spec_(spec) {
  spec_.validate();
}

FeatureMap Conv1d::forward(const FeatureMap& x) {
  if (x.channels() != spec_.in_channels) {
    std::ostringstream os;
    os << "conv1d: input " << x.shape_string() << " has " << x.channels() << " channels, layer expects "
       << spec_.in_channels;
    throw ShapeError(os.str());
  }
  const Index out_len = conv_output_length(x.length, spec_.kernel_size, spec_.stride, spec_.padding);
  cols_ = im2col(x, spec_.kernel_size, spec_.stride, spec_.padding);
  input_length_ = x.length;
  Eigen::MatrixXd y = matmul(weight_, cols_);
  y.colwise() += bias_.col(0);
  activate(y, activation_);
  output_ = y;
  cache_valid_ = true;
  return FeatureMap(std::move(y), out_len);
}

FeatureMap Conv1d::backward(const FeatureMap& upstream, BackwardFlags flags) {
  require_cache("conv1d");
  if (upstream.values.rows() != output_.rows() || upstream.values.cols() != output_.cols()) {
    throw ShapeError("conv1d.backward: upstream gradient " + upstream.shape_string() + " does not match output");
  }
  cache_valid_ = false;
  Eigen::MatrixXd g = upstream.values;
  activation_backward(g, output_, activation_);
  if (flags.params) {
    weight_grad_.noalias() += g * cols_.transpose();
    bias_grad_.col(0) += g.rowwise().sum();
  }
  if (!flags.input) return {};
  Eigen::MatrixXd dcols = matmul(weight_.transpose(), g);
  return col2im(dcols, spec_.in_channels, upstream.length, input_length_, spec_.kernel_size, spec_.stride,
                spec_.padding);
}

std::string Conv1d::describe() const {
  std::ostringstream os;
  os << "conv1d " << spec_.in_channels << "->" << spec_.out_channels << " K=" << spec_.kernel_size
     << " s=" << spec_.stride << " p=" << spec_.padding << " " << activation_name(activation_);
  return os.str();
}

// ConvTranspose1d -----------------------------------------------------------

ConvTranspose1d::ConvTranspose1d(const ConvSpec& spec, Activation a)
    : ParamLayer(spec.out_channels * spec.kernel_size, spec.in_channels, spec.out_channels, a), spec_(spec) {
  spec_.validate();
}

FeatureMap ConvTranspose1d::forward(const FeatureMap& x) {
  if (x.channels() != spec_.in_channels) {
    std::ostringstream os;
    os << "conv1d_transpose: input " << x.shape_string() << " has " << x.channels()
       << " channels, layer expects " << spec_.in_channels;
    throw ShapeError(os.str());
  }
  const Index out_len = conv_transpose_output_length(x.length, spec_.kernel_size, spec_.stride, spec_.padding);
  input_ = x.values;
  Eigen::MatrixXd cols = matmul(weight_, input_);
  FeatureMap y = col2im(cols, spec_.out_channels, x.length, out_len, spec_.kernel_size, spec_.stride,
                        spec_.padding);
  y.values.colwise() += bias_.col(0);
  activate(y.values, activation_);
  output_ = y.values;
  cache_valid_ = true;
  return y;
}

FeatureMap ConvTranspose1d::backward(const FeatureMap& upstream, BackwardFlags flags) {
  require_cache("conv1d_transpose");
  if (upstream.values.rows() != output_.rows() || upstream.values.cols() != output_.cols()) {
    throw ShapeError("conv1d_transpose.backward: upstream gradient " + upstream.shape_string() +
                     " does not match output");
  }
  cache_valid_ = false;
  FeatureMap g(upstream.values, upstream.length);
  activation_backward(g.values, output_, activation_);
  // im2col with the forward geometry is the adjoint of the scatter.
  const Eigen::MatrixXd gcols = im2col(g, spec_.kernel_size, spec_.stride, spec_.padding);
  if (flags.params) {
    weight_grad_.noalias() += gcols * input_.transpose();
    bias_grad_.col(0) += g.values.rowwise().sum();
  }
  if (!flags.input) return {};
  Eigen::MatrixXd dx = matmul(weight_.transpose(), gcols);
  return FeatureMap(std::move(dx), gcols.cols() / g.batch());
}

std::string ConvTranspose1d::describe() const {
  std::ostringstream os;
  os << "conv1d_transpose " << spec_.in_channels << "->" << spec_.out_channels << " K=" << spec_.kernel_size
     << " s=" << spec_.stride << " p=" << spec_.padding << " " << activation_name(activation_);
  return os.str();
}

std::string Unflatten::describe() const {
  std::ostringstream os;
  os << "unflatten " << channels_ << "x" << length_;
  return os.str();
}

// Sequential ----------------------------------------------------------------

Sequential::Sequential(const Sequential& other) {
  layers_.reserve(other.layers_.size());
  for (const auto& l : other.layers_) layers_.push_back(l->clone());
}

Sequential& Sequential::operator=(const Sequential& other) {
  if (this != &other) {
    Sequential tmp(other);
    layers_ = std::move(tmp.layers_);
  }
  return *this;
}

FeatureMap Sequential::forward(const FeatureMap& x) {
  FeatureMap h = x;
  for (auto& l : layers_) h = l->forward(h);
  return h;
}

FeatureMap Sequential::backward(const FeatureMap& upstream, BackwardFlags flags) {
  FeatureMap g = upstream;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    BackwardFlags f{flags.params, i == 0 ? flags.input : true};
    g = layers_[i]->backward(g, f);
  }
  return g;
}

void Sequential::collect_parameters(std::vector<Parameter>& out, const std::string& prefix) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    layers_[i]->collect_parameters(out, prefix + "." + std::to_string(i));
  }
}

void Sequential::hash_kinks(std::uint64_t& hash) const {
  for (const auto& l : layers_) l->hash_kinks(hash);
}

void zero_grads(std::vector<Parameter>& params) {
  for (auto& p : params) p.grad->setZero();
}

std::uint64_t checksum(const std::vector<Parameter>& params) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& p : params) h = checksum_bits(*p.value, h);
  return h;
}

}  // namespace sigaug
