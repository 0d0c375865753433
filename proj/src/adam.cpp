#include "sigaug/adam.hpp"

#include <cmath>
#include <sstream>

#include "sigaug/errors.hpp"

namespace sigaug {

void Adam::step(std::vector<Parameter>& params) {
  for (const auto& p : params) {
    if (!p.grad->allFinite()) throw NumericalError("non-finite gradient in parameter '" + p.name + "'");
    if (p.grad->rows() != p.value->rows() || p.grad->cols() != p.value->cols()) {
      throw ShapeError("gradient shape does not match parameter '" + p.name + "'");
    }
  }
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
      v_.push_back(Eigen::MatrixXd::Zero(p.value->rows(), p.value->cols()));
    }
  }
  if (m_.size() != params.size()) {
    std::ostringstream os;
    os << "adam: state holds " << m_.size() << " blocks but " << params.size() << " parameters were passed";
    throw ShapeError(os.str());
  }
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto g = params[i].grad->array();
    m_[i].array() = b1 * m_[i].array() + (1.0 - b1) * g;
    v_[i].array() = b2 * v_[i].array() + (1.0 - b2) * g.square();
    params[i].value->array() -=
        config_.learning_rate * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
}

void Adam::restore(long t, std::vector<Eigen::MatrixXd> m, std::vector<Eigen::MatrixXd> v) {
  if (m.size() != v.size()) throw ShapeError("adam restore: moment lists differ in length");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace sigaug
