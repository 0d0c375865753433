#include "sigaug/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace sigaug {

namespace {

// Above this, a two-point estimate is re-derived with the fourth-order stencil.
constexpr double kRefineAbove = 1e-7;
constexpr double kRefineStep = 100.0;

}  // namespace

GradCheckResult grad_check(std::vector<Parameter>& params, const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, double eps,
                           const std::function<std::uint64_t()>& kinks) {
  compute_grads();
  std::vector<Eigen::MatrixXd> analytic;
  double largest = 0.0;
  for (const auto& p : params) {
    analytic.push_back(*p.grad);
    largest = std::max(largest, p.grad->cwiseAbs().maxCoeff());
  }
  const double floor = std::max(1e-12, 1e-7 * largest);

  std::uint64_t base_pattern = 0;
  if (kinks) {
    loss();
    base_pattern = kinks();
  }
  auto probe = [&](double& w, double at, bool& same) {
    const double orig = w;
    w = at;
    const double v = loss();
    if (kinks && kinks() != base_pattern) same = false;
    w = orig;
    return v;
  };
  auto rel = [&](double a, double n) { return std::abs(a - n) / std::max({std::abs(a), std::abs(n), floor}); };

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Eigen::MatrixXd& w = *params[pi].value;
    for (Index i = 0; i < w.size(); ++i) {
      double& wi = w.data()[i];
      const double x = wi;
      bool same = true;
      const double plus = probe(wi, x + eps, same);
      const double minus = probe(wi, x - eps, same);
      if (!same) {
        ++result.skipped_kinks;
        continue;
      }
      const double a = analytic[pi].data()[i];
      double numeric = (plus - minus) / (2.0 * eps);
      double err = rel(a, numeric);
      if (err > kRefineAbove) {
        // Tiny entries are dominated by rounding in the two-point quotient.
        const double h = kRefineStep * eps;
        bool wide = true;
        const double p1 = probe(wi, x + h, wide), m1 = probe(wi, x - h, wide);
        const double p2 = probe(wi, x + 2 * h, wide), m2 = probe(wi, x - 2 * h, wide);
        if (wide) {
          numeric = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
          err = rel(a, numeric);
        }
      }
      ++result.checked;
      if (err >= result.max_relative_error) {
        result.max_relative_error = err;
        result.worst_parameter = params[pi].name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace sigaug
