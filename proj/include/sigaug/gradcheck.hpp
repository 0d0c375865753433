#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sigaug/layers.hpp"

namespace sigaug {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  Index worst_index = -1;
  double worst_analytic = 0.0, worst_numeric = 0.0;
  Index checked = 0;
  // Entries whose +/- eps probes changed the ReLU/leaky-ReLU sign pattern;
  // central differences are not valid across a kink.
  Index skipped_kinks = 0;
};

/// Compares analytic gradients against central differences for every entry of
/// every parameter. `loss` must run a full forward pass and return the scalar
/// objective; `compute_grads` must zero and refill all gradients. `kinks`,
/// when given, returns a hash of the activation sign pattern after the most
/// recent forward pass.
///
/// Relative error per entry is |a - n| / max(|a|, |n|, floor) where floor is
/// 1e-7 times the largest analytic gradient magnitude (and at least 1e-12).
/// Entries whose two-point error exceeds 1e-7 are re-estimated with the
/// fourth-order central stencil at step 100 * eps, unless that wider stencil
/// crosses a kink.
GradCheckResult grad_check(std::vector<Parameter>& params, const std::function<double()>& loss,
                           const std::function<void()>& compute_grads, double eps = 1e-5,
                           const std::function<std::uint64_t()>& kinks = {});

}  // namespace sigaug
