#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sigaug/gradcheck.hpp"

namespace sigaug {

struct GradCheckLine {
  std::string name;
  GradCheckResult result;
  double tolerance = 1e-4;
  double seconds = 0.0;
  bool passed() const { return result.checked > 0 && result.max_relative_error < tolerance; }
};

struct GradCheckSuiteOptions {
  std::uint64_t seed = 7;
  // Test hook: scales every analytic gradient by 1.01 so that each line must fail.
  bool corrupt_gradients = false;
};

/// Finite-difference checks on reduced networks (signal length 64): each
/// layer kind on its own, then the generator and discriminator stacks of
/// every variant, the critic input gradient used by the gradient penalty, and
/// the generator through the spectral loss (window 16, tolerance 1e-3).
std::vector<GradCheckLine> run_gradcheck_suite(const GradCheckSuiteOptions& options = {});

void write_gradcheck_report(std::ostream& os, const std::vector<GradCheckLine>& lines);

}  // namespace sigaug
