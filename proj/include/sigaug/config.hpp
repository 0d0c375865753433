#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sigaug/dataset.hpp"
#include "sigaug/gan.hpp"
#include "sigaug/sweep.hpp"
#include "sigaug/wavelet.hpp"

namespace sigaug {

/// Every tunable of the pipeline. Text form is one `key = value` per line,
/// `#` starts a comment, lists are comma separated.
struct RunConfig {
  SurrogateConfig data;
  GanHyperParams gan;  // includes stft.* and the latent noise
  CoherenceSmoothing wc;
  SweepConfig sweep;   // includes ridge.* and predictor.*
  std::uint64_t seed = 0;

  // Cross-field checks; throws ConfigError.
  void validate() const;
};

// Throws ConfigError naming the line for unknown keys, duplicates and bad values.
RunConfig parse_config(std::string_view text);
// All keys, defaults included, in a fixed order.
std::string serialize_config(const RunConfig& config);
RunConfig load_config(const std::string& path);

std::vector<std::string> config_keys();
// Sets one key from its text form (used for command-line overrides).
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

// FNV-1a of the serialised form.
std::string config_hash(const RunConfig& config);

}  // namespace sigaug
