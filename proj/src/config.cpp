#include "sigaug/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include "sigaug/binary_io.hpp"
#include "sigaug/errors.hpp"

namespace sigaug {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.size() == 1 && out[0].empty()) out.clear();
  return out;
}

double to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("expected a finite number, got '" + std::string(s) + "'");
  }
  return v;
}

template <typename Int>
Int to_int(std::string_view s) {
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw ConfigError("expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest form that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += f(items[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

template <typename Get>
Field real_field(std::string key, Get ref) {
  return {key, [ref](const RunConfig& c) { return fmt(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, std::string_view v) { ref(c) = to_double(v); }};
}

template <typename Get>
Field int_field(std::string key, Get ref) {
  return {key, [ref](const RunConfig& c) { return std::to_string(ref(const_cast<RunConfig&>(c))); },
          [ref](RunConfig& c, std::string_view v) { ref(c) = to_int<Index>(v); }};
}

template <typename Get>
Field real_list(std::string key, Get ref) {
  return {key, [ref](const RunConfig& c) { return join(ref(const_cast<RunConfig&>(c)), fmt); },
          [ref](RunConfig& c, std::string_view v) {
            std::vector<double> out;
            for (auto item : split_list(v)) out.push_back(to_double(item));
            ref(c) = std::move(out);
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
#define SIGAUG_REF(expr) [](RunConfig& c) -> auto& { return c.expr; }
    f.push_back(int_field("data.length", SIGAUG_REF(data.length)));
    f.push_back(real_field("data.sample_rate", SIGAUG_REF(data.sample_rate)));
    f.push_back(real_list("data.rpm_levels", SIGAUG_REF(data.rpm_levels)));
    f.push_back(real_list("data.feed_levels", SIGAUG_REF(data.feed_levels)));
    f.push_back(real_list("data.depth_levels", SIGAUG_REF(data.depth_levels)));
    f.push_back(int_field("data.train_count", SIGAUG_REF(data.train_count)));
    f.push_back(int_field("data.test_count", SIGAUG_REF(data.test_count)));
    f.push_back(real_field("data.ra_coefficient", SIGAUG_REF(data.ra_coefficient)));
    f.push_back(real_field("data.depth_reference", SIGAUG_REF(data.depth_reference)));
    f.push_back(real_field("data.label_noise", SIGAUG_REF(data.label_noise)));
    f.push_back(real_field("data.amplitude", SIGAUG_REF(data.amplitude)));
    f.push_back(real_field("data.gain_floor", SIGAUG_REF(data.gain_floor)));
    f.push_back(real_field("data.ra_reference", SIGAUG_REF(data.ra_reference)));
    f.push_back(int_field("data.harmonics", SIGAUG_REF(data.harmonics)));
    f.push_back(real_field("data.harmonic_decay", SIGAUG_REF(data.harmonic_decay)));
    f.push_back(real_field("data.noise_ratio", SIGAUG_REF(data.noise_ratio)));

    f.push_back(int_field("stft.window", SIGAUG_REF(gan.stft.window)));
    f.push_back(int_field("stft.hop", SIGAUG_REF(gan.stft.hop)));
    f.push_back({"stft.window_fn", [](const RunConfig& c) { return std::string(window_name(c.gan.stft.window_kind)); },
                 [](RunConfig& c, std::string_view v) { c.gan.stft.window_kind = parse_window(v); }});

    f.push_back(real_field("wc.time_width", SIGAUG_REF(wc.time_width)));
    f.push_back(int_field("wc.scale_window", SIGAUG_REF(wc.scale_window)));

    f.push_back(int_field("gan.batch_size", SIGAUG_REF(gan.batch_size)));
    f.push_back(real_field("gan.gamma1", SIGAUG_REF(gan.gamma1)));
    f.push_back(real_field("gan.gamma2", SIGAUG_REF(gan.gamma2)));
    f.push_back(real_field("gan.alpha", SIGAUG_REF(gan.alpha)));
    f.push_back(real_field("gan.beta", SIGAUG_REF(gan.beta)));
    f.push_back(real_field("gan.clip", SIGAUG_REF(gan.clip)));
    f.push_back(real_field("gan.lr_g", SIGAUG_REF(gan.lr_g)));
    f.push_back(real_field("gan.lr_d", SIGAUG_REF(gan.lr_d)));
    f.push_back(real_field("gan.adam_beta1", SIGAUG_REF(gan.adam_beta1)));
    f.push_back(real_field("gan.adam_beta2", SIGAUG_REF(gan.adam_beta2)));
    f.push_back(int_field("gan.epochs", SIGAUG_REF(gan.epochs)));
    f.push_back(int_field("gan.class_bins", SIGAUG_REF(gan.class_bins)));
    f.push_back({"gan.g_loss",
                 [](const RunConfig& c) { return std::string(c.gan.g_loss == GeneratorLoss::log ? "log" : "linear"); },
                 [](RunConfig& c, std::string_view v) {
                   if (v == "linear") c.gan.g_loss = GeneratorLoss::linear;
                   else if (v == "log") c.gan.g_loss = GeneratorLoss::log;
                   else throw ConfigError("gan.g_loss must be linear or log, got '" + std::string(v) + "'");
                 }});
    f.push_back(real_field("gan.init_std", SIGAUG_REF(gan.init_std)));
    f.push_back(int_field("gan.latent", SIGAUG_REF(gan.noise.latent)));
    f.push_back(real_field("gan.noise_f_lo", SIGAUG_REF(gan.noise.f_lo)));
    f.push_back(real_field("gan.noise_f_hi", SIGAUG_REF(gan.noise.f_hi)));

    f.push_back(real_field("ridge.lambda", SIGAUG_REF(sweep.predictor.ridge_lambda)));
    f.push_back(int_field("predictor.epochs", SIGAUG_REF(sweep.predictor.epochs)));
    f.push_back(real_field("predictor.lr", SIGAUG_REF(sweep.predictor.learning_rate)));
    f.push_back(int_field("predictor.batch", SIGAUG_REF(sweep.predictor.batch_size)));

    f.push_back({"sweep.scales",
                 [](const RunConfig& c) { return join(c.sweep.scales, [](Index k) { return std::to_string(k); }); },
                 [](RunConfig& c, std::string_view v) {
                   c.sweep.scales.clear();
                   for (auto item : split_list(v)) c.sweep.scales.push_back(to_int<Index>(item));
                 }});
    f.push_back({"sweep.models",
                 [](const RunConfig& c) {
                   return join(c.sweep.kinds, [](PredictorKind k) { return std::string(predictor_name(k)); });
                 },
                 [](RunConfig& c, std::string_view v) {
                   c.sweep.kinds.clear();
                   for (auto item : split_list(v)) c.sweep.kinds.push_back(parse_predictor(item));
                 }});
    f.push_back({"sweep.seeds",
                 [](const RunConfig& c) {
                   return join(c.sweep.seeds, [](std::uint64_t s) { return std::to_string(s); });
                 },
                 [](RunConfig& c, std::string_view v) {
                   c.sweep.seeds.clear();
                   for (auto item : split_list(v)) c.sweep.seeds.push_back(to_int<std::uint64_t>(item));
                 }});
    f.push_back({"seed", [](const RunConfig& c) { return std::to_string(c.seed); },
                 [](RunConfig& c, std::string_view v) { c.seed = to_int<std::uint64_t>(v); }});
#undef SIGAUG_REF
    return f;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError("unknown config key '" + std::string(key) + "'");
}

}  // namespace

void RunConfig::validate() const {
  try {
    data.validate();
    gan.validate();
    sweep.validate();
    if (data.length % 64 != 0) throw ConfigError("data.length must be a multiple of 64");
    gan.stft.validate(data.length);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(wc.time_width > 0.0)) throw ConfigError("wc.time_width must be > 0");
  if (wc.scale_window < 1 || wc.scale_window % 2 == 0) throw ConfigError("wc.scale_window must be odd and >= 1");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(f.key);
  return out;
}

void set_config_value(RunConfig& config, std::string_view key, std::string_view value) {
  const Field& f = find_field(key);
  try {
    f.set(config, trim(value));
  } catch (const std::exception& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second) throw ConfigError(where + "duplicate key '" + std::string(key) + "'");
    try {
      set_config_value(config, key, line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  config.validate();
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(config) + "\n";
  return out;
}

RunConfig load_config(const std::string& path) {
  try {
    return parse_config(read_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(serialize_config(config)); }

}  // namespace sigaug
