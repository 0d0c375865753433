#include <sstream>

#include "sigaug/binary_io.hpp"
#include "sigaug/gan.hpp"

namespace sigaug {

namespace {

constexpr std::string_view kCheckpointMagic = "SGF1";
constexpr std::uint32_t kCheckpointVersion = 1;

void write_matrix(ByteWriter& w, const Eigen::MatrixXd& m) {
  w.u64(static_cast<std::uint64_t>(m.rows()));
  w.u64(static_cast<std::uint64_t>(m.cols()));
  for (Index i = 0; i < m.size(); ++i) w.f64(m.data()[i]);
}

Eigen::MatrixXd read_matrix(ByteReader& r, Index rows, Index cols, const std::string& what) {
  const auto fr = static_cast<Index>(r.u64()), fc = static_cast<Index>(r.u64());
  if (fr != rows || fc != cols) {
    std::ostringstream os;
    os << "checkpoint: " << what << " is " << fr << "x" << fc << " in file, model expects " << rows << "x" << cols;
    throw FormatError(os.str());
  }
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < m.size(); ++i) m.data()[i] = r.f64();
  return m;
}

void write_hyper(ByteWriter& w, const GanHyperParams& h) {
  w.u64(static_cast<std::uint64_t>(h.batch_size));
  w.f64(h.gamma1);
  w.f64(h.gamma2);
  w.f64(h.alpha);
  w.f64(h.beta);
  w.f64(h.clip);
  w.f64(h.lr_g);
  w.f64(h.lr_d);
  w.f64(h.adam_beta1);
  w.f64(h.adam_beta2);
  w.u64(static_cast<std::uint64_t>(h.epochs));
  w.u64(static_cast<std::uint64_t>(h.class_bins));
  w.u8(h.g_loss == GeneratorLoss::log ? 1 : 0);
  w.f64(h.init_std);
  w.u64(static_cast<std::uint64_t>(h.noise.latent));
  w.f64(h.noise.f_lo);
  w.f64(h.noise.f_hi);
  w.u64(static_cast<std::uint64_t>(h.stft.window));
  w.u64(static_cast<std::uint64_t>(h.stft.hop));
  w.u8(h.stft.window_kind == WindowKind::hann ? 1 : 0);
}

GanHyperParams read_hyper(ByteReader& r) {
  GanHyperParams h;
  h.batch_size = static_cast<Index>(r.u64());
  h.gamma1 = r.f64();
  h.gamma2 = r.f64();
  h.alpha = r.f64();
  h.beta = r.f64();
  h.clip = r.f64();
  h.lr_g = r.f64();
  h.lr_d = r.f64();
  h.adam_beta1 = r.f64();
  h.adam_beta2 = r.f64();
  h.epochs = static_cast<Index>(r.u64());
  h.class_bins = static_cast<Index>(r.u64());
  h.g_loss = r.u8() ? GeneratorLoss::log : GeneratorLoss::linear;
  h.init_std = r.f64();
  h.noise.latent = static_cast<Index>(r.u64());
  h.noise.f_lo = r.f64();
  h.noise.f_hi = r.f64();
  h.stft.window = static_cast<Index>(r.u64());
  h.stft.hop = static_cast<Index>(r.u64());
  h.stft.window_kind = r.u8() ? WindowKind::hann : WindowKind::rectangular;
  return h;
}

void write_net(ByteWriter& w, const std::vector<std::string>& layers, const std::vector<Parameter>& params) {
  w.u32(static_cast<std::uint32_t>(layers.size()));
  for (const auto& l : layers) w.str(l);
  w.u32(static_cast<std::uint32_t>(params.size()));
  for (const auto& p : params) {
    w.str(p.name);
    write_matrix(w, *p.value);
  }
}

void read_net(ByteReader& r, const std::vector<std::string>& layers, std::vector<Parameter>& params) {
  const auto n_layers = r.u32();
  if (n_layers != layers.size()) {
    throw FormatError("checkpoint: file lists " + std::to_string(n_layers) + " layers, model has " +
                      std::to_string(layers.size()));
  }
  for (const auto& expected : layers) {
    const std::string got = r.str();
    if (got != expected) throw FormatError("checkpoint: layer '" + got + "' does not match '" + expected + "'");
  }
  const auto n_params = r.u32();
  if (n_params != params.size()) throw FormatError("checkpoint: parameter count mismatch");
  for (auto& p : params) {
    const std::string name = r.str();
    if (name != p.name) throw FormatError("checkpoint: parameter '" + name + "' where '" + p.name + "' expected");
    *p.value = read_matrix(r, p.value->rows(), p.value->cols(), p.name);
  }
}

void write_adam(ByteWriter& w, const Adam& opt) {
  w.i64(opt.steps());
  w.u32(static_cast<std::uint32_t>(opt.first_moments().size()));
  for (std::size_t i = 0; i < opt.first_moments().size(); ++i) {
    write_matrix(w, opt.first_moments()[i]);
    write_matrix(w, opt.second_moments()[i]);
  }
}

void read_adam(ByteReader& r, Adam& opt, const std::vector<Parameter>& params) {
  const long t = static_cast<long>(r.i64());
  const auto blocks = r.u32();
  if (blocks != 0 && blocks != params.size()) throw FormatError("checkpoint: optimizer state block count mismatch");
  std::vector<Eigen::MatrixXd> m, v;
  for (std::uint32_t i = 0; i < blocks; ++i) {
    const auto& p = *params[i].value;
    m.push_back(read_matrix(r, p.rows(), p.cols(), params[i].name + " (adam m)"));
    v.push_back(read_matrix(r, p.rows(), p.cols(), params[i].name + " (adam v)"));
  }
  opt.restore(t, std::move(m), std::move(v));
}

}  // namespace

std::string encode_checkpoint(GanModel& model) {
  ByteWriter w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.str(variant_name(model.variant));
  w.u64(model.seed);
  w.u64(static_cast<std::uint64_t>(model.signal_length));
  write_hyper(w, model.hyper);
  w.f64(model.norm.signal_min);
  w.f64(model.norm.signal_max);
  w.f64(model.norm.label_min);
  w.f64(model.norm.label_max);
  w.f64(model.sample_rate);
  w.u64(static_cast<std::uint64_t>(model.epochs_trained));
  w.str(model.config_hash);
  for (auto word : model.rng.state()) w.u64(word);
  write_net(w, model.generator.describe(), model.generator.parameters());
  write_net(w, model.discriminator.describe(), model.discriminator.parameters());
  write_adam(w, model.g_opt);
  write_adam(w, model.d_opt);
  return w.data();
}

GanModel decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes, "checkpoint");
  const auto magic = r.bytes(4);
  if (magic != kCheckpointMagic) {
    throw FormatError("checkpoint: bad magic '" + std::string(magic) + "', expected SGF1");
  }
  const auto version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported format version " + std::to_string(version) + " (reader supports " +
                      std::to_string(kCheckpointVersion) + ")");
  }
  Variant variant;
  try {
    variant = parse_variant(r.str());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  const std::uint64_t seed = r.u64();
  const auto length = static_cast<Index>(r.u64());
  GanHyperParams hyper = read_hyper(r);
  GanModel model = [&] {
    try {
      return GanModel(variant, length, hyper, seed);
    } catch (const std::invalid_argument& e) {
      throw FormatError(std::string("checkpoint: invalid model header: ") + e.what());
    }
  }();
  model.norm.signal_min = r.f64();
  model.norm.signal_max = r.f64();
  model.norm.label_min = r.f64();
  model.norm.label_max = r.f64();
  model.sample_rate = r.f64();
  model.epochs_trained = static_cast<Index>(r.u64());
  model.config_hash = r.str();
  Rng::State state;
  for (auto& word : state) word = r.u64();
  model.rng = Rng::from_state(state);

  auto g_params = model.generator.parameters();
  auto d_params = model.discriminator.parameters();
  read_net(r, model.generator.describe(), g_params);
  read_net(r, model.discriminator.describe(), d_params);
  read_adam(r, model.g_opt, g_params);
  read_adam(r, model.d_opt, d_params);
  if (!r.at_end()) throw FormatError("checkpoint: trailing bytes after optimizer state");
  return model;
}

void checkpoint_save(GanModel& model, const std::string& path) { write_file(path, encode_checkpoint(model)); }

GanModel checkpoint_load(const std::string& path) { return decode_checkpoint(read_file(path)); }

}  // namespace sigaug
