// sigaug: command-line driver for the signal augmentation pipeline.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "sigaug/binary_io.hpp"
#include "sigaug/config.hpp"
#include "sigaug/errors.hpp"
#include "sigaug/gradcheck_suite.hpp"
#include "sigaug/pipeline.hpp"
#include "sigaug/sweep.hpp"

using namespace sigaug;

namespace {

enum Exit { kOk = 0, kVerifyFailed = 1, kUsage = 2, kNumerical = 3 };

struct Globals {
  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

RunConfig resolve_config(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_config(g.config_path);
  for (const auto& kv : g.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
    set_config_value(cfg, kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (g.seed) cfg.seed = *g.seed;
  cfg.validate();
  return cfg;
}

std::string require_out(const Globals& g, const char* what) {
  if (g.out.empty()) throw ConfigError(std::string("--out is required (") + what + ")");
  return g.out;
}

// Sidecar recording how an artifact was produced.
void write_meta(const std::string& artifact, const RunConfig& cfg, const std::string& command,
                const std::vector<std::pair<std::string, std::string>>& extra = {}) {
  std::ostringstream os;
  os << "command = " << command << "\nconfig_hash = " << config_hash(cfg) << "\n";
  for (const auto& [k, v] : extra) os << k << " = " << v << "\n";
  os << "# config\n" << serialize_config(cfg);
  write_file(artifact + ".meta", os.str());
}

std::string to_text(const std::function<void(std::ostream&)>& f) {
  std::ostringstream os;
  f(os);
  return os.str();
}

int cmd_synth(const Globals& g, const std::string& csv) {
  const RunConfig cfg = resolve_config(g);
  const std::string out = require_out(g, "dataset file");
  const Dataset ds = synth_dataset(cfg.data, cfg.seed);
  const std::string bytes = encode_dataset(ds);
  write_file(out, bytes);
  write_meta(out, cfg, "synth", {{"dataset_hash", fnv1a_hex(bytes)}});
  if (!csv.empty()) {
    write_file(csv, to_text([&](std::ostream& os) { export_csv(ds, os); }));
    write_meta(csv, cfg, "synth");
  }
  if (!g.quiet) {
    std::cout << "train=" << ds.train.size() << " test=" << ds.test.size() << " ra=[" << ds.norm.label_min << ", "
              << ds.norm.label_max << "] um\n"
              << "wrote " << out << " (fnv1a " << fnv1a_hex(bytes) << ")\n";
  }
  return kOk;
}

int cmd_train_gan(const Globals& g, const std::string& variant_name_arg, const std::string& data_path,
                  const std::string& log_path_arg) {
  const RunConfig cfg = resolve_config(g);
  const std::string out = require_out(g, "checkpoint file");
  const Variant variant = parse_variant(variant_name_arg);
  const Dataset ds = load_dataset(data_path);
  GanModel model = make_gan(variant, ds, cfg.gan, cfg.seed, config_hash(cfg));
  const Index every = std::max<Index>(1, cfg.gan.epochs / 10);
  const TrainLog log = train_gan(model, ds.train, cfg.gan.epochs, [&](const TrainLogEntry& e) {
    if (!g.quiet && (e.epoch % every == 0 || e.epoch == cfg.gan.epochs)) {
      std::cout << "epoch " << e.epoch << " d_loss=" << e.d_loss << " g_loss=" << e.g_loss;
      if (e.spectral) std::cout << " spectral=" << *e.spectral;
      if (e.gradient_penalty) std::cout << " penalty=" << *e.gradient_penalty;
      std::cout << '\n';
    }
  });
  const std::string bytes = encode_checkpoint(model);
  write_file(out, bytes);
  write_meta(out, cfg, "train-gan", {{"variant", std::string(variant_name(variant))},
                                     {"dataset_hash", fnv1a_hex(read_file(data_path))},
                                     {"checkpoint_hash", fnv1a_hex(bytes)}});
  const std::string log_path = log_path_arg.empty() ? out + ".trainlog.csv" : log_path_arg;
  write_file(log_path, to_text([&](std::ostream& os) { write_trainlog_csv(os, log); }));
  write_meta(log_path, cfg, "train-gan", {{"variant", std::string(variant_name(variant))}});
  if (!g.quiet) std::cout << "wrote " << out << " (fnv1a " << fnv1a_hex(bytes) << ") and " << log_path << '\n';
  return kOk;
}

int cmd_generate(const Globals& g, const std::string& ckpt_path, std::vector<double> labels, Index count) {
  const RunConfig cfg = resolve_config(g);
  const std::string out = require_out(g, "CSV file");
  GanModel model = checkpoint_load(ckpt_path);
  if (labels.empty()) {
    if (count < 1) throw ConfigError("generate needs --labels or --count >= 1");
    Rng pick(derive_seed(cfg.seed, 11));
    for (Index i = 0; i < count; ++i) labels.push_back(pick.uniform(model.norm.label_min, model.norm.label_max));
  }
  Rng rng(derive_seed(cfg.seed, 12));
  const Generation gen = generate_labeled(model, labels, rng);
  write_file(out, to_text([&](std::ostream& os) {
               os << "id,ra";
               for (Index j = 0; j < model.signal_length; ++j) os << ",s" << j;
               os << '\n' << std::setprecision(9);
               for (const auto& s : gen.samples) {
                 os << s.id << ',' << s.ra;
                 for (Index j = 0; j < s.signal.size(); ++j) os << ',' << s.signal[j];
                 os << '\n';
               }
             }));
  write_meta(out, cfg, "generate", {{"checkpoint_hash", fnv1a_hex(read_file(ckpt_path))}});
  if (!g.quiet) {
    std::cout << "generated " << gen.samples.size() << " signals";
    if (gen.clamped_labels) std::cout << " (" << gen.clamped_labels << " labels clamped to the training range)";
    std::cout << "\n";
  }
  return kOk;
}

int cmd_coherence(const Globals& g, const std::string& ckpt_path, const std::string& data_path, bool self_check) {
  const RunConfig cfg = resolve_config(g);
  const std::string out = require_out(g, "CSV file");
  const Dataset ds = load_dataset(data_path);
  const double high_rpm = high_frequency_threshold(cfg.data.rpm_levels);
  CoherenceStudy study;
  std::string label = "self";
  if (self_check) {
    study = self_coherence(ds, cfg.wc, high_rpm);
  } else {
    if (ckpt_path.empty()) throw ConfigError("coherence needs --checkpoint (or --self-check)");
    GanModel model = checkpoint_load(ckpt_path);
    label = std::string(variant_name(model.variant));
    Rng rng(derive_seed(cfg.seed, 13));
    study = coherence_study(model, ds, cfg.wc, high_rpm, rng);
  }
  write_file(out, to_text([&](std::ostream& os) { write_coherence_csv(os, study); }));
  std::ostringstream summary;
  summary << std::setprecision(9) << "variant,epochs,samples,aggregate_wc,high_frequency_wc,clamped_labels\n";
  Index epochs = 0;
  if (!self_check) epochs = checkpoint_load(ckpt_path).epochs_trained;
  summary << label << ',' << epochs << ',' << study.rows.size() << ',' << study.aggregate << ','
          << study.high_frequency_aggregate << ',' << study.clamped_labels << '\n';
  write_file(out + ".summary.csv", summary.str());
  write_meta(out, cfg, "coherence", {{"variant", label}});

  if (!g.quiet) {
    std::cout << std::fixed << std::setprecision(3) << label << ": mean WC " << study.aggregate
              << ", high-frequency subset " << study.high_frequency_aggregate << " over " << study.rows.size()
              << " test labels\n";
  }
  if (self_check) {
    double worst = 0.0;
    for (const auto& r : study.rows) worst = std::max(worst, std::abs(r.mean_wc - 1.0));
    if (!g.quiet) std::cout << "self-check: max |WC - 1| = " << std::scientific << worst << '\n';
    if (worst > 1e-6) return kVerifyFailed;
  }
  return kOk;
}

int cmd_sweep(const Globals& g, const std::string& ckpt_path, const std::string& data_path, const std::string& scales,
              const std::string& models, const std::string& seeds) {
  Globals local = g;
  if (!scales.empty()) local.overrides.push_back("sweep.scales=" + scales);
  if (!models.empty()) local.overrides.push_back("sweep.models=" + models);
  if (!seeds.empty()) local.overrides.push_back("sweep.seeds=" + seeds);
  const RunConfig cfg = resolve_config(local);
  const std::string out = require_out(g, "CSV file");
  const Dataset ds = load_dataset(data_path);
  GanModel model = checkpoint_load(ckpt_path);
  if (!g.quiet) {
    std::cout << "scales: ";
    for (std::size_t i = 0; i < cfg.sweep.scales.size(); ++i) std::cout << (i ? "," : "") << cfg.sweep.scales[i];
    std::cout << '\n';
  }
  const SweepReport report = run_sweep(ds, model, cfg.sweep, cfg.seed);
  write_file(out, to_text([&](std::ostream& os) { write_sweep_csv(os, report); }));

  std::vector<std::pair<std::string, std::string>> extra{
      {"checkpoint_hash", fnv1a_hex(read_file(ckpt_path))},
      {"checkpoint_variant", std::string(variant_name(model.variant))},
      {"dataset_hash", fnv1a_hex(read_file(data_path))},
      {"test_leakage", report.leakage_free ? "none" : "DETECTED"},
      {"predictors", "ridge = ridge regression on 12 signal features + machining parameters; "
                     "mlp = 2 hidden dense layers on the raw signal; cnn1d = 2 conv + 1 dense on the raw signal; "
                     "no attention-based predictor"},
      {"scale_definition", "scale k adds exactly k * |train| generated samples"}};
  for (const auto& [kind, k] : report.plateau) {
    extra.emplace_back("plateau." + std::string(predictor_name(kind)), k ? std::to_string(*k) : "none");
  }
  write_meta(out, cfg, "sweep", extra);

  if (!g.quiet) {
    std::cout << "kind     scale  median_mape%\n";
    for (PredictorKind kind : cfg.sweep.kinds) {
      std::vector<Index> sorted = cfg.sweep.scales;
      std::sort(sorted.begin(), sorted.end());
      sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
      for (Index k : sorted) {
        std::cout << std::left << std::setw(8) << predictor_name(kind) << std::right << std::setw(6) << k
                  << std::setw(14) << std::fixed << std::setprecision(3) << median_mape(report, kind, k) << '\n';
      }
      const auto& p = report.plateau.at(kind);
      std::cout << "plateau[" << predictor_name(kind) << "]: " << (p ? "k=" + std::to_string(*p) : "none") << '\n';
    }
    std::cout << "test-leakage: " << (report.leakage_free ? "none" : "DETECTED") << '\n';
  }
  return report.leakage_free ? kOk : kVerifyFailed;
}

int cmd_gradcheck(const Globals& g, bool inject_fault) {
  GradCheckSuiteOptions opt;
  opt.corrupt_gradients = inject_fault;
  const auto lines = run_gradcheck_suite(opt);
  const bool ok = std::all_of(lines.begin(), lines.end(), [](const GradCheckLine& l) { return l.passed(); });
  const std::string text = to_text([&](std::ostream& os) { write_gradcheck_report(os, lines); });
  if (!g.quiet) std::cout << text << (ok ? "all gradient checks passed\n" : "gradient check FAILED\n");
  if (!g.out.empty()) write_file(g.out, text);
  return ok ? kOk : kVerifyFailed;
}

int cmd_report(const Globals& g, const std::string& data_path, const std::vector<std::string>& ckpts,
               const std::string& sweep_csv) {
  std::ostringstream os;
  if (!data_path.empty()) {
    const Dataset ds = load_dataset(data_path);
    os << "dataset " << data_path << ": train=" << ds.train.size() << " test=" << ds.test.size()
       << " length=" << ds.length << " sample_rate=" << ds.sample_rate << " ra=[" << ds.norm.label_min << ", "
       << ds.norm.label_max << "]\n";
  }
  for (const auto& path : ckpts) {
    const GanModel m = checkpoint_load(path);
    os << "checkpoint " << path << ": variant=" << variant_name(m.variant) << " epochs=" << m.epochs_trained
       << " seed=" << m.seed << " config_hash=" << m.config_hash << "\n";
  }
  if (!sweep_csv.empty()) {
    std::istringstream in(read_file(sweep_csv));
    std::string line;
    std::getline(in, line);
    if (line != "kind,scale,train_size,seed,mape_percent") throw FormatError(sweep_csv + ": not a sweep CSV");
    std::map<std::pair<std::string, Index>, std::vector<double>> cells;
    while (std::getline(in, line)) {
      std::istringstream row(line);
      std::string kind, scale, size, seed, mape_text;
      std::getline(row, kind, ',');
      std::getline(row, scale, ',');
      std::getline(row, size, ',');
      std::getline(row, seed, ',');
      std::getline(row, mape_text, ',');
      cells[{kind, std::stol(scale)}].push_back(std::stod(mape_text));
    }
    os << "sweep " << sweep_csv << " (median MAPE % over seeds)\n";
    for (auto& [key, v] : cells) {
      std::sort(v.begin(), v.end());
      const double med = v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
      os << "  " << std::left << std::setw(8) << key.first << std::right << std::setw(4) << key.second << "  "
         << std::fixed << std::setprecision(3) << med << std::defaultfloat << '\n';
    }
  }
  if (os.str().empty()) throw ConfigError("report needs at least one of --data, --checkpoint, --sweep");
  if (!g.quiet) std::cout << os.str();
  if (!g.out.empty()) write_file(g.out, os.str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional GAN signal augmentation pipeline"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value configuration file");
  app.add_option("--set", g.overrides, "override one config key (key=value), repeatable");
  app.add_option("--seed", g.seed, "master seed (overrides the config)");
  app.add_option("--out", g.out, "output path");
  app.add_flag("--quiet", g.quiet, "suppress progress output");
  app.fallthrough();

  std::function<int()> run;

  auto* synth = app.add_subcommand("synth", "write a surrogate dataset");
  std::string csv;
  synth->add_option("--csv", csv, "also export the dataset as CSV");
  synth->callback([&] { run = [&] { return cmd_synth(g, csv); }; });

  auto* train = app.add_subcommand("train-gan", "train one GAN variant");
  std::string variant, data, log_path;
  train->add_option("--variant", variant, "cgan-dense | cgan-conv | acgan | wcgan | has-cgan")->required();
  train->add_option("--data", data, "dataset file")->required();
  train->add_option("--log", log_path, "trainlog CSV (default <out>.trainlog.csv)");
  train->callback([&] { run = [&] { return cmd_train_gan(g, variant, data, log_path); }; });

  auto* generate = app.add_subcommand("generate", "sample labelled signals from a checkpoint");
  std::string ckpt;
  std::vector<double> labels;
  Index count = 0;
  generate->add_option("--checkpoint", ckpt, "GAN checkpoint")->required();
  generate->add_option("--labels", labels, "Ra values")->delimiter(',');
  generate->add_option("--count", count, "number of labels drawn uniformly over the training range");
  generate->callback([&] { run = [&] { return cmd_generate(g, ckpt, labels, count); }; });

  auto* coherence = app.add_subcommand("coherence", "wavelet coherence of generated vs real test signals");
  bool self_check = false;
  coherence->add_option("--checkpoint", ckpt, "GAN checkpoint");
  coherence->add_option("--data", data, "dataset file")->required();
  coherence->add_flag("--self-check", self_check, "compare each real signal with itself");
  coherence->callback([&] { run = [&] { return cmd_coherence(g, ckpt, data, self_check); }; });

  auto* sweep = app.add_subcommand("sweep", "augmentation-scale sweep of roughness predictors");
  std::string scales, models, seeds;
  sweep->add_option("--checkpoint", ckpt, "trained GAN checkpoint")->required();
  sweep->add_option("--data", data, "dataset file")->required();
  sweep->add_option("--scales", scales, "comma-separated scales");
  sweep->add_option("--models", models, "comma-separated predictors: ridge, mlp, cnn1d");
  sweep->add_option("--seeds", seeds, "comma-separated seeds");
  sweep->callback([&] { run = [&] { return cmd_sweep(g, ckpt, data, scales, models, seeds); }; });

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient checks on reduced networks");
  bool inject = false;
  gradcheck->add_flag("--inject-fault", inject, "corrupt analytic gradients (negative control)");
  gradcheck->callback([&] { run = [&] { return cmd_gradcheck(g, inject); }; });

  auto* report = app.add_subcommand("report", "summarise datasets, checkpoints and sweep results");
  std::vector<std::string> ckpts;
  std::string sweep_csv;
  report->add_option("--data", data, "dataset file");
  report->add_option("--checkpoint", ckpts, "checkpoint file(s)");
  report->add_option("--sweep", sweep_csv, "sweep CSV");
  report->callback([&] { run = [&] { return cmd_report(g, data, ckpts, sweep_csv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return run();
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
}
