#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "atp/error.hpp"
#include "atp/features.hpp"
#include "atp/harness.hpp"
#include "atp/image_io.hpp"
#include "atp/synth.hpp"

namespace atp::cli {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<std::size_t> working_size;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "Experiment config JSON");
  if (config_required) opt->required();
  opt->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "Override the master seed");
  cmd->add_option("--out", flags.out, "Output directory (overrides output_dir)");
  cmd->add_option("--working-size", flags.working_size, "Override the square working size in pixels")
      ->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const CommonFlags& flags) {
  ExperimentConfig config = flags.config.empty() ? ExperimentConfig{} : load_config(flags.config);
  if (flags.seed) config.seed = *flags.seed;
  if (!flags.out.empty()) config.output_dir = flags.out;
  if (flags.working_size) config.working_size = *flags.working_size;
  if (config.output_dir.empty()) config.output_dir = ".";
  config.validate();
  return config;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::IoError, "cannot create " + dir.string());
}

std::vector<GrayImage> images_of(const std::vector<Sample>& samples) {
  std::vector<GrayImage> out;
  for (const auto& s : samples) out.push_back(s.image);
  return out;
}

std::vector<int> labels_of(const std::vector<Sample>& samples) {
  std::vector<int> out;
  for (const auto& s : samples) out.push_back(s.label);
  return out;
}

ThresholdTable thresholds_for(const ExperimentConfig& config, const std::string& override_path,
                              const std::vector<Sample>& train) {
  if (!override_path.empty()) return load_threshold_table(override_path);
  return resolve_thresholds(config, train);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adaptive thresholding pattern fingerprint forgery detection"};
  app.name("atp");
  app.require_subcommand(1);

  CommonFlags derive_flags, extract_flags, train_flags, eval_flags, sweep_flags, synth_flags;
  std::string reference, thresholds_path, model_path, distortion_json;
  std::optional<std::size_t> synth_count;

  auto* derive_cmd = app.add_subcommand("derive-thresholds", "Derive the threshold table and write thresholds.json");
  add_common(derive_cmd, derive_flags, true);
  derive_cmd->add_option("--reference", reference, "Reference image (default: first real training image)")
      ->check(CLI::ExistingFile);

  auto* extract_cmd = app.add_subcommand("extract", "Write features.csv and features.bin for the whole dataset");
  add_common(extract_cmd, extract_flags, true);
  extract_cmd->add_option("--thresholds", thresholds_path, "Threshold table JSON to use")->check(CLI::ExistingFile);

  auto* train_cmd = app.add_subcommand("train", "Train on the clean training split; writes model.json");
  add_common(train_cmd, train_flags, true);
  train_cmd->add_option("--thresholds", thresholds_path, "Threshold table JSON to use")->check(CLI::ExistingFile);

  auto* eval_cmd = app.add_subcommand("evaluate", "Score a trained model on the test split");
  add_common(eval_cmd, eval_flags, true);
  eval_cmd->add_option("--model", model_path, "Model JSON (default: <out>/model.json)");
  eval_cmd->add_option("--thresholds", thresholds_path, "Threshold table JSON (default: <out>/thresholds.json)");
  eval_cmd->add_option("--distortion", distortion_json,
                       R"(Distortion applied to test images, e.g. '{"kind":"awgn","snr_db":-30,"seed":1}')");

  auto* sweep_cmd = app.add_subcommand("sweep", "Full experiment: thresholds, training, distortion sweep, report");
  add_common(sweep_cmd, sweep_flags, true);

  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic real/fake dataset");
  add_common(synth_cmd, synth_flags, false);
  synth_cmd->add_option("--count", synth_count, "Images per class")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*derive_cmd) {
      ExperimentConfig config = resolve_config(derive_flags);
      if (!reference.empty()) {
        config.thresholds = {ThresholdSourceKind::Derive, reference};
      }
      std::vector<Sample> train;
      if (config.thresholds.kind == ThresholdSourceKind::Derive && config.thresholds.path.empty()) {
        train = load_split(config).train;
      }
      const ThresholdTable table = resolve_thresholds(config, train);
      ensure_dir(config.output_dir);
      save_threshold_table(table, config.output_dir / "thresholds.json");
      out << "wrote " << (config.output_dir / "thresholds.json").string() << '\n';
    } else if (*extract_cmd) {
      const ExperimentConfig config = resolve_config(extract_flags);
      const auto split = load_split(config);
      const FeatureConfig fc = feature_config(config, thresholds_for(config, thresholds_path, split.train));
      const auto all = ingest(config.dataset_root, config.working_size);
      const auto vectors = extract_batch(images_of(all), fc);
      const auto labels = labels_of(all);
      ensure_dir(config.output_dir);
      write_feature_csv(config.output_dir / "features.csv", vectors, labels);
      write_feature_binary(config.output_dir / "features.bin", vectors, labels);
      out << "extracted " << vectors.size() << " x " << (vectors.empty() ? 0 : vectors.front().size())
          << " features\n";
    } else if (*train_cmd) {
      const ExperimentConfig config = resolve_config(train_flags);
      const auto split = load_split(config);
      const FeatureConfig fc = feature_config(config, thresholds_for(config, thresholds_path, split.train));
      const SvmModel model = train_model(config, fc, split.train);
      ensure_dir(config.output_dir);
      save_threshold_table(fc.thresholds, config.output_dir / "thresholds.json");
      save_model(model, config.output_dir / "model.json");
      out << "trained on " << split.train.size() << " images; wrote "
          << (config.output_dir / "model.json").string() << '\n';
    } else if (*eval_cmd) {
      const ExperimentConfig config = resolve_config(eval_flags);
      const fs::path model_file = model_path.empty() ? config.output_dir / "model.json" : fs::path(model_path);
      const fs::path table_file =
          thresholds_path.empty() ? config.output_dir / "thresholds.json" : fs::path(thresholds_path);
      const SvmModel model = load_model(model_file);
      const FeatureConfig fc = feature_config(config, load_threshold_table(table_file));
      const auto split = load_split(config);

      EvalReport report;
      report.config = config.to_json();
      report.config_hash = config.hash();
      std::optional<DistortionSpec> distortion;
      if (!distortion_json.empty()) {
        try {
          distortion = DistortionSpec::from_json(nlohmann::json::parse(distortion_json));
        } catch (const nlohmann::json::parse_error& e) {
          throw Error(ErrorKind::InvalidSpec, e.what());
        }
      }
      const ConfusionMatrix cm = evaluate(model, fc, split.test, distortion ? &*distortion : nullptr);
      const Scores s = scores(cm);
      const std::string kind = distortion ? to_string(distortion->kind) : "clean";
      const std::string param = distortion ? distortion->param_label() : "none";
      report.rows.push_back({kind, param, 0, cm, s});
      report.conditions.push_back({kind, param, 1, s.accuracy, s.precision, s.recall, s.f1});
      write_report(report, config.output_dir);
      out << report.csv();
    } else if (*sweep_cmd) {
      const ExperimentConfig config = resolve_config(sweep_flags);
      const EvalReport report = run_experiment(config);
      out << report.csv();
    } else if (*synth_cmd) {
      const ExperimentConfig config = resolve_config(synth_flags);
      if (synth_flags.out.empty() && synth_flags.config.empty()) {
        err << "synth needs --out or a config with output_dir\n";
        return kUsageError;
      }
      SynthSpec spec = config.synth;
      if (synth_flags.seed) spec.seed = *synth_flags.seed;
      if (synth_count) spec.count_per_class = *synth_count;
      if (synth_flags.working_size) spec.rows = spec.cols = *synth_flags.working_size;
      // Without --out the dataset lands where the config expects to read it.
      const fs::path target =
          synth_flags.out.empty() && !config.dataset_root.empty() ? config.dataset_root : config.output_dir;
      const auto images = generate(spec);
      write_dataset(images, target);
      out << "wrote " << images.size() << " images under " << target.string() << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kOk;
}

}  // namespace atp::cli
