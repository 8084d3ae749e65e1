#include "atp/harness.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "atp/error.hpp"
#include "atp/image_io.hpp"
#include "atp/random.hpp"

namespace atp {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

[[noreturn]] void bad_config(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return p.is_relative() && !base.empty() ? base / p : p;
}

std::string reduction_name(ThresholdReduction r) {
  return r == ThresholdReduction::PerLevelMax ? "per_level_max" : "peak_pixel";
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".bmp" || ext == ".png";
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

nlohmann::json score_json(const Score& s) { return s ? nlohmann::json(*s) : nlohmann::json(nullptr); }

// Mean over runs where the score is defined.
Score mean_defined(const std::vector<Score>& values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (v) {
      sum += *v;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::vector<GrayImage> images_of(std::span<const Sample> samples) {
  std::vector<GrayImage> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.image);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (working_size < 17) bad_config("working_size must be at least 17");
  try {
    diffusion.validate();
    svm.validate();
  } catch (const Error& e) {
    bad_config(e.what());
  }
  if (!(beta > 0.0)) bad_config("atp.beta must be positive");
  if (K < 1) bad_config("atp.K must be at least 1");
  if (monte_carlo_runs < 1) bad_config("monte_carlo_runs must be at least 1");
  if (thresholds.kind == ThresholdSourceKind::File && thresholds.path.empty()) {
    bad_config("threshold source 'file' needs a path");
  }
  for (const auto& entry : sweep) {
    const bool empty = entry.kind == DistortionKind::BlockMissing ? entry.blocks.empty() : entry.values.empty();
    if (empty) bad_config("sweep grid for " + to_string(entry.kind) + " is empty");
    for (double v : entry.values) {
      if (entry.kind == DistortionKind::PixelMissing && !(v >= 0.0 && v <= 1.0)) {
        bad_config("pixel_missing rates must lie in [0, 1]");
      }
      if (!std::isfinite(v)) bad_config("sweep values must be finite");
    }
    for (const auto& [h, w] : entry.blocks) {
      if (h == 0 || w == 0 || h > working_size || w > working_size) {
        bad_config("block sizes must fit the working size");
      }
    }
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json source;
  switch (thresholds.kind) {
    case ThresholdSourceKind::Derive:
      source = {{"source", "derive"}};
      if (!thresholds.path.empty()) source["reference"] = thresholds.path.generic_string();
      break;
    case ThresholdSourceKind::File: source = {{"source", "file"}, {"path", thresholds.path.generic_string()}}; break;
    case ThresholdSourceKind::Bundled: source = {{"source", "bundled"}}; break;
  }
  nlohmann::json sweep_json = nlohmann::json::array();
  for (const auto& e : sweep) {
    nlohmann::json j = {{"kind", to_string(e.kind)}};
    switch (e.kind) {
      case DistortionKind::PixelMissing: j["rates"] = e.values; break;
      case DistortionKind::Awgn: j["snr_db"] = e.values; break;
      case DistortionKind::BlockMissing: {
        nlohmann::json sizes = nlohmann::json::array();
        for (const auto& [h, w] : e.blocks) sizes.push_back({h, w});
        j["sizes"] = sizes;
        if (e.anchor.centered()) j["anchor"] = "centered";
        else j["anchor"] = {{"row", *e.anchor.row}, {"col", *e.anchor.col}};
        break;
      }
    }
    sweep_json.push_back(j);
  }
  nlohmann::json j = {
      {"schema_version", kConfigSchemaVersion},
      {"dataset_root", dataset_root.generic_string()},
      {"test_root", test_root ? nlohmann::json(test_root->generic_string()) : nlohmann::json(nullptr)},
      {"train_per_class", train_per_class},
      {"working_size", working_size},
      {"diffusion", {{"sigma", diffusion.sigma}, {"iterations", diffusion.iterations}, {"step", diffusion.step}}},
      {"atp", {{"beta", beta}, {"K", K}, {"reduction", reduction_name(reduction)}, {"thresholds", source}}},
      {"svm",
       {{"C", svm.C},
        {"tol", svm.tol},
        {"max_passes", svm.max_passes},
        {"kernel", svm.kernel == KernelKind::Linear ? "linear" : "rbf"},
        {"gamma", svm.gamma}}},
      {"sweep", sweep_json},
      {"monte_carlo_runs", monte_carlo_runs},
      {"seed", seed},
      {"output_dir", output_dir.generic_string()},
      {"synth", synth.to_json()},
  };
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  static const std::set<std::string> kKeys = {"schema_version", "dataset_root", "test_root",  "train_per_class",
                                              "working_size",   "diffusion",    "atp",        "svm",
                                              "sweep",          "monte_carlo_runs", "seed",   "output_dir",
                                              "synth"};
  if (!j.is_object()) bad_config("config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) bad_config("unknown config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    const int version = j.value("schema_version", kConfigSchemaVersion);
    if (version != kConfigSchemaVersion) bad_config("unsupported schema_version " + std::to_string(version));
    if (j.contains("dataset_root")) c.dataset_root = resolve(base_dir, j["dataset_root"].get<std::string>());
    if (j.contains("test_root") && !j["test_root"].is_null()) {
      c.test_root = resolve(base_dir, j["test_root"].get<std::string>());
    }
    c.train_per_class = j.value("train_per_class", c.train_per_class);
    c.working_size = j.value("working_size", c.working_size);
    if (j.contains("diffusion")) {
      const auto& d = j["diffusion"];
      c.diffusion.sigma = d.value("sigma", c.diffusion.sigma);
      c.diffusion.iterations = d.value("iterations", c.diffusion.iterations);
      c.diffusion.step = d.value("step", c.diffusion.step);
    }
    if (j.contains("atp")) {
      const auto& a = j["atp"];
      c.beta = a.value("beta", c.beta);
      c.K = a.value("K", c.K);
      const auto reduction = a.value("reduction", std::string("peak_pixel"));
      if (reduction == "per_level_max") c.reduction = ThresholdReduction::PerLevelMax;
      else if (reduction == "peak_pixel") c.reduction = ThresholdReduction::PeakPixel;
      else bad_config("unknown atp.reduction '" + reduction + "'");
      if (a.contains("thresholds")) {
        const auto& t = a["thresholds"];
        const auto source = t.at("source").get<std::string>();
        if (source == "derive") {
          c.thresholds.kind = ThresholdSourceKind::Derive;
          if (t.contains("reference") && !t["reference"].is_null()) {
            c.thresholds.path = resolve(base_dir, t["reference"].get<std::string>());
          }
        } else if (source == "file") {
          c.thresholds.kind = ThresholdSourceKind::File;
          c.thresholds.path = resolve(base_dir, t.at("path").get<std::string>());
        } else if (source == "bundled") {
          c.thresholds.kind = ThresholdSourceKind::Bundled;
        } else {
          bad_config("threshold source must be derive, file or bundled");
        }
      }
    }
    if (j.contains("svm")) {
      const auto& s = j["svm"];
      c.svm.C = s.value("C", c.svm.C);
      c.svm.tol = s.value("tol", c.svm.tol);
      c.svm.max_passes = s.value("max_passes", c.svm.max_passes);
      c.svm.gamma = s.value("gamma", c.svm.gamma);
      const auto kernel = s.value("kernel", std::string("linear"));
      if (kernel == "linear") c.svm.kernel = KernelKind::Linear;
      else if (kernel == "rbf") c.svm.kernel = KernelKind::Rbf;
      else bad_config("unknown svm.kernel '" + kernel + "'");
    }
    if (j.contains("sweep")) {
      for (const auto& e : j["sweep"]) {
        SweepEntry entry;
        entry.kind = distortion_kind_from_string(e.at("kind").get<std::string>());
        switch (entry.kind) {
          case DistortionKind::PixelMissing: entry.values = e.at("rates").get<std::vector<double>>(); break;
          case DistortionKind::Awgn: entry.values = e.at("snr_db").get<std::vector<double>>(); break;
          case DistortionKind::BlockMissing:
            for (const auto& size : e.at("sizes")) {
              entry.blocks.emplace_back(size.at(0).get<std::size_t>(), size.at(1).get<std::size_t>());
            }
            if (e.contains("anchor")) {
              entry.anchor = DistortionSpec::from_json({{"kind", "block_missing"}, {"height", 1}, {"width", 1},
                                                        {"anchor", e["anchor"]}})
                                 .anchor;
            }
            break;
        }
        c.sweep.push_back(std::move(entry));
      }
    }
    c.monte_carlo_runs = j.value("monte_carlo_runs", c.monte_carlo_runs);
    c.seed = j.value("seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    if (j.contains("synth")) c.synth = SynthSpec::from_json(j["synth"]);
  } catch (const nlohmann::json::exception& e) {
    bad_config(e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidConfig) throw;
    bad_config(e.what());
  }
  c.validate();
  return c;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(to_json().dump()); }

std::vector<DistortionSpec> ExperimentConfig::conditions() const {
  std::vector<DistortionSpec> out;
  for (const auto& entry : sweep) {
    if (entry.kind == DistortionKind::BlockMissing) {
      for (const auto& [h, w] : entry.blocks) {
        DistortionSpec s;
        s.kind = entry.kind;
        s.block_height = h;
        s.block_width = w;
        s.anchor = entry.anchor;
        out.push_back(s);
      }
      continue;
    }
    for (double v : entry.values) {
      DistortionSpec s;
      s.kind = entry.kind;
      if (entry.kind == DistortionKind::PixelMissing) s.rate = v;
      else s.snr_db = v;
      out.push_back(s);
    }
  }
  return out;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    bad_config(path.string() + ": " + e.what());
  }
  return ExperimentConfig::from_json(j, path.parent_path());
}

std::vector<Sample> ingest(const fs::path& root, std::size_t working_size) {
  std::vector<Sample> samples;
  std::vector<std::string> failures;
  ErrorKind failure_kind = ErrorKind::CorruptImage;
  for (const auto& [dir, label] : {std::pair<const char*, int>{"real", -1}, {"fake", 1}}) {
    const fs::path class_dir = root / dir;
    std::error_code ec;
    if (!fs::is_directory(class_dir, ec)) {
      throw Error(ErrorKind::MissingClassDirectory, class_dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dir)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
    for (const auto& file : files) {
      try {
        samples.push_back({resize_to(load_image(file), working_size, working_size), label, file});
      } catch (const Error& e) {
        if (failures.empty()) failure_kind = e.kind();
        failures.push_back(e.what());
      }
    }
  }
  if (!failures.empty()) {
    std::string message = std::to_string(failures.size()) + " file(s) failed to load:";
    for (const auto& f : failures) message += "\n  " + f;
    throw Error(failure_kind, message);
  }
  if (samples.empty()) throw Error(ErrorKind::NoImagesFound, root.string());
  return samples;
}

DatasetSplit load_split(const ExperimentConfig& config) {
  if (config.dataset_root.empty()) bad_config("dataset_root is not set");
  DatasetSplit split;
  if (config.test_root) {
    split.train = ingest(config.dataset_root, config.working_size);
    split.test = ingest(*config.test_root, config.working_size);
    return split;
  }
  std::vector<Sample> all = ingest(config.dataset_root, config.working_size);
  for (int label : {-1, 1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].label == label) idx.push_back(i);
    }
    if (idx.size() < config.train_per_class) {
      bad_config("class " + std::string(label == 1 ? "fake" : "real") + " has " + std::to_string(idx.size()) +
                 " images, fewer than train_per_class = " + std::to_string(config.train_per_class));
    }
    // Fisher-Yates with the portable stream so the split is platform-independent.
    Rng rng(derive_seed(config.seed, label == 1 ? 0xFA4Eu : 0x4EA1u));
    for (std::size_t i = idx.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next_u64() % i);
      std::swap(idx[i - 1], idx[j]);
    }
    std::vector<std::size_t> train_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(config.train_per_class));
    std::vector<std::size_t> test_idx(idx.begin() + static_cast<std::ptrdiff_t>(config.train_per_class), idx.end());
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    for (auto i : train_idx) split.train.push_back(all[i]);
    for (auto i : test_idx) split.test.push_back(all[i]);
  }
  return split;
}

ThresholdTable resolve_thresholds(const ExperimentConfig& config, std::span<const Sample> train) {
  switch (config.thresholds.kind) {
    case ThresholdSourceKind::Bundled: return bundled_thresholds();
    case ThresholdSourceKind::File: return load_threshold_table(config.thresholds.path);
    case ThresholdSourceKind::Derive: break;
  }
  GrayImage reference;
  if (!config.thresholds.path.empty()) {
    reference = resize_to(load_image(config.thresholds.path), config.working_size, config.working_size);
  } else {
    const auto it = std::find_if(train.begin(), train.end(), [](const Sample& s) { return s.label == -1; });
    if (it == train.end()) throw Error(ErrorKind::NoImagesFound, "no real training image to use as reference");
    reference = it->image;
  }
  return derive_thresholds(reference, config.beta, config.K, config.diffusion, config.reduction);
}

FeatureConfig feature_config(const ExperimentConfig& config, ThresholdTable table) {
  FeatureConfig fc;
  fc.working_size = config.working_size;
  fc.diffusion = config.diffusion;
  fc.thresholds = std::move(table);
  fc.validate();
  return fc;
}

SvmModel train_model(const ExperimentConfig& config, const FeatureConfig& features,
                     std::span<const Sample> samples) {
  const auto images = images_of(samples);
  const auto vectors = extract_batch(images, features);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  rows.reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    rows.push_back(vectors[i].values);
    labels.push_back(samples[i].label);
  }
  SvmModel model = train(rows, labels, config.svm);
  model.pipeline_config_hash = features.hash();
  return model;
}

ConfusionMatrix evaluate(const SvmModel& model, const FeatureConfig& features, std::span<const Sample> test,
                         const DistortionSpec* distortion) {
  require_pipeline_hash(model, features.hash());
  if (test.empty()) throw Error(ErrorKind::EmptyInput, "no test images");
  std::vector<GrayImage> images(test.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(test.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      if (distortion == nullptr) {
        images[i] = test[i].image;
      } else {
        DistortionSpec spec = *distortion;
        spec.seed = distortion->seed ^ static_cast<std::uint64_t>(i);
        images[i] = apply_distortion(test[i].image, spec);
      }
    } catch (...) {
#pragma omp critical(atp_eval_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const auto vectors = extract_batch(images, features);
  std::vector<int> truth, pred;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    truth.push_back(test[i].label);
    pred.push_back(predict(model, vectors[i].values).label);
  }
  return confusion(truth, pred);
}

std::string EvalReport::csv() const {
  std::ostringstream out;
  out << "kind,param,run,accuracy,precision,recall,f1,tp,tn,fp,fn\n";
  for (const auto& r : rows) {
    out << r.kind << ',' << r.param << ',' << r.run << ',' << format_score(r.scores.accuracy) << ','
        << format_score(r.scores.precision) << ',' << format_score(r.scores.recall) << ','
        << format_score(r.scores.f1) << ',' << r.cm.tp << ',' << r.cm.tn << ',' << r.cm.fp << ',' << r.cm.fn
        << '\n';
  }
  return out.str();
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"kind", r.kind},
                         {"param", r.param},
                         {"run", r.run},
                         {"accuracy", r.scores.accuracy},
                         {"precision", score_json(r.scores.precision)},
                         {"recall", score_json(r.scores.recall)},
                         {"f1", score_json(r.scores.f1)},
                         {"tp", r.cm.tp},
                         {"tn", r.cm.tn},
                         {"fp", r.cm.fp},
                         {"fn", r.cm.fn}});
  }
  nlohmann::json cond_json = nlohmann::json::array();
  for (const auto& c : conditions) {
    cond_json.push_back({{"kind", c.kind},
                         {"param", c.param},
                         {"runs", c.runs},
                         {"accuracy", c.accuracy},
                         {"precision", score_json(c.precision)},
                         {"recall", score_json(c.recall)},
                         {"f1", score_json(c.f1)}});
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash));
  return {{"version", version},  {"config", config},        {"config_hash", hash},
          {"rows", rows_json},   {"conditions", cond_json}, {"timings", timings}};
}

void write_report(const EvalReport& report, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream json_out(dir / "report.json");
  json_out << report.to_json().dump(2) << '\n';
  std::ofstream csv_out(dir / "report.csv", std::ios::binary);
  csv_out << report.csv();
  if (!json_out || !csv_out) throw Error(ErrorKind::IoError, "cannot write report into " + dir.string());
}

EvalReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  EvalReport report;
  report.config = config.to_json();
  report.config_hash = config.hash();

  auto stage = Clock::now();
  const DatasetSplit split = load_split(config);
  report.timings["ingest_s"] = seconds_since(stage);

  stage = Clock::now();
  const FeatureConfig features = feature_config(config, resolve_thresholds(config, split.train));
  report.timings["thresholds_s"] = seconds_since(stage);

  stage = Clock::now();
  const SvmModel model = train_model(config, features, split.train);
  report.timings["train_s"] = seconds_since(stage);

  auto add_condition = [&](const std::string& kind, const std::string& param, std::size_t runs,
                           auto&& evaluate_run) {
    ConditionSummary summary{kind, param, runs, 0.0, {}, {}, {}};
    std::vector<Score> precision, recall, f1;
    for (std::size_t run = 0; run < runs; ++run) {
      const ConfusionMatrix cm = evaluate_run(run);
      const Scores s = scores(cm);
      report.rows.push_back({kind, param, run, cm, s});
      summary.accuracy += s.accuracy / static_cast<double>(runs);
      precision.push_back(s.precision);
      recall.push_back(s.recall);
      f1.push_back(s.f1);
    }
    summary.precision = mean_defined(precision);
    summary.recall = mean_defined(recall);
    summary.f1 = mean_defined(f1);
    report.conditions.push_back(summary);
  };

  stage = Clock::now();
  add_condition("clean", "none", 1, [&](std::size_t) { return evaluate(model, features, split.test, nullptr); });

  const auto conditions = config.conditions();
  for (std::size_t ci = 0; ci < conditions.size(); ++ci) {
    const DistortionSpec& base = conditions[ci];
    const std::uint64_t condition_seed = derive_seed(config.seed, ci + 1);
    const std::size_t runs = base.seeded() ? config.monte_carlo_runs : 1;
    add_condition(to_string(base.kind), base.param_label(), runs, [&](std::size_t run) {
      DistortionSpec spec = base;
      spec.seed = derive_seed(condition_seed, run);
      return evaluate(model, features, split.test, &spec);
    });
  }
  report.timings["evaluate_s"] = seconds_since(stage);
  report.timings["total_s"] = seconds_since(start);

  if (!config.output_dir.empty()) {
    write_report(report, config.output_dir);
    save_threshold_table(features.thresholds, config.output_dir / "thresholds.json");
    save_model(model, config.output_dir / "model.json");
  }
  return report;
}

}  // namespace atp
