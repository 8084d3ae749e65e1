#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "atp/diffusion.hpp"
#include "atp/distortions.hpp"
#include "atp/features.hpp"
#include "atp/metrics.hpp"
#include "atp/svm.hpp"
#include "atp/synth.hpp"
#include "atp/thresholds.hpp"

namespace atp {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kConfigSchemaVersion = 1;

enum class ThresholdSourceKind { Derive, File, Bundled };

struct ThresholdSource {
  ThresholdSourceKind kind = ThresholdSourceKind::Derive;
  // Derive: reference image; empty means the first real training image.
  // File: path to a threshold-table JSON.
  std::filesystem::path path;
};

/// One sweep family with its parameter grid.
struct SweepEntry {
  DistortionKind kind = DistortionKind::PixelMissing;
  std::vector<double> values;  // rates or SNRs in dB
  std::vector<std::pair<std::size_t, std::size_t>> blocks;  // (height, width)
  BlockAnchor anchor;
};

struct ExperimentConfig {
  std::filesystem::path dataset_root;
  std::optional<std::filesystem::path> test_root;  // when absent, split dataset_root
  std::size_t train_per_class = 60;
  std::size_t working_size = 96;
  DiffusionParams diffusion;
  double beta = 2.2;
  std::size_t K = 5;
  ThresholdReduction reduction = ThresholdReduction::PeakPixel;
  ThresholdSource thresholds;
  SvmParams svm;
  std::vector<SweepEntry> sweep;
  std::size_t monte_carlo_runs = 4;
  std::uint64_t seed = 42;
  std::filesystem::path output_dir;
  SynthSpec synth;

  void validate() const;  // throws InvalidConfig
  nlohmann::json to_json() const;
  // Relative paths inside the document resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  std::uint64_t hash() const;

  /// Expands the sweep grids into concrete distortions (seed left at 0).
  std::vector<DistortionSpec> conditions() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);

struct Sample {
  GrayImage image;
  int label = -1;
  std::filesystem::path path;
};

/// Loads `root/real` (-1) and `root/fake` (+1) in lexicographic order, each
/// resized to working_size x working_size. Unreadable files are collected and
/// reported together in a single CorruptImage/UnsupportedFormat error.
std::vector<Sample> ingest(const std::filesystem::path& root, std::size_t working_size);

struct DatasetSplit {
  std::vector<Sample> train;
  std::vector<Sample> test;
};

/// Uses test_root when present; otherwise shuffles each class with a seed
/// derived from the master seed and takes train_per_class of each for training.
DatasetSplit load_split(const ExperimentConfig& config);

ThresholdTable resolve_thresholds(const ExperimentConfig& config, std::span<const Sample> train);

FeatureConfig feature_config(const ExperimentConfig& config, ThresholdTable table);

/// Training only ever sees clean images.
SvmModel train_model(const ExperimentConfig& config, const FeatureConfig& features,
                     std::span<const Sample> samples);

/// Classifies `test` after applying `distortion` (nullptr for clean data).
/// Image i of the run uses seed `distortion->seed ^ i`.
ConfusionMatrix evaluate(const SvmModel& model, const FeatureConfig& features,
                         std::span<const Sample> test, const DistortionSpec* distortion);

struct ReportRow {
  std::string kind;
  std::string param;
  std::size_t run = 0;
  ConfusionMatrix cm;
  Scores scores;
};

/// Mean of each metric across the Monte-Carlo runs of one condition. A mean
/// of precision/recall/F1 covers only runs where it is defined.
struct ConditionSummary {
  std::string kind;
  std::string param;
  std::size_t runs = 0;
  double accuracy = 0.0;
  Score precision, recall, f1;
};

struct EvalReport {
  nlohmann::json config;
  std::uint64_t config_hash = 0;
  std::vector<ReportRow> rows;
  std::vector<ConditionSummary> conditions;
  nlohmann::json timings = nlohmann::json::object();
  std::string version = kLibraryVersion;

  std::string csv() const;
  nlohmann::json to_json() const;
};

/// Thresholds -> clean training -> clean test row -> each sweep condition on
/// distorted test images. Writes report.json, report.csv, thresholds.json
/// and model.json into config.output_dir when it is set.
EvalReport run_experiment(const ExperimentConfig& config);

void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace atp
