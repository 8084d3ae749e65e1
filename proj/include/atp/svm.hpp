#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "json.hpp"

namespace atp {

enum class KernelKind { Linear, Rbf };

struct SvmParams {
  double C = 1.0;
  double tol = 1e-3;
  // Iteration cap for the pair-update loop; 0 means 100 * n.
  std::size_t max_passes = 0;
  KernelKind kernel = KernelKind::Linear;
  double gamma = 0.0;  // RBF only; 0 means 1 / feature length

  void validate() const;
};

/// Binary soft-margin SVM in z-scored feature space. Label +1 is the fake
/// (positive) class, -1 the real class.
struct SvmModel {
  double C = 1.0;
  double tol = 1e-3;
  KernelKind kernel = KernelKind::Linear;
  double gamma = 0.0;

  std::vector<double> mean;
  std::vector<double> scale;    // per-feature std, floored at 1e-8
  std::vector<double> weights;  // linear kernel only, standardized space
  double bias = 0.0;

  // RBF kernel only: standardized support vectors and their alpha_i * y_i.
  std::vector<std::vector<double>> support_vectors;
  std::vector<double> dual_coef;

  std::uint64_t pipeline_config_hash = 0;

  std::size_t feature_length() const noexcept { return mean.size(); }

  void standardize(std::span<const double> x, std::span<double> out) const;

  nlohmann::json to_json() const;
  static SvmModel from_json(const nlohmann::json& j);
};

struct Prediction {
  int label = 1;
  double score = 0.0;
};

struct TrainResult {
  SvmModel model;
  std::vector<double> alpha;  // dual variables, one per training example
  std::size_t iterations = 0;
  double max_violation = 0.0;  // final max-violating-pair gap
  bool converged = false;
};

/// Dual SMO with second-order working-set selection; deterministic for a
/// given example order. Throws SingleClassData, DimensionMismatch,
/// InvalidParams.
TrainResult train_detailed(std::span<const std::vector<double>> features, std::span<const int> labels,
                           const SvmParams& params);

SvmModel train(std::span<const std::vector<double>> features, std::span<const int> labels,
               const SvmParams& params);

/// sign(f(x)) with f(x) = 0 mapped to +1, plus the raw decision value.
Prediction predict(const SvmModel& model, std::span<const double> feature);

/// Throws LayoutHashMismatch when `hash` differs from the model's.
void require_pipeline_hash(const SvmModel& model, std::uint64_t hash);

SvmModel load_model(const std::filesystem::path& path);
void save_model(const SvmModel& model, const std::filesystem::path& path);

}  // namespace atp
