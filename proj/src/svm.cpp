#include "atp/svm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "atp/error.hpp"

namespace atp {

namespace {

constexpr double kScaleFloor = 1e-8;
constexpr double kTau = 1e-12;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Dual solver state for min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0.
class SmoSolver {
 public:
  SmoSolver(const std::vector<double>& kernel, std::span<const int> y, double C)
      : n_(y.size()), K_(kernel), y_(y), C_(C), alpha_(n_, 0.0), G_(n_, -1.0) {}

  void run(double tol, std::size_t max_iter) {
    for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
      std::size_t i = 0, j = 0;
      if (!select(tol, i, j)) {
        converged_ = true;
        return;
      }
      update(i, j);
    }
    std::size_t i = 0, j = 0;
    converged_ = !select(tol, i, j);
  }

  // b such that f(x) = sum_j alpha_j y_j K(x_j, x) + b.
  double bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t free_count = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      const double yg = y_[t] * G_[t];
      if (at_upper(t)) {
        if (y_[t] == 1) lb = std::max(lb, yg); else ub = std::min(ub, yg);
      } else if (at_lower(t)) {
        if (y_[t] == 1) ub = std::min(ub, yg); else lb = std::max(lb, yg);
      } else {
        free_sum += yg;
        ++free_count;
      }
    }
    const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : (ub + lb) / 2.0;
    return -rho;
  }

  const std::vector<double>& alpha() const { return alpha_; }
  std::size_t iterations() const { return iterations_; }
  bool converged() const { return converged_; }
  double gap() const { return gap_; }

 private:
  double k(std::size_t a, std::size_t b) const { return K_[a * n_ + b]; }
  double q(std::size_t a, std::size_t b) const { return y_[a] * y_[b] * k(a, b); }
  bool at_upper(std::size_t t) const { return alpha_[t] >= C_; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
  bool in_up(std::size_t t) const { return y_[t] == 1 ? !at_upper(t) : !at_lower(t); }
  bool in_low(std::size_t t) const { return y_[t] == 1 ? !at_lower(t) : !at_upper(t); }

  bool select(double tol, std::size_t& out_i, std::size_t& out_j) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::size_t i = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (in_up(t) && -y_[t] * G_[t] > gmax) {
        gmax = -y_[t] * G_[t];
        i = t;
      }
    }
    double gmin = std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::size_t j = n_;
    for (std::size_t t = 0; t < n_; ++t) {
      if (!in_low(t)) continue;
      const double v = -y_[t] * G_[t];
      gmin = std::min(gmin, v);
      if (i == n_ || v >= gmax) continue;
      const double b = gmax - v;
      double a = k(i, i) + k(t, t) - 2.0 * k(i, t);
      if (a <= 0.0) a = kTau;
      const double score = -(b * b) / a;
      if (score < best) {
        best = score;
        j = t;
      }
    }
    gap_ = gmax - gmin;
    if (i == n_ || j == n_ || gap_ <= tol) return false;
    out_i = i;
    out_j = j;
    return true;
  }

  void update(std::size_t i, std::size_t j) {
    const double old_i = alpha_[i];
    const double old_j = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];
    if (y_[i] != y_[j]) {
      double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-G_[i] - G_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) { aj = 0.0; ai = diff; }
      } else if (ai < 0.0) {
        ai = 0.0; aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > C_) { ai = C_; aj = C_ - diff; }
      } else if (aj > C_) {
        aj = C_; ai = C_ + diff;
      }
    } else {
      double quad = k(i, i) + k(j, j) - 2.0 * k(i, j);
      if (quad <= 0.0) quad = kTau;
      const double delta = (G_[i] - G_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > C_) {
        if (ai > C_) { ai = C_; aj = sum - C_; }
      } else if (aj < 0.0) {
        aj = 0.0; ai = sum;
      }
      if (sum > C_) {
        if (aj > C_) { aj = C_; ai = sum - C_; }
      } else if (ai < 0.0) {
        ai = 0.0; aj = sum;
      }
    }
    const double di = ai - old_i;
    const double dj = aj - old_j;
    for (std::size_t t = 0; t < n_; ++t) G_[t] += q(t, i) * di + q(t, j) * dj;
  }

  std::size_t n_;
  const std::vector<double>& K_;
  std::span<const int> y_;
  double C_;
  std::vector<double> alpha_;
  std::vector<double> G_;  // gradient Q a - e
  std::size_t iterations_ = 0;
  bool converged_ = false;
  double gap_ = 0.0;
};

}  // namespace

void SvmParams::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::InvalidParams, "SVM C must be positive");
  if (!(tol > 0.0)) throw Error(ErrorKind::InvalidParams, "SVM tol must be positive");
  if (gamma < 0.0) throw Error(ErrorKind::InvalidParams, "RBF gamma must be non-negative");
}

void SvmModel::standardize(std::span<const double> x, std::span<double> out) const {
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (x[i] - mean[i]) / scale[i];
}

TrainResult train_detailed(std::span<const std::vector<double>> features, std::span<const int> labels,
                           const SvmParams& params) {
  params.validate();
  if (features.size() != labels.size()) {
    throw Error(ErrorKind::DimensionMismatch, "features and labels differ in length");
  }
  const std::size_t n = features.size();
  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw Error(ErrorKind::InvalidParams, "labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw Error(ErrorKind::SingleClassData, "training data needs both classes");
  const std::size_t d = features.front().size();
  if (d == 0) throw Error(ErrorKind::DimensionMismatch, "empty feature vectors");
  for (const auto& f : features) {
    if (f.size() != d) throw Error(ErrorKind::DimensionMismatch, "feature vectors differ in length");
  }

  TrainResult result;
  SvmModel& m = result.model;
  m.C = params.C;
  m.tol = params.tol;
  m.kernel = params.kernel;
  m.gamma = params.kernel == KernelKind::Rbf ? (params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(d))
                                             : 0.0;

  m.mean.assign(d, 0.0);
  m.scale.assign(d, 0.0);
  for (const auto& f : features)
    for (std::size_t c = 0; c < d; ++c) m.mean[c] += f[c];
  for (auto& v : m.mean) v /= static_cast<double>(n);
  for (const auto& f : features) {
    for (std::size_t c = 0; c < d; ++c) {
      const double dv = f[c] - m.mean[c];
      m.scale[c] += dv * dv;
    }
  }
  for (auto& v : m.scale) v = std::max(std::sqrt(v / static_cast<double>(n)), kScaleFloor);

  std::vector<std::vector<double>> z(n, std::vector<double>(d));
  for (std::size_t i = 0; i < n; ++i) m.standardize(features[i], z[i]);

  std::vector<double> kernel(n * n);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ri = 0; ri < rows; ++ri) {
    const auto i = static_cast<std::size_t>(ri);
    for (std::size_t j = i; j < n; ++j) {
      const double v = params.kernel == KernelKind::Linear ? dot(z[i], z[j])
                                                           : std::exp(-m.gamma * squared_distance(z[i], z[j]));
      kernel[i * n + j] = v;
      kernel[j * n + i] = v;
    }
  }

  SmoSolver solver(kernel, labels, params.C);
  solver.run(params.tol, params.max_passes > 0 ? params.max_passes : 100 * n);
  result.alpha = solver.alpha();
  result.iterations = solver.iterations();
  result.converged = solver.converged();
  result.max_violation = solver.gap();
  m.bias = solver.bias();

  if (params.kernel == KernelKind::Linear) {
    m.weights.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double coef = result.alpha[i] * labels[i];
      if (coef == 0.0) continue;
      for (std::size_t c = 0; c < d; ++c) m.weights[c] += coef * z[i][c];
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      if (result.alpha[i] > 0.0) {
        m.support_vectors.push_back(z[i]);
        m.dual_coef.push_back(result.alpha[i] * labels[i]);
      }
    }
  }
  return result;
}

SvmModel train(std::span<const std::vector<double>> features, std::span<const int> labels, const SvmParams& params) {
  return train_detailed(features, labels, params).model;
}

Prediction predict(const SvmModel& model, std::span<const double> feature) {
  if (feature.size() != model.feature_length()) {
    throw Error(ErrorKind::DimensionMismatch, "feature length " + std::to_string(feature.size()) +
                                                  " does not match model length " +
                                                  std::to_string(model.feature_length()));
  }
  std::vector<double> z(feature.size());
  model.standardize(feature, z);
  double score = model.bias;
  if (model.kernel == KernelKind::Linear) {
    score += dot(model.weights, z);
  } else {
    for (std::size_t s = 0; s < model.support_vectors.size(); ++s) {
      score += model.dual_coef[s] * std::exp(-model.gamma * squared_distance(model.support_vectors[s], z));
    }
  }
  return {score >= 0.0 ? 1 : -1, score};
}

void require_pipeline_hash(const SvmModel& model, std::uint64_t hash) {
  if (model.pipeline_config_hash != hash) {
    throw Error(ErrorKind::LayoutHashMismatch, "model was trained for pipeline " +
                                                   hash_hex(model.pipeline_config_hash) + ", features come from " +
                                                   hash_hex(hash));
  }
}

nlohmann::json SvmModel::to_json() const {
  nlohmann::json j = {{"C", C},
                      {"tol", tol},
                      {"kernel", kernel == KernelKind::Linear ? "linear" : "rbf"},
                      {"gamma", gamma},
                      {"mean", mean},
                      {"scale", scale},
                      {"weights", weights},
                      {"bias", bias},
                      {"label_map", {{"+1", "fake"}, {"-1", "real"}}},
                      {"pipeline_config_hash", hash_hex(pipeline_config_hash)}};
  if (kernel == KernelKind::Rbf) {
    j["support_vectors"] = support_vectors;
    j["dual_coef"] = dual_coef;
  }
  return j;
}

SvmModel SvmModel::from_json(const nlohmann::json& j) {
  SvmModel m;
  try {
    m.C = j.at("C").get<double>();
    m.tol = j.at("tol").get<double>();
    const auto kernel = j.at("kernel").get<std::string>();
    if (kernel != "linear" && kernel != "rbf") throw Error(ErrorKind::InvalidConfig, "unknown kernel " + kernel);
    m.kernel = kernel == "linear" ? KernelKind::Linear : KernelKind::Rbf;
    m.gamma = j.at("gamma").get<double>();
    m.mean = j.at("mean").get<std::vector<double>>();
    m.scale = j.at("scale").get<std::vector<double>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.pipeline_config_hash = std::stoull(j.at("pipeline_config_hash").get<std::string>(), nullptr, 16);
    if (m.kernel == KernelKind::Rbf) {
      m.support_vectors = j.at("support_vectors").get<std::vector<std::vector<double>>>();
      m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("model: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("model hash: ") + e.what());
  }
  const std::size_t d = m.mean.size();
  const bool linear_ok = m.kernel != KernelKind::Linear || m.weights.size() == d;
  const bool rbf_ok = m.kernel != KernelKind::Rbf || m.support_vectors.size() == m.dual_coef.size();
  if (m.scale.size() != d || !linear_ok || !rbf_ok ||
      std::any_of(m.scale.begin(), m.scale.end(), [](double s) { return !(s > 0.0); })) {
    throw Error(ErrorKind::InvalidConfig, "model vectors are inconsistent");
  }
  return m;
}

SvmModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  try {
    return SvmModel::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
}

void save_model(const SvmModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << model.to_json().dump() << '\n';
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

}  // namespace atp
