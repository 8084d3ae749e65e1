#include "atp/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "atp/error.hpp"
#include "atp/wavelet.hpp"

namespace atp {

namespace {

void check_beta_k(double beta, std::size_t K) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidParams, "beta must be positive");
  if (K < 1) throw Error(ErrorKind::InvalidParams, "K must be at least 1");
}

}  // namespace

const std::vector<double>& ThresholdTable::at(const std::string& name) const {
  const auto it = subbands.find(name);
  if (it == subbands.end()) throw Error(ErrorKind::LayoutMismatch, "threshold table has no subband " + name);
  return it->second;
}

void ThresholdTable::validate() const {
  check_beta_k(beta, K);
  if (subbands.size() != SubbandSet::kPatternBands.size()) {
    throw Error(ErrorKind::LayoutMismatch, "threshold table must list exactly the ten pattern subbands");
  }
  for (auto name : SubbandSet::kPatternBands) {
    const auto& values = at(std::string(name));
    if (values.size() != K) {
      throw Error(ErrorKind::LayoutMismatch, "subband " + std::string(name) + " has " +
                                                 std::to_string(values.size()) + " thresholds, expected " +
                                                 std::to_string(K));
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (!std::isfinite(values[k]) || values[k] < 0.0) {
        throw Error(ErrorKind::InvalidParams, "thresholds must be finite and non-negative");
      }
      if (k > 0 && values[k] > values[k - 1]) {
        throw Error(ErrorKind::InvalidParams, "thresholds of " + std::string(name) + " must be non-increasing");
      }
    }
  }
}

nlohmann::json ThresholdTable::to_json() const {
  nlohmann::json bands = nlohmann::json::object();
  for (const auto& [name, values] : subbands) bands[name] = values;
  return {{"beta", beta}, {"K", K}, {"subbands", bands}};
}

ThresholdTable ThresholdTable::from_json(const nlohmann::json& j) {
  ThresholdTable t;
  try {
    t.beta = j.at("beta").get<double>();
    t.K = j.at("K").get<std::size_t>();
    for (const auto& [name, values] : j.at("subbands").items()) {
      t.subbands[name] = values.get<std::vector<double>>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("threshold table: ") + e.what());
  }
  t.validate();
  return t;
}

ThresholdTable load_threshold_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::FileNotFound, path.string());
  try {
    return ThresholdTable::from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::InvalidConfig, path.string() + ": " + e.what());
  }
}

void save_threshold_table(const ThresholdTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  out << table.to_json().dump(2) << '\n';
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
}

ThresholdTable bundled_thresholds() {
  ThresholdTable t;
  t.beta = 2.2;
  t.K = 5;
  t.subbands = {
      {"h1", {547.5502, 350.2337, 224.0222, 143.2933, 91.6558}},
      {"v1", {242.1100, 133.3524, 73.4495, 40.4554, 22.2825}},
      {"d1", {290.7339, 150.5746, 77.9844, 40.3891, 20.9180}},
      {"h2", {1064.9976, 688.9769, 445.7185, 288.3478, 186.5403}},
      {"v2", {411.0094, 262.3547, 167.4658, 106.8964, 68.2339}},
      {"d2", {257.9083, 162.0467, 101.8158, 63.9720, 40.1944}},
      {"a3", {904.0261, 53.7971, 3.2014, 0.1905, 0.0113}},
      {"h3", {699.1689, 430.6025, 265.1985, 163.3298, 100.5912}},
      {"v3", {330.3916, 178.6908, 96.6441, 52.2696, 28.2698}},
      {"d3", {594.4882, 420.6886, 297.6996, 210.6666, 149.0779}},
  };
  return t;
}

std::vector<double> pixel_schedule(double high, double low, double beta, std::size_t K) {
  check_beta_k(beta, K);
  const double range = high - low;
  if (!(range > 0.0)) throw Error(ErrorKind::InvalidParams, "pixel schedule needs high > low");
  const double alpha = std::max(high / range, 0.0);
  std::vector<double> out(K);
  for (std::size_t k = 0; k < K; ++k) out[k] = beta * range * std::exp(-alpha * static_cast<double>(k));
  return out;
}

std::vector<double> band_thresholds(const GrayImage& band, double beta, std::size_t K,
                                    ThresholdReduction reduction) {
  check_beta_k(beta, K);
  std::vector<double> result(K, 0.0);
  double peak_range = 0.0;
  bool any = false;
  for (std::size_t r = 0; r < band.rows(); ++r) {
    for (std::size_t c = 0; c < band.cols(); ++c) {
      double high = -std::numeric_limits<double>::infinity();
      double low = std::numeric_limits<double>::infinity();
      for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
        for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
          const double v = band.at_clamped(static_cast<std::ptrdiff_t>(r) + dr, static_cast<std::ptrdiff_t>(c) + dc);
          high = std::max(high, v);
          low = std::min(low, v);
        }
      }
      if (!(high > low)) continue;
      any = true;
      if (reduction == ThresholdReduction::PeakPixel) {
        if (high - low > peak_range) {
          peak_range = high - low;
          result = pixel_schedule(high, low, beta, K);
        }
      } else {
        const auto schedule = pixel_schedule(high, low, beta, K);
        for (std::size_t k = 0; k < K; ++k) result[k] = std::max(result[k], schedule[k]);
      }
    }
  }
  if (!any) throw Error(ErrorKind::DegenerateReference, "subband is constant");
  return result;
}

ThresholdTable derive_thresholds(const GrayImage& reference, double beta, std::size_t K,
                                 const DiffusionParams& ad, ThresholdReduction reduction) {
  check_beta_k(beta, K);
  const SubbandSet bands = decompose3(diffuse(reference, ad));
  ThresholdTable table;
  table.beta = beta;
  table.K = K;
  for (auto name : SubbandSet::kPatternBands) {
    try {
      table.subbands[std::string(name)] = band_thresholds(bands.band(name), beta, K, reduction);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateReference) throw;
      throw Error(ErrorKind::DegenerateReference, "reference subband " + std::string(name) + " is constant");
    }
  }
  return table;
}

}  // namespace atp
