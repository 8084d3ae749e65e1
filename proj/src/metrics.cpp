#include "atp/metrics.hpp"

#include <cstdio>

#include "atp/error.hpp"

namespace atp {

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw Error(ErrorKind::LengthMismatch, "truth and prediction lengths differ");
  if (truth.empty()) throw Error(ErrorKind::EmptyInput, "no samples to score");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool actual = truth[i] == 1;
    const bool predicted = pred[i] == 1;
    if (actual && predicted) ++cm.tp;
    else if (!actual && !predicted) ++cm.tn;
    else if (predicted) ++cm.fp;
    else ++cm.fn;
  }
  return cm;
}

Score f1_from(double precision, double recall) {
  if (precision + recall == 0.0) return std::nullopt;
  return 2.0 * precision * recall / (precision + recall);
}

Scores scores(const ConfusionMatrix& cm) {
  Scores s;
  const auto total = static_cast<double>(cm.total());
  s.accuracy = total > 0 ? static_cast<double>(cm.tp + cm.tn) / total : 0.0;
  if (cm.tp + cm.fp > 0) s.precision = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fp);
  if (cm.tp + cm.fn > 0) s.recall = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
  if (s.precision && s.recall) s.f1 = f1_from(*s.precision, *s.recall);
  return s;
}

std::string format_score(const Score& s) {
  if (!s) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", *s);
  return buf;
}

}  // namespace atp
