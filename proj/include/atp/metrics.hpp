#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace atp {

/// Counts with the fake class (+1) as positive.
struct ConfusionMatrix {
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  std::size_t total() const noexcept { return tp + tn + fp + fn; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

// An empty optional is an undefined score (zero denominator); it renders as "-".
using Score = std::optional<double>;

struct Scores {
  double accuracy = 0.0;
  Score precision;  // undefined when tp + fp == 0
  Score recall;     // undefined when tp + fn == 0
  Score f1;
};

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> pred);

Scores scores(const ConfusionMatrix& cm);

// Harmonic mean of precision and recall; undefined when both are zero.
Score f1_from(double precision, double recall);

// Four decimals, or "-" when undefined.
std::string format_score(const Score& s);

}  // namespace atp
