#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atp {

enum class ErrorKind {
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  InvalidImage,
  InvalidDimensions,
  DimensionTooSmall,
  DimensionMismatch,
  InvalidParams,
  DegenerateReference,
  EmptyThresholds,
  LayoutMismatch,
  LayoutHashMismatch,
  SingleClassData,
  InvalidRate,
  BlockTooLarge,
  ZeroSignalPower,
  LengthMismatch,
  EmptyInput,
  InvalidSpec,
  InvalidConfig,
  MissingClassDirectory,
  NoImagesFound,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace atp
