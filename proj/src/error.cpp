#include "atp/error.hpp"

namespace atp {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::FileNotFound: return "FileNotFound";
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptImage: return "CorruptImage";
    case ErrorKind::InvalidImage: return "InvalidImage";
    case ErrorKind::InvalidDimensions: return "InvalidDimensions";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::DegenerateReference: return "DegenerateReference";
    case ErrorKind::EmptyThresholds: return "EmptyThresholds";
    case ErrorKind::LayoutMismatch: return "LayoutMismatch";
    case ErrorKind::LayoutHashMismatch: return "LayoutHashMismatch";
    case ErrorKind::SingleClassData: return "SingleClassData";
    case ErrorKind::InvalidRate: return "InvalidRate";
    case ErrorKind::BlockTooLarge: return "BlockTooLarge";
    case ErrorKind::ZeroSignalPower: return "ZeroSignalPower";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::MissingClassDirectory: return "MissingClassDirectory";
    case ErrorKind::NoImagesFound: return "NoImagesFound";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace atp
