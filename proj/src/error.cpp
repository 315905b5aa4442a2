#include "cubeperc/error.hpp"

namespace cubeperc {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::AlphaOutOfRange: return "AlphaOutOfRange";
    case Errc::DimensionTooSmall: return "DimensionTooSmall";
    case Errc::DimensionOverCap: return "DimensionOverCap";
    case Errc::DuplicateCoordinate: return "DuplicateCoordinate";
    case Errc::InvalidSpec: return "InvalidSpec";
    case Errc::NotAdjacent: return "NotAdjacent";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionMismatch: return "VersionMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::SourceAbsent: return "SourceAbsent";
    case Errc::CapExceeded: return "CapExceeded";
    case Errc::TooLarge: return "TooLarge";
    case Errc::OutOfRegime: return "OutOfRegime";
    case Errc::ImagesDisconnected: return "ImagesDisconnected";
    case Errc::MissingGolden: return "MissingGolden";
    case Errc::Mismatch: return "Mismatch";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace cubeperc
