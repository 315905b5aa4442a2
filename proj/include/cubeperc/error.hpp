#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cubeperc {

enum class Errc {
  InvalidArgument,
  AlphaOutOfRange,
  DimensionTooSmall,
  DimensionOverCap,
  DuplicateCoordinate,
  InvalidSpec,
  NotAdjacent,
  BadMagic,
  VersionMismatch,
  LengthMismatch,
  SourceAbsent,
  CapExceeded,
  TooLarge,
  OutOfRegime,
  ImagesDisconnected,
  MissingGolden,
  Mismatch,
  ConfigError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace cubeperc
