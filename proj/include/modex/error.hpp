#pragma once

#include <stdexcept>
#include <string>

namespace modex {

// Base class for every recoverable error raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MODEX_ERROR_TYPE(NAME)                                    \
  struct NAME : Error {                                           \
    explicit NAME(const std::string& msg) : Error(msg) {}         \
  }

MODEX_ERROR_TYPE(FileNotFoundError);
MODEX_ERROR_TYPE(TruncatedInputError);
MODEX_ERROR_TYPE(InvalidDimensionsError);
MODEX_ERROR_TYPE(OutOfRangeQpError);
MODEX_ERROR_TYPE(InvalidDepthForModeError);
MODEX_ERROR_TYPE(InvalidDepthForPartitionError);
MODEX_ERROR_TYPE(DimensionMismatchError);
MODEX_ERROR_TYPE(InvalidGenotypeError);
MODEX_ERROR_TYPE(DepthMismatchError);
MODEX_ERROR_TYPE(UnknownFeatureError);
MODEX_ERROR_TYPE(NoOverlapError);
MODEX_ERROR_TYPE(DegenerateFitError);
MODEX_ERROR_TYPE(ZeroReferenceEffortError);
MODEX_ERROR_TYPE(EmptyArchiveError);
MODEX_ERROR_TYPE(ParseError);
MODEX_ERROR_TYPE(ConfigError);

#undef MODEX_ERROR_TYPE

}  // namespace modex
