#pragma once

#include <stdexcept>
#include <string>

namespace faceswap {

// Domain error types. Each maps to one failure mode of a public operation.
#define FACESWAP_DEFINE_ERROR(Name)                       \
  struct Name : std::runtime_error {                      \
    explicit Name(const std::string& msg)                 \
        : std::runtime_error(std::string(#Name ": ") + msg) {} \
  }

FACESWAP_DEFINE_ERROR(EmptyMask);
FACESWAP_DEFINE_ERROR(InsufficientTexture);
FACESWAP_DEFINE_ERROR(InvalidArgument);
FACESWAP_DEFINE_ERROR(EmptyTemplate);
FACESWAP_DEFINE_ERROR(DegenerateWeights);
FACESWAP_DEFINE_ERROR(InvalidGrid);
FACESWAP_DEFINE_ERROR(EmptyOutput);
FACESWAP_DEFINE_ERROR(InvalidGain);
FACESWAP_DEFINE_ERROR(DimensionMismatch);
FACESWAP_DEFINE_ERROR(InvalidScript);
FACESWAP_DEFINE_ERROR(InvalidCoverage);
FACESWAP_DEFINE_ERROR(OverlapError);
FACESWAP_DEFINE_ERROR(EmptyInput);
FACESWAP_DEFINE_ERROR(LengthMismatch);
FACESWAP_DEFINE_ERROR(StageFailure);
FACESWAP_DEFINE_ERROR(IoError);

#undef FACESWAP_DEFINE_ERROR

}  // namespace faceswap
