#pragma once

#include "faceswap/image.hpp"

namespace faceswap {

// Multiplies every channel by alpha_est/alpha_bank, clamped to [0,1].
Image match_illumination(const Image& image, double alpha_est,
                         double alpha_bank);

// Effective blend alpha: the mask ramped linearly from 0 at its boundary to
// full strength feather_px pixels inside.
Image feather_alpha(const Image& mask, int feather_px);

// out = a'*replacement + (1-a')*frame. Pixels with mask 0 are bit-identical
// to the frame.
Image composite(const Image& frame, const Image& replacement,
                const Image& mask, int feather_px);

}  // namespace faceswap
