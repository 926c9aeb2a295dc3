#pragma once

#include <array>
#include <string>
#include <vector>

#include "faceswap/geometry.hpp"

namespace faceswap {

// Dimensions compared between an estimated trace and ground truth.
inline constexpr std::array<const char*, 7> kPoseDims = {
    "tx", "ty", "s", "rx", "ry", "rz", "alpha"};

struct PoseErrorMetrics {
  std::array<double, 7> mae{};
  std::array<double, 7> rmse{};
  std::vector<std::array<double, 7>> per_frame;  // absolute errors
  long frames = 0;

  double mae_of(const std::string& dim) const;
};

// Per-dimension MAE/RMSE; angular differences wrapped to (-180, 180].
PoseErrorMetrics pose_error(const std::vector<PoseState>& estimated,
                            const std::vector<PoseState>& truth);

// {"mae":{...},"rmse":{...},"frames":n}
std::string metrics_json(const PoseErrorMetrics& m);

}  // namespace faceswap
