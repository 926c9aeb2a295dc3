#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"

namespace faceswap {

struct FaceBankEntry {
  Image image;  // canonical frame: s=1, centered, rz=0
  Image mask;   // alpha in [0,1], silhouette-derived
  double tag_rx = 0, tag_ry = 0;  // degrees
  double alpha_bank = 1.0;        // illumination of the calibration image
};

struct BankGrid {
  double pitch_min = -70, pitch_max = 70;
  double yaw_min = -70, yaw_max = 70;
  double step = 10;
};

struct FaceBank {
  std::vector<FaceBankEntry> entries;  // pitch-major enumeration
  BankGrid grid;
  EllipsoidModel model;
  CameraModel cam;
};

// Renders one entry per grid node by texture-mapping the frontal image onto
// the ellipsoid and re-rendering it at the node's pitch/yaw.
FaceBank build_bank(const Image& frontal_color, const EllipsoidModel& model,
                    const CameraModel& cam, const BankGrid& grid);

// Nearest entry by Euclidean distance in (rx, ry); ties break low index.
int select_entry(const FaceBank& bank, const PoseState& pose);

// 2D similarity warp of the canonical entry to the query pose: scale s,
// in-plane rotation rz, translation to (cx+tx, cy+ty).
std::pair<Image, Image> warp_entry(const FaceBankEntry& entry,
                                   const PoseState& pose,
                                   const CameraModel& cam);

// Bank directory layout: bank.meta plus entry_<rx>_<ry>.ppm / .pgm pairs.
void save_bank(const FaceBank& bank, const std::filesystem::path& dir);
FaceBank load_bank(const std::filesystem::path& dir);

}  // namespace faceswap
