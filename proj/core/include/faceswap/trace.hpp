#pragma once

#include <filesystem>
#include <vector>

#include "faceswap/geometry.hpp"
#include "faceswap/tracker.hpp"

namespace faceswap {

// Pose trace CSV. Header: frame,tx,ty,s,rx,ry,rz,alpha
// Tracker output carries one extra `status` column.
void write_pose_trace(const std::filesystem::path& path,
                      const std::vector<PoseState>& trace,
                      const std::vector<TrackStatus>* statuses = nullptr);

struct LoadedTrace {
  std::vector<PoseState> poses;
  std::vector<TrackStatus> statuses;  // empty when the file has no status column
};

LoadedTrace read_pose_trace(const std::filesystem::path& path);

}  // namespace faceswap
