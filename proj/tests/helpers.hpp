#pragma once

// Shared fixtures for the test suites: standard benchmark scripts, a frontal
// calibration render, and a scratch-directory guard.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"
#include "faceswap/synth.hpp"
#include "faceswap/tracker.hpp"

namespace testutil {

// 300-frame clip with sinusoidal yaw and pitch of amplitude 40 deg, both
// starting at phase 0 so frame 0 matches the calibration pose.
inline faceswap::SceneScript standard_clip() {
  faceswap::SceneScript sc;
  sc.duration = 300;
  sc.ry = {faceswap::TrajectorySpec::Kind::Sinusoid, 40, 300, 0};
  sc.rx = {faceswap::TrajectorySpec::Kind::Sinusoid, 40, 200, 0};
  return sc;
}

// Frontal render of the same scene at the calibration pose.
inline faceswap::Image frontal_render(const faceswap::EllipsoidModel& model,
                                      const faceswap::CameraModel& cam,
                                      const faceswap::TextureSpec& tex = {}) {
  faceswap::SceneScript sc;
  sc.duration = 1;
  sc.texture = tex;
  return faceswap::render_sequence(sc, model, cam).first.front();
}

inline faceswap::SparseTemplate standard_template(
    const faceswap::EllipsoidModel& model, const faceswap::CameraModel& cam,
    int n_points = 300) {
  faceswap::Image frontal = frontal_render(model, cam);
  return faceswap::calibrate_template(faceswap::to_gray(frontal), model, cam,
                                      n_points);
}

// Creates a unique scratch directory and removes it on destruction.
struct ScratchDir {
  std::filesystem::path path;

  explicit ScratchDir(const std::string& tag) {
    std::random_device rd;
    path = std::filesystem::temp_directory_path() /
           ("faceswap_test_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline bool images_equal(const faceswap::Image& a, const faceswap::Image& b) {
  return a.width() == b.width() && a.height() == b.height() &&
         a.channels() == b.channels() && a.data() == b.data();
}

}  // namespace testutil
