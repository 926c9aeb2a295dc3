#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"

namespace faceswap {

// Per-dimension trajectory. Sinusoid evaluates a*sin(2*pi*frame/b + c deg),
// ramp interpolates a..b linearly over the clip.
struct TrajectorySpec {
  enum class Kind { Constant, Ramp, Sinusoid };
  Kind kind = Kind::Constant;
  double a = 0, b = 0, c = 0;

  double eval(int frame, int duration) const;
};

struct TextureSpec {
  double checker = 14.0;   // cell size, model units
  double gradient = 0.15;  // overlay strength
  double band = 0.5;       // edge smoothness: fraction of the sine wave kept
  uint64_t seed = 0;       // per-cell brightness jitter
};

struct BackgroundSpec {
  enum class Kind { Flat, Noise };
  Kind kind = Kind::Flat;
  double level = 0.5;
  double noise_amp = 0.1;
};

struct OcclusionSpec {
  bool enabled = false;
  double coverage = 0.0;  // fraction of the face bounding box, [0,1)
  int onset = 0;
  float color = 0.5f;
};

struct DistractorSpec {
  bool enabled = false;
  double offset_x = 0, offset_y = 0;  // pixels from the principal point
  double scale = 0.5;
  uint64_t seed = 99;  // texture jitter seed for the second ellipsoid
};

struct SceneScript {
  int duration = 1;
  TrajectorySpec tx, ty, rx, ry, rz;
  TrajectorySpec s{TrajectorySpec::Kind::Constant, 1.0};
  TrajectorySpec alpha{TrajectorySpec::Kind::Constant, 1.0};
  TextureSpec texture;
  BackgroundSpec background;
  OcclusionSpec occlusion;
  DistractorSpec distractor;
};

using GroundTruthTrace = std::vector<PoseState>;

// Exact pose at a frame, straight from the script formulas.
PoseState script_pose(const SceneScript& script, int frame);

// Procedural surface texture: smoothed checker with per-cell jitter and a
// brightness gradient overlay. Pure function of the model-space point.
double surface_texture(const Vec3& p, const EllipsoidModel& model,
                       const TextureSpec& tex);

// Renders the clip by per-pixel inverse orthographic mapping; applies the
// script's occlusion spec if enabled. Deterministic given the script.
std::pair<std::vector<Image>, GroundTruthTrace> render_sequence(
    const SceneScript& script, const EllipsoidModel& model,
    const CameraModel& cam);

// Overwrites a flat rectangle covering `coverage` of the face bounding box
// from the onset frame on. Frames and trace must be frame-aligned.
void inject_occlusion(std::vector<Image>& frames, const GroundTruthTrace& trace,
                      const EllipsoidModel& model, const CameraModel& cam,
                      const OcclusionSpec& spec);

// Adds a static background ellipsoid to the script. Throws OverlapError when
// its bounding box intersects the primary face's swept region.
SceneScript inject_distractor(const SceneScript& script,
                              const EllipsoidModel& model,
                              const CameraModel& cam,
                              const DistractorSpec& spec);

// Plain key = value script file.
SceneScript parse_scene_script(const std::string& text);
SceneScript load_scene_script(const std::filesystem::path& path);

}  // namespace faceswap
