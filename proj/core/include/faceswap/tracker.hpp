#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"

namespace faceswap {

struct TemplatePoint {
  Vec3 p;       // on the ellipsoid surface, model units
  Vec3 n;       // outward unit normal
  double t = 0; // reference gray intensity in [0,1]
};

struct SparseTemplate {
  std::vector<TemplatePoint> points;
  std::string source;  // calibration image identifier
};

void save_template_csv(const SparseTemplate& tmpl, const std::filesystem::path& path);
SparseTemplate load_template_csv(const std::filesystem::path& path);

struct Particle {
  PoseState state;
  double weight = 0;
};

struct ParticleSet {
  std::vector<Particle> particles;
  std::mt19937_64 rng;
  long frame_index = 0;
};

// Per-dimension motion noise, std dev per frame.
struct MotionNoise {
  double tx = 1.0, ty = 1.0;
  double tx_dot = 0.3, ty_dot = 0.3;
  double s = 0.004;
  double rx = 1.2, ry = 0.8, rz = 0.5;
  double ry_dot = 0.3;
  double alpha = 0.01;
};

struct TrackerConfig {
  int n_particles = 800;
  MotionNoise noise;
  double sigma = 0.05;          // likelihood sigma, intensity units
  double tau = 0.25;            // robust truncation of squared residuals
  double min_visible = 0.55;    // poses showing fewer template points than
                                // this fraction are padded with tau residuals
  double lost_residual = 0.12;  // mean residual above this counts toward Lost
  int lost_frames = 10;         // consecutive frames before declaring Lost
};

// Pick n_points salient surface points from a frontal calibration image.
// The image must show the face centered at the principal point with s=1 and
// identity rotation. Points are ranked by local gradient magnitude and kept
// at a minimum projected pairwise distance of 2 px.
SparseTemplate calibrate_template(const Image& frontal_gray,
                                  const EllipsoidModel& model,
                                  const CameraModel& cam, int n_points);

// Constant-velocity prediction on (tx, ty, ry), random walk elsewhere,
// Gaussian noise per dimension. Angles re-wrapped, s and alpha clamped.
void predict(ParticleSet& set, const TrackerConfig& cfg);

// Truncated-quadratic template residual of one pose hypothesis, averaged
// over template points that are visible and project inside the frame.
double mean_residual(const PoseState& pose, const Image& frame_gray,
                     const SparseTemplate& tmpl, const EllipsoidModel& model,
                     const CameraModel& cam, const TrackerConfig& cfg);

// Assigns normalized weights exp(-r/(2 sigma^2)); pure per particle, safe to
// parallelize over the set.
void weigh(ParticleSet& set, const Image& frame_gray, const SparseTemplate& tmpl,
           const EllipsoidModel& model, const CameraModel& cam,
           const TrackerConfig& cfg);

// Systematic resampling; preserves cardinality, resets weights to 1/N.
void resample(ParticleSet& set);

// Weighted mean of every state dimension.
PoseState estimate(const ParticleSet& set);

enum class TrackStatus { Tracking, Lost };

inline const char* to_string(TrackStatus s) {
  return s == TrackStatus::Tracking ? "Tracking" : "Lost";
}

struct TrackResult {
  PoseState pose;
  TrackStatus status = TrackStatus::Tracking;
  double residual = 0;  // mean residual at the estimate
};

// Per-frame predict -> weigh -> estimate -> resample, with lost-track
// bookkeeping. Deterministic given (seed, frames, config).
class Tracker {
 public:
  Tracker(SparseTemplate tmpl, EllipsoidModel model, CameraModel cam,
          TrackerConfig cfg, uint64_t seed, const PoseState& init);

  TrackResult step(const Image& frame_gray);

  const ParticleSet& particles() const { return set_; }
  const TrackerConfig& config() const { return cfg_; }

 private:
  SparseTemplate tmpl_;
  EllipsoidModel model_;
  CameraModel cam_;
  TrackerConfig cfg_;
  ParticleSet set_;
  int lost_streak_ = 0;
};

}  // namespace faceswap
