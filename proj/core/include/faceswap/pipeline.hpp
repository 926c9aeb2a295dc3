#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "faceswap/facebank.hpp"
#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"
#include "faceswap/tracker.hpp"

namespace faceswap {

struct FrameMsg {
  long frame_index = 0;
  int64_t capture_ns = 0;
  Image image;
  std::optional<PoseState> pose;
  TrackStatus status = TrackStatus::Tracking;
  double residual = 0;
  Image output;
  int64_t done_ns = 0;
};

enum class PipelineMode { Deterministic, Live };

struct PipelineConfig {
  PipelineMode mode = PipelineMode::Deterministic;
  size_t queue_capacity = 2;
  int delay_frames = 0;
  bool track_enabled = true;
  bool swap_enabled = true;
  int feather_px = 5;
  uint64_t seed = 0;
};

struct LatencyReport {
  std::vector<double> samples_ms;
  double mean_ms = 0, p50_ms = 0, p95_ms = 0, max_ms = 0;
  long frames = 0;
  long dropped = 0;
};

// Nearest-rank percentiles over (capture, done) timestamp pairs.
LatencyReport measure_latency(
    const std::vector<std::pair<int64_t, int64_t>>& samples);

std::string latency_json(const LatencyReport& report);
void write_latency_json(const LatencyReport& report,
                        const std::filesystem::path& path);

// d-frame contingency delay; warm-up repeats the first frame.
std::vector<FrameMsg> delay_buffer(const std::vector<FrameMsg>& stream, int d);

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<Image> next() = 0;
};

class VectorSource : public FrameSource {
 public:
  explicit VectorSource(std::vector<Image> frames)
      : frames_(std::move(frames)) {}
  std::optional<Image> next() override {
    if (i_ >= frames_.size()) return std::nullopt;
    return frames_[i_++];
  }

 private:
  std::vector<Image> frames_;
  size_t i_ = 0;
};

// Reads frame_NNNNNN.ppm files in index order.
class DirectorySource : public FrameSource {
 public:
  explicit DirectorySource(const std::filesystem::path& dir);
  std::optional<Image> next() override;

 private:
  std::vector<std::filesystem::path> files_;
  size_t i_ = 0;
};

struct PipelineResult {
  std::vector<FrameMsg> outputs;  // after the contingency delay
  std::vector<PoseState> pose_trace;
  std::vector<TrackStatus> statuses;
  LatencyReport latency;
};

// Four stages (source, track, swap, sink) on independent workers joined by
// bounded queues. Deterministic mode blocks on overflow and reproduces
// bit-identical outputs for identical (seed, inputs); live mode drops the
// oldest queued frame. tracker may be null only when tracking is disabled;
// bank may be null only when swapping is disabled.
PipelineResult run_pipeline(FrameSource& source, Tracker* tracker,
                            const FaceBank* bank, const PipelineConfig& cfg);

}  // namespace faceswap
