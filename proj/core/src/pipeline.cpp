#include "faceswap/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "faceswap/bounded_queue.hpp"
#include "faceswap/compositor.hpp"
#include "faceswap/errors.hpp"

namespace faceswap {

LatencyReport measure_latency(
    const std::vector<std::pair<int64_t, int64_t>>& samples) {
  if (samples.empty()) throw EmptyInput("no latency samples");
  LatencyReport r;
  r.samples_ms.reserve(samples.size());
  double sum = 0.0;
  for (auto [capture, done] : samples) {
    double ms = (done - capture) / 1e6;
    r.samples_ms.push_back(ms);
    sum += ms;
  }
  r.frames = static_cast<long>(samples.size());
  r.mean_ms = sum / r.frames;

  std::vector<double> sorted = r.samples_ms;
  std::sort(sorted.begin(), sorted.end());
  auto nearest_rank = [&](double pct) {
    size_t rank = static_cast<size_t>(std::ceil(pct / 100.0 * sorted.size()));
    rank = std::clamp<size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
  };
  r.p50_ms = nearest_rank(50.0);
  r.p95_ms = nearest_rank(95.0);
  r.max_ms = sorted.back();
  return r;
}

std::string latency_json(const LatencyReport& r) {
  nlohmann::json j;
  j["mean_ms"] = r.mean_ms;
  j["p50_ms"] = r.p50_ms;
  j["p95_ms"] = r.p95_ms;
  j["max_ms"] = r.max_ms;
  j["frames"] = r.frames;
  j["dropped"] = r.dropped;
  return j.dump();
}

void write_latency_json(const LatencyReport& report,
                        const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << latency_json(report) << "\n";
}

std::vector<FrameMsg> delay_buffer(const std::vector<FrameMsg>& stream, int d) {
  if (d <= 0 || stream.empty()) return stream;
  std::vector<FrameMsg> out;
  out.reserve(stream.size());
  for (size_t k = 0; k < stream.size(); ++k)
    out.push_back(k < static_cast<size_t>(d) ? stream.front()
                                             : stream[k - d]);
  return out;
}

DirectorySource::DirectorySource(const std::filesystem::path& dir) {
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (name.rfind("frame_", 0) == 0 && e.path().extension() == ".ppm")
      files_.push_back(e.path());
  }
  std::sort(files_.begin(), files_.end());
  if (files_.empty())
    throw IoError("no frame_*.ppm files in " + dir.string());
}

std::optional<Image> DirectorySource::next() {
  if (i_ >= files_.size()) return std::nullopt;
  return load_image(files_[i_++]);
}

namespace {

int64_t now_ns() {
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

}  // namespace

PipelineResult run_pipeline(FrameSource& source, Tracker* tracker,
                            const FaceBank* bank, const PipelineConfig& cfg) {
  if (cfg.queue_capacity < 1)
    throw InvalidArgument("queue_capacity must be >= 1");
  if (cfg.track_enabled && !tracker)
    throw InvalidArgument("tracking enabled but no tracker given");
  if (cfg.swap_enabled && cfg.track_enabled && !bank)
    throw InvalidArgument("swapping enabled but no bank given");

  const bool live = cfg.mode == PipelineMode::Live;
  BoundedQueue<FrameMsg> q_track(cfg.queue_capacity);
  BoundedQueue<FrameMsg> q_swap(cfg.queue_capacity);
  BoundedQueue<FrameMsg> q_sink(cfg.queue_capacity);
  std::atomic<long> dropped{0};
  std::exception_ptr failure;
  std::mutex failure_m;

  auto fail = [&](std::exception_ptr ep) {
    {
      std::lock_guard lock(failure_m);
      if (!failure) failure = ep;
    }
    q_track.close();
    q_swap.close();
    q_sink.close();
  };

  auto push = [&](BoundedQueue<FrameMsg>& q, FrameMsg msg) {
    if (live)
      dropped += q.push_drop_oldest(std::move(msg));
    else
      q.push_block(std::move(msg));
  };

  std::vector<FrameMsg> collected;

  std::thread source_worker([&] {
    try {
      long index = 0;
      while (auto img = source.next()) {
        FrameMsg msg;
        msg.frame_index = index++;
        msg.capture_ns = now_ns();
        msg.image = std::move(*img);
        push(q_track, std::move(msg));
      }
      q_track.close();  // SourceExhausted: normal termination
    } catch (...) {
      fail(std::current_exception());
    }
  });

  std::thread track_worker([&] {
    try {
      while (auto msg = q_track.pop()) {
        if (cfg.track_enabled) {
          TrackResult r = tracker->step(to_gray(msg->image));
          msg->pose = r.pose;
          msg->status = r.status;
          msg->residual = r.residual;
        }
        push(q_swap, std::move(*msg));
      }
      q_swap.close();
    } catch (...) {
      fail(std::current_exception());
    }
  });

  std::thread swap_worker([&] {
    try {
      while (auto msg = q_swap.pop()) {
        if (cfg.swap_enabled && msg->pose) {
          const PoseState& pose = *msg->pose;
          const FaceBankEntry& entry = bank->entries[select_entry(*bank, pose)];
          auto [warped, mask] = warp_entry(entry, pose, bank->cam);
          Image lit = match_illumination(warped, pose.alpha, entry.alpha_bank);
          msg->output = composite(msg->image, lit, mask, cfg.feather_px);
        } else {
          msg->output = msg->image;  // pass-through
        }
        push(q_sink, std::move(*msg));
      }
      q_sink.close();
    } catch (...) {
      fail(std::current_exception());
    }
  });

  std::thread sink_worker([&] {
    try {
      while (auto msg = q_sink.pop()) {
        msg->done_ns = now_ns();
        collected.push_back(std::move(*msg));
      }
    } catch (...) {
      fail(std::current_exception());
    }
  });

  source_worker.join();
  track_worker.join();
  swap_worker.join();
  sink_worker.join();

  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::exception& e) {
      throw StageFailure(e.what());
    }
  }

  PipelineResult result;
  std::vector<std::pair<int64_t, int64_t>> stamps;
  stamps.reserve(collected.size());
  for (const FrameMsg& m : collected)
    stamps.emplace_back(m.capture_ns, m.done_ns);
  result.latency =
      stamps.empty() ? LatencyReport{} : measure_latency(stamps);
  result.latency.dropped = dropped.load();

  result.outputs = delay_buffer(collected, cfg.delay_frames);
  for (const FrameMsg& m : result.outputs) {
    if (m.pose) result.pose_trace.push_back(*m.pose);
    result.statuses.push_back(m.status);
  }
  return result;
}

}  // namespace faceswap
