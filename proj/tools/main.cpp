// faceswap command-line tool: calibration, bank building, synthetic clips,
// tracking, swapping, evaluation, and latency benchmarking.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "faceswap/compositor.hpp"
#include "faceswap/errors.hpp"
#include "faceswap/facebank.hpp"
#include "faceswap/geometry.hpp"
#include "faceswap/image.hpp"
#include "faceswap/metrics.hpp"
#include "faceswap/pipeline.hpp"
#include "faceswap/synth.hpp"
#include "faceswap/trace.hpp"
#include "faceswap/tracker.hpp"

namespace fs = std::filesystem;
using namespace faceswap;

namespace {

struct CommonOpts {
  EllipsoidModel model;
  CameraModel cam;
  TrackerConfig tracker;
  uint64_t seed = 0;
};

void add_model_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--ax", o.model.ax, "ellipsoid semi-axis x (model units)");
  cmd->add_option("--ay", o.model.ay, "ellipsoid semi-axis y");
  cmd->add_option("--az", o.model.az, "ellipsoid semi-axis z");
  cmd->add_option("--width", o.cam.width, "image width (px)");
  cmd->add_option("--height", o.cam.height, "image height (px)");
  cmd->add_option("--cx", o.cam.cx, "principal point x");
  cmd->add_option("--cy", o.cam.cy, "principal point y");
}

void add_tracker_options(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--particles", o.tracker.n_particles, "particle count");
  cmd->add_option("--sigma", o.tracker.sigma, "likelihood sigma");
  cmd->add_option("--tau", o.tracker.tau, "residual truncation");
  cmd->add_option("--lost-residual", o.tracker.lost_residual,
                  "lost-track residual threshold");
  cmd->add_option("--lost-frames", o.tracker.lost_frames,
                  "consecutive frames before Lost");
  cmd->add_option("--noise-tx", o.tracker.noise.tx, "motion noise std, tx");
  cmd->add_option("--noise-ty", o.tracker.noise.ty, "motion noise std, ty");
  cmd->add_option("--noise-rx", o.tracker.noise.rx, "motion noise std, rx");
  cmd->add_option("--noise-ry", o.tracker.noise.ry, "motion noise std, ry");
  cmd->add_option("--noise-rz", o.tracker.noise.rz, "motion noise std, rz");
  cmd->add_option("--seed", o.seed, "RNG seed");
}

void write_frames(const std::vector<Image>& frames, const fs::path& dir) {
  fs::create_directories(dir);
  char name[32];
  for (size_t i = 0; i < frames.size(); ++i) {
    std::snprintf(name, sizeof(name), "frame_%06zu.ppm", i);
    save_image(frames[i], dir / name);
  }
}

std::vector<Image> read_frames(const fs::path& dir) {
  DirectorySource src(dir);
  std::vector<Image> frames;
  while (auto f = src.next()) frames.push_back(std::move(*f));
  return frames;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faceswap: particle-filter head tracking and face swapping"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain key = value config file");

  CommonOpts o;

  // calibrate
  std::string in_path, out_path;
  int n_points = 300;
  auto* calibrate_cmd =
      app.add_subcommand("calibrate", "frontal image -> template CSV");
  calibrate_cmd->add_option("--input", in_path, "frontal image (PPM/PGM)")
      ->required();
  calibrate_cmd->add_option("--output", out_path, "template CSV")->required();
  calibrate_cmd->add_option("--points", n_points, "template point count");
  add_model_options(calibrate_cmd, o);

  // build-bank
  std::string bank_dir;
  BankGrid grid;
  auto* bank_cmd =
      app.add_subcommand("build-bank", "frontal image -> bank directory");
  bank_cmd->add_option("--input", in_path, "frontal image (PPM)")->required();
  bank_cmd->add_option("--output", bank_dir, "bank directory")->required();
  bank_cmd->add_option("--pitch-min", grid.pitch_min, "grid pitch min (deg)");
  bank_cmd->add_option("--pitch-max", grid.pitch_max, "grid pitch max (deg)");
  bank_cmd->add_option("--yaw-min", grid.yaw_min, "grid yaw min (deg)");
  bank_cmd->add_option("--yaw-max", grid.yaw_max, "grid yaw max (deg)");
  bank_cmd->add_option("--step", grid.step, "grid step (deg)");
  add_model_options(bank_cmd, o);

  // synth
  std::string script_path, frames_dir, truth_path;
  auto* synth_cmd =
      app.add_subcommand("synth", "script file -> frames + truth CSV");
  synth_cmd->add_option("--script", script_path, "scene script")->required();
  synth_cmd->add_option("--out-dir", frames_dir, "frame output directory")
      ->required();
  synth_cmd->add_option("--truth", truth_path, "ground-truth CSV")->required();
  add_model_options(synth_cmd, o);

  // track
  std::string template_path, pose_path;
  auto* track_cmd =
      app.add_subcommand("track", "frames + template -> pose CSV");
  track_cmd->add_option("--frames", frames_dir, "input frame directory")
      ->required();
  track_cmd->add_option("--template", template_path, "template CSV")
      ->required();
  track_cmd->add_option("--output", pose_path, "pose CSV with status column")
      ->required();
  add_model_options(track_cmd, o);
  add_tracker_options(track_cmd, o);

  // swap
  std::string out_dir, latency_path;
  std::string mode = "deterministic";
  int delay = 0, feather = 5;
  size_t queue_capacity = 2;
  bool no_swap = false;
  auto* swap_cmd = app.add_subcommand(
      "swap", "frames + template + bank -> swapped frames + pose CSV + latency");
  swap_cmd->add_option("--frames", frames_dir, "input frame directory")
      ->required();
  swap_cmd->add_option("--template", template_path, "template CSV")->required();
  swap_cmd->add_option("--bank", bank_dir, "bank directory")->required();
  swap_cmd->add_option("--out-dir", out_dir, "output frame directory")
      ->required();
  swap_cmd->add_option("--pose-out", pose_path, "pose CSV");
  swap_cmd->add_option("--latency-out", latency_path, "latency report JSON");
  swap_cmd->add_option("--delay", delay, "contingency delay, frames");
  swap_cmd->add_option("--mode", mode, "deterministic | live")
      ->check(CLI::IsMember({"deterministic", "live"}));
  swap_cmd->add_option("--feather", feather, "composite feather, px");
  swap_cmd->add_option("--queue-capacity", queue_capacity, "stage queue size");
  swap_cmd->add_flag("--no-swap", no_swap, "annotate poses only");
  add_model_options(swap_cmd, o);
  add_tracker_options(swap_cmd, o);

  // eval
  std::string est_path, metrics_path;
  auto* eval_cmd = app.add_subcommand("eval", "two pose CSVs -> metrics JSON");
  eval_cmd->add_option("--estimated", est_path, "estimated pose CSV")
      ->required();
  eval_cmd->add_option("--truth", truth_path, "ground-truth pose CSV")
      ->required();
  eval_cmd->add_option("--output", metrics_path, "metrics JSON");

  // bench
  int duration = 300;
  auto* bench_cmd = app.add_subcommand(
      "bench", "synthetic clip end-to-end -> latency JSON");
  bench_cmd->add_option("--duration", duration, "clip length, frames");
  bench_cmd->add_option("--latency-out", latency_path, "latency report JSON");
  add_model_options(bench_cmd, o);
  add_tracker_options(bench_cmd, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // reports the offending flag on stderr
    return 1;
  }

  try {
    if (*calibrate_cmd) {
      Image img = to_gray(load_image(in_path));
      SparseTemplate tmpl = calibrate_template(img, o.model, o.cam, n_points);
      tmpl.source = fs::path(in_path).filename().string();
      save_template_csv(tmpl, out_path);
      std::cout << "wrote " << tmpl.points.size() << " template points to "
                << out_path << "\n";
    } else if (*bank_cmd) {
      Image img = load_image(in_path);
      FaceBank bank = build_bank(img, o.model, o.cam, grid);
      save_bank(bank, bank_dir);
      std::cout << "wrote " << bank.entries.size() << " bank entries to "
                << bank_dir << "\n";
    } else if (*synth_cmd) {
      SceneScript script = load_scene_script(script_path);
      auto [frames, trace] = render_sequence(script, o.model, o.cam);
      write_frames(frames, frames_dir);
      write_pose_trace(truth_path, trace);
      std::cout << "rendered " << frames.size() << " frames to " << frames_dir
                << "\n";
    } else if (*track_cmd) {
      SparseTemplate tmpl = load_template_csv(template_path);
      Tracker tracker(tmpl, o.model, o.cam, o.tracker, o.seed, PoseState{});
      DirectorySource src(frames_dir);
      std::vector<PoseState> poses;
      std::vector<TrackStatus> statuses;
      while (auto frame = src.next()) {
        TrackResult r = tracker.step(to_gray(*frame));
        poses.push_back(r.pose);
        statuses.push_back(r.status);
      }
      write_pose_trace(pose_path, poses, &statuses);
      std::cout << "tracked " << poses.size() << " frames -> " << pose_path
                << "\n";
    } else if (*swap_cmd) {
      SparseTemplate tmpl = load_template_csv(template_path);
      FaceBank bank = load_bank(bank_dir);
      Tracker tracker(tmpl, o.model, o.cam, o.tracker, o.seed, PoseState{});
      DirectorySource src(frames_dir);
      PipelineConfig cfg;
      cfg.mode = mode == "live" ? PipelineMode::Live : PipelineMode::Deterministic;
      cfg.queue_capacity = queue_capacity;
      cfg.delay_frames = delay;
      cfg.swap_enabled = !no_swap;
      cfg.feather_px = feather;
      cfg.seed = o.seed;
      PipelineResult result = run_pipeline(src, &tracker, &bank, cfg);

      std::vector<Image> outputs;
      outputs.reserve(result.outputs.size());
      for (const FrameMsg& m : result.outputs) outputs.push_back(m.output);
      write_frames(outputs, out_dir);
      if (!pose_path.empty())
        write_pose_trace(pose_path, result.pose_trace, &result.statuses);
      if (!latency_path.empty())
        write_latency_json(result.latency, latency_path);
      std::cout << "swapped " << outputs.size() << " frames ("
                << result.latency.dropped << " dropped) -> " << out_dir << "\n";
    } else if (*eval_cmd) {
      LoadedTrace est = read_pose_trace(est_path);
      LoadedTrace truth = read_pose_trace(truth_path);
      PoseErrorMetrics m = pose_error(est.poses, truth.poses);
      std::string json = metrics_json(m);
      if (!metrics_path.empty()) {
        std::ofstream f(metrics_path);
        f << json << "\n";
      }
      std::cout << json << "\n";
    } else if (*bench_cmd) {
      // Self-contained: synthesize the clip, calibrate, build a bank, then
      // time the full track+swap pipeline on it.
      SceneScript script;
      script.duration = duration;
      script.ry = {TrajectorySpec::Kind::Sinusoid, 40.0, 300.0, 0.0};
      script.rx = {TrajectorySpec::Kind::Sinusoid, 40.0, 300.0, 90.0};
      script.texture.seed = o.seed;
      auto [frames, trace] = render_sequence(script, o.model, o.cam);

      SceneScript frontal = script;
      frontal.duration = 1;
      frontal.rx = {};
      frontal.ry = {};
      Image calib = render_sequence(frontal, o.model, o.cam).first.front();
      SparseTemplate tmpl =
          calibrate_template(to_gray(calib), o.model, o.cam, 300);
      FaceBank bank = build_bank(calib, o.model, o.cam, BankGrid{});

      Tracker tracker(tmpl, o.model, o.cam, o.tracker, o.seed, PoseState{});
      VectorSource src(std::move(frames));
      PipelineConfig cfg;
      cfg.seed = o.seed;
      PipelineResult result = run_pipeline(src, &tracker, &bank, cfg);
      std::string json = latency_json(result.latency);
      if (!latency_path.empty())
        write_latency_json(result.latency, latency_path);
      std::cout << json << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
