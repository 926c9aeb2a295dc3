// Microbenchmarks for the per-frame hot path: particle weighing, full
// tracker steps, warping, compositing, and synthetic rendering.

#include <benchmark/benchmark.h>

#include "faceswap/compositor.hpp"
#include "faceswap/facebank.hpp"
#include "faceswap/pipeline.hpp"
#include "faceswap/synth.hpp"
#include "faceswap/tracker.hpp"

using namespace faceswap;

namespace {

struct Fixture {
  EllipsoidModel model;
  CameraModel cam;
  Image frontal;
  Image frame_gray;
  SparseTemplate tmpl;
  FaceBank bank;

  Fixture() {
    SceneScript sc;
    sc.duration = 1;
    frontal = render_sequence(sc, model, cam).first.front();
    sc.ry = {TrajectorySpec::Kind::Constant, 15};
    frame_gray = to_gray(render_sequence(sc, model, cam).first.front());
    tmpl = calibrate_template(to_gray(frontal), model, cam, 300);
    BankGrid grid;
    grid.pitch_min = grid.yaw_min = -40;
    grid.pitch_max = grid.yaw_max = 40;
    grid.step = 20;
    bank = build_bank(frontal, model, cam, grid);
  }
};

Fixture& fixture() {
  static Fixture fx;
  return fx;
}

}  // namespace

static void BM_weigh(benchmark::State& state) {
  Fixture& fx = fixture();
  TrackerConfig cfg;
  cfg.n_particles = static_cast<int>(state.range(0));
  ParticleSet set;
  set.rng.seed(1);
  set.particles.assign(cfg.n_particles, Particle{PoseState{}, 1.0});
  predict(set, cfg);
  for (auto _ : state)
    weigh(set, fx.frame_gray, fx.tmpl, fx.model, fx.cam, cfg);
  state.SetItemsProcessed(state.iterations() * cfg.n_particles);
}
BENCHMARK(BM_weigh)->Arg(500)->Arg(800);

static void BM_track_frame(benchmark::State& state) {
  Fixture& fx = fixture();
  TrackerConfig cfg;
  cfg.n_particles = static_cast<int>(state.range(0));
  Tracker tr(fx.tmpl, fx.model, fx.cam, cfg, 1, PoseState{});
  for (auto _ : state) benchmark::DoNotOptimize(tr.step(fx.frame_gray));
}
BENCHMARK(BM_track_frame)->Arg(500)->Arg(800);

static void BM_warp_entry(benchmark::State& state) {
  Fixture& fx = fixture();
  PoseState pose;
  pose.rz = 12;
  pose.s = 1.1;
  pose.tx = 6;
  const FaceBankEntry& e = fx.bank.entries[select_entry(fx.bank, pose)];
  for (auto _ : state) benchmark::DoNotOptimize(warp_entry(e, pose, fx.cam));
}
BENCHMARK(BM_warp_entry);

static void BM_composite(benchmark::State& state) {
  Fixture& fx = fixture();
  const FaceBankEntry& e = fx.bank.entries[select_entry(fx.bank, PoseState{})];
  for (auto _ : state)
    benchmark::DoNotOptimize(composite(fx.frontal, e.image, e.mask, 5));
}
BENCHMARK(BM_composite);

static void BM_render_frame(benchmark::State& state) {
  EllipsoidModel model;
  CameraModel cam;
  SceneScript sc;
  sc.duration = 1;
  sc.ry = {TrajectorySpec::Kind::Constant, 20};
  for (auto _ : state)
    benchmark::DoNotOptimize(render_sequence(sc, model, cam));
}
BENCHMARK(BM_render_frame);

BENCHMARK_MAIN();
