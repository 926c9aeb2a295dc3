#include <cstdio>
#include <random>

#include <json.hpp>

#include "doctest.h"
#include "faceswap/errors.hpp"
#include "faceswap/pipeline.hpp"
#include "faceswap/synth.hpp"
#include "helpers.hpp"

using namespace faceswap;

namespace {

std::vector<FrameMsg> numbered_stream(int n) {
  std::vector<FrameMsg> out;
  for (int i = 0; i < n; ++i) {
    FrameMsg m;
    m.frame_index = i;
    m.image = Image(4, 4, 3, static_cast<float>(i) / n);
    out.push_back(std::move(m));
  }
  return out;
}

struct SwapFixture {
  EllipsoidModel model;
  CameraModel cam;
  std::vector<Image> frames;
  SparseTemplate tmpl;
  FaceBank bank;

  explicit SwapFixture(int duration) {
    SceneScript sc = testutil::standard_clip();
    sc.duration = duration;
    frames = render_sequence(sc, model, cam).first;
    tmpl = testutil::standard_template(model, cam, 150);
    BankGrid g;
    g.pitch_min = g.yaw_min = -40;
    g.pitch_max = g.yaw_max = 40;
    g.step = 20;
    bank = build_bank(testutil::frontal_render(model, cam), model, cam, g);
  }

  Tracker tracker(uint64_t seed) const {
    TrackerConfig cfg;
    cfg.n_particles = 200;
    return Tracker(tmpl, model, cam, cfg, seed, PoseState{});
  }
};

}  // namespace

TEST_CASE("delay_buffer d=0 is the identity") {
  auto in = numbered_stream(10);
  auto out = delay_buffer(in, 0);
  REQUIRE(out.size() == in.size());
  for (size_t i = 0; i < in.size(); ++i)
    CHECK(testutil::images_equal(out[i].image, in[i].image));
}

TEST_CASE("delay_buffer shifts by d with freeze-frame warm-up") {
  auto in = numbered_stream(20);
  auto out = delay_buffer(in, 5);
  REQUIRE(out.size() == 20);
  CHECK(testutil::images_equal(out[12].image, in[7].image));
  for (int k = 0; k < 5; ++k)
    CHECK(testutil::images_equal(out[k].image, in[0].image));
}

TEST_CASE("delay identity property over several d") {
  auto in = numbered_stream(30);
  for (int d : {1, 3, 11}) {
    auto out = delay_buffer(in, d);
    REQUIRE(out.size() == in.size());
    for (size_t k = d; k < in.size(); ++k)
      CHECK(testutil::images_equal(out[k].image, in[k - d].image));
  }
}

TEST_CASE("measure_latency computes nearest-rank statistics") {
  auto ms = [](double v) { return static_cast<int64_t>(v * 1e6); };
  LatencyReport r = measure_latency({{0, ms(10)}, {0, ms(20)}, {0, ms(30)}});
  CHECK(r.mean_ms == doctest::Approx(20));
  CHECK(r.max_ms == doctest::Approx(30));
  CHECK(r.p50_ms == doctest::Approx(20));
  CHECK(r.frames == 3);

  LatencyReport single = measure_latency({{ms(1), ms(100)}});
  CHECK(single.mean_ms == doctest::Approx(99));
  CHECK(single.p50_ms == doctest::Approx(99));
  CHECK(single.p95_ms == doctest::Approx(99));
  CHECK(single.max_ms == doctest::Approx(99));

  // Nearest-rank p95 on 1..100 is the 95th value.
  std::vector<std::pair<int64_t, int64_t>> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back({0, ms(i)});
  LatencyReport h = measure_latency(hundred);
  CHECK(h.p95_ms == doctest::Approx(95));
  CHECK(h.p50_ms == doctest::Approx(50));

  CHECK_THROWS_AS(measure_latency({}), EmptyInput);
}

TEST_CASE("latency report invariant p50 <= p95 <= max") {
  std::vector<std::pair<int64_t, int64_t>> samples;
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int64_t> u(1, 1000000000);
  for (int i = 0; i < 57; ++i) samples.push_back({0, u(rng)});
  LatencyReport r = measure_latency(samples);
  CHECK(r.p50_ms <= r.p95_ms);
  CHECK(r.p95_ms <= r.max_ms);
}

TEST_CASE("latency JSON carries the full schema") {
  LatencyReport r = measure_latency({{0, 5000000}});
  auto j = nlohmann::json::parse(latency_json(r));
  for (const char* k : {"mean_ms", "p50_ms", "p95_ms", "max_ms", "frames", "dropped"})
    CHECK(j.contains(k));
  CHECK(j["frames"] == 1);
  CHECK(j["mean_ms"] == doctest::Approx(5.0));
}

TEST_CASE("deterministic pipeline runs are bit-identical") {
  SwapFixture fx(20);
  PipelineConfig cfg;
  cfg.mode = PipelineMode::Deterministic;
  cfg.seed = 5;

  auto run = [&] {
    VectorSource src(fx.frames);
    Tracker tr = fx.tracker(5);
    return run_pipeline(src, &tr, &fx.bank, cfg);
  };
  PipelineResult a = run(), b = run();
  REQUIRE(a.outputs.size() == b.outputs.size());
  REQUIRE(a.outputs.size() == fx.frames.size());
  CHECK(a.latency.dropped == 0);
  CHECK(b.latency.dropped == 0);
  for (size_t i = 0; i < a.outputs.size(); ++i) {
    CHECK(testutil::images_equal(a.outputs[i].output, b.outputs[i].output));
    CHECK(a.pose_trace[i].rx == b.pose_trace[i].rx);
    CHECK(a.pose_trace[i].ry == b.pose_trace[i].ry);
  }
}

TEST_CASE("pipeline with swap disabled passes frames through") {
  SwapFixture fx(8);
  PipelineConfig cfg;
  cfg.swap_enabled = false;
  VectorSource src(fx.frames);
  Tracker tr = fx.tracker(1);
  PipelineResult r = run_pipeline(src, &tr, nullptr, cfg);
  REQUIRE(r.outputs.size() == fx.frames.size());
  for (size_t i = 0; i < r.outputs.size(); ++i) {
    CHECK(testutil::images_equal(r.outputs[i].output, fx.frames[i]));
    CHECK(r.outputs[i].pose.has_value());
  }
}

TEST_CASE("pipeline applies the contingency delay to outputs") {
  SwapFixture fx(12);
  PipelineConfig cfg;
  cfg.swap_enabled = false;

  VectorSource a(fx.frames);
  Tracker ta = fx.tracker(3);
  PipelineResult plain = run_pipeline(a, &ta, nullptr, cfg);

  cfg.delay_frames = 4;
  VectorSource b(fx.frames);
  Tracker tb = fx.tracker(3);
  PipelineResult delayed = run_pipeline(b, &tb, nullptr, cfg);

  REQUIRE(delayed.outputs.size() == plain.outputs.size());
  for (size_t k = 4; k < delayed.outputs.size(); ++k)
    CHECK(testutil::images_equal(delayed.outputs[k].output,
                                 plain.outputs[k - 4].output));
  for (int k = 0; k < 4; ++k)
    CHECK(testutil::images_equal(delayed.outputs[k].output,
                                 plain.outputs[0].output));
}

TEST_CASE("live mode sheds load but keeps indices increasing") {
  SwapFixture fx(60);
  PipelineConfig cfg;
  cfg.mode = PipelineMode::Live;
  cfg.queue_capacity = 1;
  VectorSource src(fx.frames);
  Tracker tr = fx.tracker(7);
  PipelineResult r = run_pipeline(src, &tr, &fx.bank, cfg);

  // The instant source outruns the tracker, so something must drop.
  CHECK(r.latency.dropped > 0);
  CHECK(r.outputs.size() < fx.frames.size());
  CHECK(!r.outputs.empty());
  for (size_t i = 1; i < r.outputs.size(); ++i)
    CHECK(r.outputs[i].frame_index > r.outputs[i - 1].frame_index);
}

TEST_CASE("pipeline wraps stage errors in StageFailure") {
  SwapFixture fx(4);
  PipelineConfig cfg;
  // A bank whose entries are empty images blows up inside the swap stage.
  FaceBank broken;
  broken.entries.push_back(FaceBankEntry{});
  VectorSource src(fx.frames);
  Tracker tr = fx.tracker(1);
  CHECK_THROWS_AS(run_pipeline(src, &tr, &broken, cfg), StageFailure);
}

TEST_CASE("DirectorySource reads frames in index order") {
  testutil::ScratchDir tmp("dirsrc");
  for (int i : {2, 0, 1}) {
    Image img(3, 2, 3, static_cast<float>(i) / 4.0f);
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06d.ppm", i);
    save_image(img, tmp.path / name);
  }
  DirectorySource src(tmp.path);
  for (int i = 0; i < 3; ++i) {
    auto img = src.next();
    REQUIRE(img.has_value());
    CHECK(img->at(0, 0, 0) == doctest::Approx(i / 4.0).epsilon(0.01));
  }
  CHECK_FALSE(src.next().has_value());
}
