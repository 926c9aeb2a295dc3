#include <cmath>
#include <random>

#include <json.hpp>

#include "doctest.h"
#include "faceswap/errors.hpp"
#include "faceswap/metrics.hpp"
#include "faceswap/trace.hpp"
#include "helpers.hpp"

using namespace faceswap;

TEST_CASE("identical traces score zero everywhere") {
  std::vector<PoseState> t(10);
  for (int i = 0; i < 10; ++i) t[i].ry = i * 3.0;
  PoseErrorMetrics m = pose_error(t, t);
  for (int d = 0; d < 7; ++d) {
    CHECK(m.mae[d] == 0);
    CHECK(m.rmse[d] == 0);
  }
  CHECK(m.frames == 10);
}

TEST_CASE("constant offset gives MAE = RMSE = offset") {
  std::vector<PoseState> truth(5), est(5);
  for (auto& p : est) p.rx = 5;
  PoseErrorMetrics m = pose_error(est, truth);
  CHECK(m.mae_of("rx") == doctest::Approx(5));
  CHECK(m.mae_of("ry") == 0);
  for (int d = 0; d < 7; ++d) CHECK(m.rmse[d] == doctest::Approx(m.mae[d]));
}

TEST_CASE("angular errors wrap across the 180-degree seam") {
  std::vector<PoseState> truth(1), est(1);
  truth[0].ry = 179;
  est[0].ry = -179;
  PoseErrorMetrics m = pose_error(est, truth);
  CHECK(m.mae_of("ry") == doctest::Approx(2));

  truth[0].ry = 359;  // same heading as -1
  est[0].ry = 1;
  m = pose_error(est, truth);
  CHECK(m.mae_of("ry") == doctest::Approx(2));

  // Translation differences are never wrapped.
  truth[0] = PoseState{};
  est[0] = PoseState{};
  est[0].tx = 300;
  m = pose_error(est, truth);
  CHECK(m.mae_of("tx") == doctest::Approx(300));
}

TEST_CASE("pose_error matches a brute-force recomputation to 1e-12") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0, 20);
  std::vector<PoseState> truth(50), est(50);
  for (int i = 0; i < 50; ++i) {
    truth[i].tx = g(rng);
    truth[i].rx = g(rng);
    truth[i].alpha = 1 + 0.1 * g(rng);
    est[i].tx = g(rng);
    est[i].rx = g(rng);
    est[i].alpha = 1 + 0.1 * g(rng);
  }
  PoseErrorMetrics m = pose_error(est, truth);

  auto wrap = [](double d) {
    while (d <= -180) d += 360;
    while (d > 180) d -= 360;
    return d;
  };
  double mae_tx = 0, mae_rx = 0, rmse_rx = 0;
  for (int i = 0; i < 50; ++i) {
    mae_tx += std::abs(est[i].tx - truth[i].tx);
    double dr = std::abs(wrap(est[i].rx - truth[i].rx));
    mae_rx += dr;
    rmse_rx += dr * dr;
  }
  CHECK(std::abs(m.mae_of("tx") - mae_tx / 50) < 1e-12);
  CHECK(std::abs(m.mae_of("rx") - mae_rx / 50) < 1e-12);
  CHECK(std::abs(m.rmse[3] - std::sqrt(rmse_rx / 50)) < 1e-12);
}

TEST_CASE("MAE never exceeds RMSE") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0, 5);
  std::vector<PoseState> truth(40), est(40);
  for (int i = 0; i < 40; ++i) {
    est[i].tx = g(rng);
    est[i].ry = g(rng);
    est[i].s = 1 + 0.1 * g(rng);
  }
  PoseErrorMetrics m = pose_error(est, truth);
  for (int d = 0; d < 7; ++d) CHECK(m.mae[d] <= m.rmse[d] + 1e-12);
}

TEST_CASE("pose_error rejects mismatched or empty traces") {
  std::vector<PoseState> a(3), b(4);
  CHECK_THROWS_AS(pose_error(a, b), LengthMismatch);
  std::vector<PoseState> none;
  CHECK_THROWS_AS(pose_error(none, none), EmptyInput);
}

TEST_CASE("metrics JSON has the documented schema") {
  std::vector<PoseState> truth(2), est(2);
  est[0].rx = 4;
  est[1].rx = 4;
  auto j = nlohmann::json::parse(metrics_json(pose_error(est, truth)));
  REQUIRE(j.contains("mae"));
  REQUIRE(j.contains("rmse"));
  REQUIRE(j.contains("frames"));
  for (const char* k : {"tx", "ty", "s", "rx", "ry", "rz", "alpha"}) {
    CHECK(j["mae"].contains(k));
    CHECK(j["rmse"].contains(k));
  }
  CHECK(j["mae"]["rx"] == doctest::Approx(4));
  CHECK(j["frames"] == 2);
}

TEST_CASE("pose trace CSV round-trips with and without statuses") {
  testutil::ScratchDir tmp("trace");
  std::vector<PoseState> t(6);
  for (int i = 0; i < 6; ++i) {
    t[i].tx = i * 1.5;
    t[i].ry = -i * 7.25;
    t[i].alpha = 1 + 0.01 * i;
  }

  write_pose_trace(tmp.path / "plain.csv", t);
  std::string text = testutil::read_file(tmp.path / "plain.csv");
  CHECK(text.rfind("frame,tx,ty,s,rx,ry,rz,alpha\n", 0) == 0);
  LoadedTrace plain = read_pose_trace(tmp.path / "plain.csv");
  REQUIRE(plain.poses.size() == 6);
  CHECK(plain.statuses.empty());
  for (int i = 0; i < 6; ++i) {
    CHECK(plain.poses[i].tx == doctest::Approx(t[i].tx).epsilon(1e-8));
    CHECK(plain.poses[i].ry == doctest::Approx(t[i].ry).epsilon(1e-8));
    CHECK(plain.poses[i].alpha == doctest::Approx(t[i].alpha).epsilon(1e-8));
  }

  std::vector<TrackStatus> st(6, TrackStatus::Tracking);
  st[4] = TrackStatus::Lost;
  write_pose_trace(tmp.path / "status.csv", t, &st);
  LoadedTrace with = read_pose_trace(tmp.path / "status.csv");
  REQUIRE(with.statuses.size() == 6);
  CHECK(with.statuses[4] == TrackStatus::Lost);
  CHECK(with.statuses[0] == TrackStatus::Tracking);
}

TEST_CASE("read_pose_trace rejects missing files") {
  CHECK_THROWS_AS(read_pose_trace("/nonexistent/trace.csv"), IoError);
}
