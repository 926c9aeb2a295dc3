#include "faceswap/metrics.hpp"

#include <cmath>

#include <json.hpp>

#include "faceswap/errors.hpp"

namespace faceswap {

namespace {

double angle_diff(double a, double b) {
  // Wrapped to (-180, 180] so 359 vs 1 scores 2, not 358.
  double d = std::fmod(a - b, 360.0);
  if (d <= -180.0) d += 360.0;
  if (d > 180.0) d -= 360.0;
  return d;
}

}  // namespace

double PoseErrorMetrics::mae_of(const std::string& dim) const {
  for (size_t i = 0; i < kPoseDims.size(); ++i)
    if (dim == kPoseDims[i]) return mae[i];
  throw InvalidArgument("unknown pose dimension: " + dim);
}

PoseErrorMetrics pose_error(const std::vector<PoseState>& estimated,
                            const std::vector<PoseState>& truth) {
  if (estimated.size() != truth.size())
    throw LengthMismatch("trace lengths differ: " +
                         std::to_string(estimated.size()) + " vs " +
                         std::to_string(truth.size()));
  if (truth.empty()) throw EmptyInput("no frames to compare");
  PoseErrorMetrics m;
  m.frames = static_cast<long>(truth.size());
  std::array<double, 7> sum_abs{}, sum_sq{};
  for (size_t f = 0; f < truth.size(); ++f) {
    const PoseState& e = estimated[f];
    const PoseState& t = truth[f];
    std::array<double, 7> err = {
        e.tx - t.tx,
        e.ty - t.ty,
        e.s - t.s,
        angle_diff(e.rx, t.rx),
        angle_diff(e.ry, t.ry),
        angle_diff(e.rz, t.rz),
        e.alpha - t.alpha,
    };
    std::array<double, 7> abs_err;
    for (size_t i = 0; i < 7; ++i) {
      abs_err[i] = std::abs(err[i]);
      sum_abs[i] += abs_err[i];
      sum_sq[i] += err[i] * err[i];
    }
    m.per_frame.push_back(abs_err);
  }
  for (size_t i = 0; i < 7; ++i) {
    m.mae[i] = sum_abs[i] / m.frames;
    m.rmse[i] = std::sqrt(sum_sq[i] / m.frames);
  }
  return m;
}

std::string metrics_json(const PoseErrorMetrics& m) {
  nlohmann::json mae, rmse;
  for (size_t i = 0; i < kPoseDims.size(); ++i) {
    mae[kPoseDims[i]] = m.mae[i];
    rmse[kPoseDims[i]] = m.rmse[i];
  }
  nlohmann::json j;
  j["mae"] = mae;
  j["rmse"] = rmse;
  j["frames"] = m.frames;
  return j.dump();
}

}  // namespace faceswap
