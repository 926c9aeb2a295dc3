#include "faceswap/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "faceswap/errors.hpp"

namespace faceswap {

double TrajectorySpec::eval(int frame, int duration) const {
  switch (kind) {
    case Kind::Constant:
      return a;
    case Kind::Ramp:
      return duration > 1 ? a + (b - a) * frame / (duration - 1.0) : a;
    case Kind::Sinusoid:
      return a * std::sin(2.0 * M_PI * frame / b + c * M_PI / 180.0);
  }
  return a;
}

PoseState script_pose(const SceneScript& sc, int frame) {
  auto v = [&](const TrajectorySpec& t, int f) { return t.eval(f, sc.duration); };
  PoseState p;
  p.tx = v(sc.tx, frame);
  p.ty = v(sc.ty, frame);
  p.s = v(sc.s, frame);
  p.rx = v(sc.rx, frame);
  p.ry = v(sc.ry, frame);
  p.rz = v(sc.rz, frame);
  p.alpha = v(sc.alpha, frame);
  int f1 = std::min(frame + 1, sc.duration - 1);
  int f0 = std::max(frame - 1, 0);
  double span = std::max(1, f1 - f0);
  p.tx_dot = (v(sc.tx, f1) - v(sc.tx, f0)) / span;
  p.ty_dot = (v(sc.ty, f1) - v(sc.ty, f0)) / span;
  p.ry_dot = (v(sc.ry, f1) - v(sc.ry, f0)) / span;
  return p;
}

namespace {

uint64_t hash_cell(uint64_t seed, int64_t i, int64_t j) {
  uint64_t h = seed * 0x9e3779b97f4a7c15ULL;
  h ^= static_cast<uint64_t>(i) * 0xc2b2ae3d27d4eb4fULL;
  h ^= static_cast<uint64_t>(j) * 0x165667b19e3779f9ULL;
  h ^= h >> 31;
  h *= 0xd6e8feb86659fd93ULL;
  h ^= h >> 32;
  return h;
}

// Smoothed square wave: +-1 plateaus with a transition band. A narrow band
// localizes checker edges within about a pixel; a wide band leaves intensity
// gradients over several pixels for the tracker to climb.
double square_wave(double t, double size, double band) {
  return std::clamp(std::sin(M_PI * t / size) / band, -1.0, 1.0);
}

}  // namespace

double surface_texture(const Vec3& p, const EllipsoidModel& model,
                       const TextureSpec& tex) {
  double checker = 0.30 * square_wave(p.x, tex.checker, tex.band) *
                   square_wave(p.y, tex.checker, tex.band);
  // Per-cell brightness jitter breaks the translation symmetry of the grid,
  // so shifted poses do not alias onto neighboring cells.
  int64_t ci = static_cast<int64_t>(std::floor(p.x / tex.checker));
  int64_t cj = static_cast<int64_t>(std::floor(p.y / tex.checker));
  double jitter =
      ((hash_cell(tex.seed, ci, cj) % 1000) / 999.0 - 0.5) * 0.14;
  double overlay =
      tex.gradient * (0.5 * p.x / model.ax + 0.25 * p.y / model.ay);
  return std::clamp(0.5 + checker + jitter + overlay, 0.0, 1.0);
}

std::pair<std::vector<Image>, GroundTruthTrace> render_sequence(
    const SceneScript& sc, const EllipsoidModel& model, const CameraModel& cam) {
  if (sc.duration < 1) throw InvalidScript("duration must be >= 1");
  if (sc.texture.checker <= 0) throw InvalidScript("checker size must be > 0");

  // Static background layer, fixed for the whole clip.
  Image bg(cam.width, cam.height, 1, static_cast<float>(sc.background.level));
  if (sc.background.kind == BackgroundSpec::Kind::Noise) {
    std::mt19937_64 rng(sc.texture.seed + 1);
    std::uniform_real_distribution<double> uni(-sc.background.noise_amp,
                                               sc.background.noise_amp);
    for (float& v : bg.data())
      v = std::clamp(static_cast<double>(v) + uni(rng), 0.0, 1.0);
  }

  DistractorSpec dis = sc.distractor;
  PoseState dis_pose;
  EllipsoidModel dis_model = model;
  TextureSpec dis_tex = sc.texture;
  if (dis.enabled) {
    dis_pose.tx = dis.offset_x;
    dis_pose.ty = dis.offset_y;
    dis_pose.s = dis.scale;
    dis_tex.seed = dis.seed;
    if (bg.contains(cam.cx + dis.offset_x, cam.cy + dis.offset_y)) {
      SilhouetteEllipse de = silhouette_ellipse(dis_model, dis_pose, cam);
      auto bb = de.bbox();
      for (int y = std::max(0, (int)bb[1]); y <= std::min(cam.height - 1, (int)std::ceil(bb[3])); ++y)
        for (int x = std::max(0, (int)bb[0]); x <= std::min(cam.width - 1, (int)std::ceil(bb[2])); ++x) {
          if (!de.contains(x, y)) continue;
          Vec3 p;
          if (unproject_to_surface(x, y, dis_model, dis_pose, cam, &p))
            bg.at(x, y) = static_cast<float>(surface_texture(p, dis_model, dis_tex));
        }
    }
  }

  std::vector<Image> frames;
  frames.reserve(sc.duration);
  GroundTruthTrace trace;
  trace.reserve(sc.duration);

  for (int f = 0; f < sc.duration; ++f) {
    PoseState pose = script_pose(sc, f);
    trace.push_back(pose);

    Image frame(cam.width, cam.height, 3);
    SilhouetteEllipse sil = silhouette_ellipse(model, pose, cam);
    for (int y = 0; y < cam.height; ++y) {
      for (int x = 0; x < cam.width; ++x) {
        double val = bg.at(x, y);
        if (sil.contains(x, y)) {
          Vec3 p;
          if (unproject_to_surface(x, y, model, pose, cam, &p))
            val = surface_texture(p, model, sc.texture);
        }
        float out = static_cast<float>(std::clamp(val * pose.alpha, 0.0, 1.0));
        frame.at(x, y, 0) = frame.at(x, y, 1) = frame.at(x, y, 2) = out;
      }
    }
    frames.push_back(std::move(frame));
  }

  if (sc.occlusion.enabled)
    inject_occlusion(frames, trace, model, cam, sc.occlusion);
  return {std::move(frames), std::move(trace)};
}

void inject_occlusion(std::vector<Image>& frames, const GroundTruthTrace& trace,
                      const EllipsoidModel& model, const CameraModel& cam,
                      const OcclusionSpec& spec) {
  if (spec.coverage < 0.0 || spec.coverage >= 1.0)
    throw InvalidCoverage("coverage must be in [0, 1)");
  if (spec.coverage == 0.0) return;
  if (frames.size() != trace.size())
    throw LengthMismatch("frames and trace differ in length");

  double side = std::sqrt(spec.coverage);
  size_t onset = static_cast<size_t>(std::max(0, spec.onset));
  if (onset >= frames.size()) return;

  // The rectangle is placed against the face's bounding box at the onset
  // frame and stays put, like a toy or hand raised in front of the face.
  auto bb = silhouette_ellipse(model, trace[onset], cam).bbox();
  double bw = bb[2] - bb[0], bh = bb[3] - bb[1];
  double w = bw * side, h = bh * side;
  double cx = 0.5 * (bb[0] + bb[2]);  // bottom-center anchor
  int x0 = std::max(0, (int)std::lround(cx - w / 2));
  int x1 = std::min(cam.width - 1, (int)std::lround(cx + w / 2) - 1);
  int y1 = std::min(cam.height - 1, (int)std::lround(bb[3]) - 1);
  int y0 = std::max(0, (int)std::lround(bb[3] - h));
  for (size_t f = onset; f < frames.size(); ++f) {
    Image& img = frames[f];
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x)
        for (int c = 0; c < img.channels(); ++c) img.at(x, y, c) = spec.color;
  }
}

SceneScript inject_distractor(const SceneScript& script,
                              const EllipsoidModel& model,
                              const CameraModel& cam,
                              const DistractorSpec& spec) {
  if (spec.enabled) {
    PoseState dpose;
    dpose.tx = spec.offset_x;
    dpose.ty = spec.offset_y;
    dpose.s = spec.scale;
    auto dbb = silhouette_ellipse(model, dpose, cam).bbox();

    // Swept region of the primary face over the clip.
    double u0 = 1e30, v0 = 1e30, u1 = -1e30, v1 = -1e30;
    for (int f = 0; f < script.duration; ++f) {
      auto bb = silhouette_ellipse(model, script_pose(script, f), cam).bbox();
      u0 = std::min(u0, bb[0]);
      v0 = std::min(v0, bb[1]);
      u1 = std::max(u1, bb[2]);
      v1 = std::max(v1, bb[3]);
    }
    bool disjoint = dbb[2] < u0 || dbb[0] > u1 || dbb[3] < v0 || dbb[1] > v1;
    if (!disjoint)
      throw OverlapError("distractor intersects the face's swept region");
  }
  SceneScript out = script;
  out.distractor = spec;
  return out;
}

namespace {

TrajectorySpec parse_traj(const std::string& value) {
  std::istringstream ss(value);
  std::string kind;
  ss >> kind;
  TrajectorySpec t;
  if (kind == "constant") {
    t.kind = TrajectorySpec::Kind::Constant;
    ss >> t.a;
  } else if (kind == "ramp") {
    t.kind = TrajectorySpec::Kind::Ramp;
    ss >> t.a >> t.b;
  } else if (kind == "sin" || kind == "sinusoid") {
    t.kind = TrajectorySpec::Kind::Sinusoid;
    t.c = 0;
    ss >> t.a >> t.b >> t.c;
    if (t.b == 0) throw InvalidScript("sinusoid needs a nonzero period");
    return t;
  } else {
    throw InvalidScript("unknown trajectory kind: " + kind);
  }
  if (ss.fail()) throw InvalidScript("bad trajectory: " + value);
  return t;
}

}  // namespace

SceneScript parse_scene_script(const std::string& text) {
  SceneScript sc;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      size_t b = s.find_first_not_of(" \t\r");
      size_t e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;

    std::istringstream vs(value);
    if (key == "duration") {
      vs >> sc.duration;
    } else if (key == "tx") {
      sc.tx = parse_traj(value);
    } else if (key == "ty") {
      sc.ty = parse_traj(value);
    } else if (key == "s") {
      sc.s = parse_traj(value);
    } else if (key == "rx") {
      sc.rx = parse_traj(value);
    } else if (key == "ry") {
      sc.ry = parse_traj(value);
    } else if (key == "rz") {
      sc.rz = parse_traj(value);
    } else if (key == "alpha") {
      sc.alpha = parse_traj(value);
    } else if (key == "checker") {
      vs >> sc.texture.checker;
    } else if (key == "gradient") {
      vs >> sc.texture.gradient;
    } else if (key == "band") {
      vs >> sc.texture.band;
    } else if (key == "seed") {
      vs >> sc.texture.seed;
    } else if (key == "background") {
      std::string kind;
      vs >> kind;
      if (kind == "flat") {
        sc.background.kind = BackgroundSpec::Kind::Flat;
        vs >> sc.background.level;
      } else if (kind == "noise") {
        sc.background.kind = BackgroundSpec::Kind::Noise;
        vs >> sc.background.level >> sc.background.noise_amp;
      } else {
        throw InvalidScript("unknown background kind: " + kind);
      }
    } else if (key == "occlusion") {
      sc.occlusion.enabled = true;
      vs >> sc.occlusion.coverage >> sc.occlusion.onset;
      if (vs.fail()) throw InvalidScript("occlusion wants: coverage onset");
    } else if (key == "distractor") {
      sc.distractor.enabled = true;
      vs >> sc.distractor.offset_x >> sc.distractor.offset_y >>
          sc.distractor.scale;
      if (vs.fail())
        throw InvalidScript("distractor wants: offset_x offset_y scale");
    } else {
      throw InvalidScript("unknown script key: " + key);
    }
    if (vs.fail()) throw InvalidScript("bad value for key: " + key);
  }
  if (sc.duration < 1) throw InvalidScript("duration must be >= 1");
  return sc;
}

SceneScript load_scene_script(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scene_script(ss.str());
}

}  // namespace faceswap
