#include "faceswap/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "faceswap/errors.hpp"

namespace faceswap {

void save_template_csv(const SparseTemplate& tmpl,
                       const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "x,y,z,nx,ny,nz,t\n";
  f.precision(9);
  for (const auto& tp : tmpl.points)
    f << tp.p.x << ',' << tp.p.y << ',' << tp.p.z << ',' << tp.n.x << ','
      << tp.n.y << ',' << tp.n.z << ',' << tp.t << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

SparseTemplate load_template_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(f, line) || line.rfind("x,y,z,nx,ny,nz,t", 0) != 0)
    throw IoError("bad template CSV header: " + path.string());
  SparseTemplate tmpl;
  tmpl.source = path.filename().string();
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    TemplatePoint tp;
    char comma;
    ss >> tp.p.x >> comma >> tp.p.y >> comma >> tp.p.z >> comma >> tp.n.x >>
        comma >> tp.n.y >> comma >> tp.n.z >> comma >> tp.t;
    if (!ss) throw IoError("bad template CSV row: " + line);
    tmpl.points.push_back(tp);
  }
  return tmpl;
}

SparseTemplate calibrate_template(const Image& frontal_gray,
                                  const EllipsoidModel& model,
                                  const CameraModel& cam, int n_points) {
  if (n_points < 1) throw InvalidArgument("n_points must be >= 1");
  if (frontal_gray.channels() != 1)
    throw InvalidArgument("calibration image must be single-channel");
  if (frontal_gray.width() != cam.width || frontal_gray.height() != cam.height)
    throw DimensionMismatch("calibration image does not match camera size");

  const PoseState identity;  // calibration contract: centered, s=1, no rotation
  SilhouetteEllipse sil = silhouette_ellipse(model, identity, cam);
  Image grad = gradient_magnitude(frontal_gray);

  struct Candidate {
    int u, v;
    float g;
  };
  std::vector<Candidate> cands;
  auto bb = sil.bbox();
  int x0 = std::max(0, static_cast<int>(bb[0]));
  int y0 = std::max(0, static_cast<int>(bb[1]));
  int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(bb[2])));
  int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(bb[3])));
  // Keep off the silhouette rim so gradients come from face texture, not the
  // face/background boundary, and normals stay camera-facing.
  constexpr double kRimMargin = 0.72;  // squared radial fraction
  for (int v = y0; v <= y1; ++v) {
    for (int u = x0; u <= x1; ++u) {
      double x = u - cam.cx, y = -(v - cam.cy);
      double q = sil.q11 * x * x + 2 * sil.q12 * x * y + sil.q22 * y * y;
      if (q <= kRimMargin) cands.push_back({u, v, grad.at(u, v)});
    }
  }

  long textured = std::count_if(cands.begin(), cands.end(),
                                [](const Candidate& c) { return c.g > 1e-3f; });
  if (textured < n_points)
    throw InsufficientTexture("only " + std::to_string(textured) +
                              " textured pixels for " +
                              std::to_string(n_points) + " points");

  std::sort(cands.begin(), cands.end(), [&](const Candidate& a, const Candidate& b) {
    if (a.g != b.g) return a.g > b.g;
    return a.v != b.v ? a.v < b.v : a.u < b.u;
  });

  SparseTemplate tmpl;
  std::vector<std::pair<int, int>> taken;
  for (const Candidate& c : cands) {
    if (static_cast<int>(tmpl.points.size()) >= n_points) break;
    if (c.g <= 1e-3f) break;
    bool ok = true;
    for (auto [tu, tv] : taken) {
      int du = c.u - tu, dv = c.v - tv;
      if (du * du + dv * dv < 4) {  // min pairwise distance 2 px
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    double x = c.u - cam.cx, y = -(c.v - cam.cy);
    double rad = 1.0 - x * x / (model.ax * model.ax) - y * y / (model.ay * model.ay);
    Vec3 p{x, y, model.az * std::sqrt(std::max(0.0, rad))};
    tmpl.points.push_back({p, surface_normal(p, model), frontal_gray.at(c.u, c.v)});
    taken.emplace_back(c.u, c.v);
  }
  if (static_cast<int>(tmpl.points.size()) < n_points)
    throw InsufficientTexture("textured pixels too clustered for " +
                              std::to_string(n_points) + " points");
  return tmpl;
}

namespace {

double gauss(std::mt19937_64& rng, double std_dev) {
  if (std_dev <= 0.0) return 0.0;
  std::normal_distribution<double> d(0.0, std_dev);
  return d(rng);
}

}  // namespace

void predict(ParticleSet& set, const TrackerConfig& cfg) {
  if (set.particles.empty()) throw InvalidArgument("empty particle set");
  const MotionNoise& n = cfg.noise;
  for (Particle& p : set.particles) {
    PoseState& x = p.state;
    x.tx += x.tx_dot;
    x.ty += x.ty_dot;
    x.ry += x.ry_dot;
    x.tx += gauss(set.rng, n.tx);
    x.ty += gauss(set.rng, n.ty);
    x.tx_dot += gauss(set.rng, n.tx_dot);
    x.ty_dot += gauss(set.rng, n.ty_dot);
    x.s += gauss(set.rng, n.s);
    x.rx += gauss(set.rng, n.rx);
    x.ry += gauss(set.rng, n.ry);
    x.rz += gauss(set.rng, n.rz);
    x.ry_dot += gauss(set.rng, n.ry_dot);
    x.alpha += gauss(set.rng, n.alpha);
    x.rx = wrap_degrees(x.rx);
    x.ry = wrap_degrees(x.ry);
    x.rz = wrap_degrees(x.rz);
    x.s = std::max(x.s, 1e-3);
    x.alpha = std::max(x.alpha, 1e-3);
  }
}

double mean_residual(const PoseState& pose, const Image& frame_gray,
                     const SparseTemplate& tmpl, const EllipsoidModel& model,
                     const CameraModel& cam, const TrackerConfig& cfg) {
  Mat3 R = rotation_matrix(pose.rx, pose.ry, pose.rz);
  double sum = 0.0;
  int used = 0;
  for (const TemplatePoint& tp : tmpl.points) {
    Vec3 n = R * tp.n;
    if (n.z <= 0.0) continue;  // self-occluded
    Vec3 q = R * tp.p;
    double u = cam.cx + pose.s * q.x + pose.tx;
    double v = cam.cy - pose.s * q.y + pose.ty;
    if (!frame_gray.contains(u, v)) continue;
    double diff = frame_gray.sample_bilinear(u, v) - pose.alpha * tp.t;
    sum += std::min(cfg.tau, diff * diff);
    ++used;
  }
  if (used == 0) return cfg.tau;  // worst case: nothing observable
  // Poses that hide most of the template (looking away, sliding off-frame)
  // must not win by matching the few points that remain.
  int floor_n = static_cast<int>(cfg.min_visible * tmpl.points.size());
  if (used < floor_n)
    return (sum + cfg.tau * (floor_n - used)) / floor_n;
  return sum / used;
}

namespace {

template <typename F>
void parallel_over(size_t n, F&& fn) {
  unsigned hw = std::thread::hardware_concurrency();
  size_t workers = std::min<size_t>(hw ? hw : 1, 8);
  if (workers <= 1 || n < 64) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  size_t chunk = (n + workers - 1) / workers;
  for (size_t w = 0; w < workers; ++w) {
    size_t lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    threads.emplace_back([&fn, lo, hi] { fn(lo, hi); });
  }
  for (auto& t : threads) t.join();
}

}  // namespace

void weigh(ParticleSet& set, const Image& frame_gray, const SparseTemplate& tmpl,
           const EllipsoidModel& model, const CameraModel& cam,
           const TrackerConfig& cfg) {
  if (tmpl.points.empty()) throw EmptyTemplate("weigh needs template points");
  if (frame_gray.width() != cam.width || frame_gray.height() != cam.height)
    throw DimensionMismatch("frame does not match camera size");

  const size_t n = set.particles.size();
  std::vector<double> res(n);
  parallel_over(n, [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i)
      res[i] = mean_residual(set.particles[i].state, frame_gray, tmpl, model,
                             cam, cfg);
  });

  double rmin = *std::min_element(res.begin(), res.end());
  double inv2s2 = 1.0 / (2.0 * cfg.sigma * cfg.sigma);
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    set.particles[i].weight = std::exp(-(res[i] - rmin) * inv2s2);
    sum += set.particles[i].weight;
  }
  for (Particle& p : set.particles) p.weight /= sum;
}

void resample(ParticleSet& set) {
  const size_t n = set.particles.size();
  double total = 0.0;
  for (const Particle& p : set.particles) {
    if (!std::isfinite(p.weight) || p.weight < 0.0)
      throw DegenerateWeights("non-finite or negative weight");
    total += p.weight;
  }
  if (total <= 0.0) throw DegenerateWeights("all weights zero");

  std::uniform_real_distribution<double> uni(0.0, 1.0 / n);
  double u0 = uni(set.rng);

  std::vector<Particle> out;
  out.reserve(n);
  size_t i = 0;
  double cum = set.particles[0].weight / total;
  for (size_t j = 0; j < n; ++j) {
    double uj = u0 + static_cast<double>(j) / n;
    while (uj > cum && i + 1 < n) {
      ++i;
      cum += set.particles[i].weight / total;
    }
    out.push_back(set.particles[i]);
    out.back().weight = 1.0 / n;
  }
  set.particles = std::move(out);
}

PoseState estimate(const ParticleSet& set) {
  PoseState m{};
  m.s = 0.0;
  m.alpha = 0.0;
  for (const Particle& p : set.particles) {
    double w = p.weight;
    m.tx += w * p.state.tx;
    m.ty += w * p.state.ty;
    m.tx_dot += w * p.state.tx_dot;
    m.ty_dot += w * p.state.ty_dot;
    m.s += w * p.state.s;
    m.rx += w * p.state.rx;   // plain mean; valid in the tracked range,
    m.ry += w * p.state.ry;   // degrades past +-90 degrees
    m.rz += w * p.state.rz;
    m.ry_dot += w * p.state.ry_dot;
    m.alpha += w * p.state.alpha;
  }
  return m;
}

Tracker::Tracker(SparseTemplate tmpl, EllipsoidModel model, CameraModel cam,
                 TrackerConfig cfg, uint64_t seed, const PoseState& init)
    : tmpl_(std::move(tmpl)), model_(model), cam_(cam), cfg_(cfg) {
  set_.rng.seed(seed);
  set_.particles.assign(cfg_.n_particles, Particle{init, 1.0 / cfg_.n_particles});
}

TrackResult Tracker::step(const Image& frame_gray) {
  predict(set_, cfg_);
  weigh(set_, frame_gray, tmpl_, model_, cam_, cfg_);

  TrackResult r;
  r.pose = estimate(set_);
  r.residual = mean_residual(r.pose, frame_gray, tmpl_, model_, cam_, cfg_);
  if (r.residual > cfg_.lost_residual)
    ++lost_streak_;
  else
    lost_streak_ = 0;
  r.status = lost_streak_ >= cfg_.lost_frames ? TrackStatus::Lost
                                              : TrackStatus::Tracking;
  resample(set_);
  ++set_.frame_index;
  return r;
}

}  // namespace faceswap
