#include "faceswap/facebank.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "faceswap/errors.hpp"

namespace faceswap {

namespace {

std::vector<double> grid_axis(double lo, double hi, double step) {
  std::vector<double> v;
  for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
  return v;
}

std::string format_tag(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

FaceBank build_bank(const Image& frontal_color, const EllipsoidModel& model,
                    const CameraModel& cam, const BankGrid& grid) {
  if (grid.step <= 0) throw InvalidGrid("step must be > 0");
  if (grid.pitch_min > grid.pitch_max || grid.yaw_min > grid.yaw_max)
    throw InvalidGrid("empty pitch or yaw range");
  if (frontal_color.width() != cam.width || frontal_color.height() != cam.height)
    throw DimensionMismatch("frontal image does not match camera size");

  FaceBank bank;
  bank.grid = grid;
  bank.model = model;
  bank.cam = cam;

  int channels = frontal_color.channels();
  for (double pitch : grid_axis(grid.pitch_min, grid.pitch_max, grid.step)) {
    for (double yaw : grid_axis(grid.yaw_min, grid.yaw_max, grid.step)) {
      PoseState pose;
      pose.rx = pitch;
      pose.ry = yaw;
      FaceBankEntry entry;
      entry.tag_rx = pitch;
      entry.tag_ry = yaw;
      entry.image = Image(cam.width, cam.height, channels);
      entry.mask = Image(cam.width, cam.height, 1, 0.0f);

      SilhouetteEllipse sil = silhouette_ellipse(model, pose, cam);
      auto bb = sil.bbox();
      int x0 = std::max(0, (int)bb[0]), y0 = std::max(0, (int)bb[1]);
      int x1 = std::min(cam.width - 1, (int)std::ceil(bb[2]));
      int y1 = std::min(cam.height - 1, (int)std::ceil(bb[3]));
      for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
          if (!sil.contains(x, y)) continue;
          Vec3 p;
          if (!unproject_to_surface(x, y, model, pose, cam, &p)) continue;
          // Frontal texture lookup; back-half points mirror the front texture.
          double su = cam.cx + p.x;
          double sv = cam.cy - p.y;
          for (int c = 0; c < channels; ++c)
            entry.image.at(x, y, c) = frontal_color.sample_bilinear(su, sv, c);
          entry.mask.at(x, y) = 1.0f;
        }
      }
      bank.entries.push_back(std::move(entry));
    }
  }
  return bank;
}

int select_entry(const FaceBank& bank, const PoseState& pose) {
  if (bank.entries.empty()) throw InvalidArgument("empty bank");
  int best = 0;
  double best_d = 1e300;
  for (size_t i = 0; i < bank.entries.size(); ++i) {
    double dx = pose.rx - bank.entries[i].tag_rx;
    double dy = pose.ry - bank.entries[i].tag_ry;
    double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(i);
    }
  }
  return best;
}

std::pair<Image, Image> warp_entry(const FaceBankEntry& entry,
                                   const PoseState& pose,
                                   const CameraModel& cam) {
  double cr = std::cos(pose.rz * M_PI / 180.0);
  double sr = std::sin(pose.rz * M_PI / 180.0);
  double ucen = cam.cx + pose.tx, vcen = cam.cy + pose.ty;

  Image out(cam.width, cam.height, entry.image.channels());
  Image mask(cam.width, cam.height, 1, 0.0f);
  long support = 0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      double du = u - ucen, dv = v - vcen;
      // Inverse of the forward image-space similarity (y grows downward).
      double su = cam.cx + (cr * du - sr * dv) / pose.s;
      double sv = cam.cy + (sr * du + cr * dv) / pose.s;
      if (!entry.image.contains(su, sv)) continue;
      float a = entry.mask.sample_bilinear(su, sv);
      if (a <= 0.0f) continue;
      mask.at(u, v) = a;
      for (int c = 0; c < out.channels(); ++c)
        out.at(u, v, c) = entry.image.sample_bilinear(su, sv, c);
      ++support;
    }
  }
  if (support == 0)
    throw EmptyOutput("warped mask leaves the image entirely");
  return {std::move(out), std::move(mask)};
}

void save_bank(const FaceBank& bank, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream meta(dir / "bank.meta");
  if (!meta) throw IoError("cannot write bank.meta in " + dir.string());
  meta << "pitch_min = " << bank.grid.pitch_min << "\n"
       << "pitch_max = " << bank.grid.pitch_max << "\n"
       << "yaw_min = " << bank.grid.yaw_min << "\n"
       << "yaw_max = " << bank.grid.yaw_max << "\n"
       << "step = " << bank.grid.step << "\n"
       << "ax = " << bank.model.ax << "\n"
       << "ay = " << bank.model.ay << "\n"
       << "az = " << bank.model.az << "\n"
       << "width = " << bank.cam.width << "\n"
       << "height = " << bank.cam.height << "\n"
       << "cx = " << bank.cam.cx << "\n"
       << "cy = " << bank.cam.cy << "\n";
  if (!bank.entries.empty())
    meta << "alpha_bank = " << bank.entries.front().alpha_bank << "\n";

  for (const FaceBankEntry& e : bank.entries) {
    std::string stem =
        "entry_" + format_tag(e.tag_rx) + "_" + format_tag(e.tag_ry);
    save_image(e.image, dir / (stem + ".ppm"));
    save_image(e.mask, dir / (stem + ".pgm"));
  }
}

FaceBank load_bank(const std::filesystem::path& dir) {
  std::ifstream meta(dir / "bank.meta");
  if (!meta) throw IoError("cannot open bank.meta in " + dir.string());
  FaceBank bank;
  double alpha_bank = 1.0;
  std::string line;
  while (std::getline(meta, line)) {
    std::istringstream ss(line);
    std::string key, eq;
    double value;
    if (!(ss >> key >> eq >> value) || eq != "=") continue;
    if (key == "pitch_min") bank.grid.pitch_min = value;
    else if (key == "pitch_max") bank.grid.pitch_max = value;
    else if (key == "yaw_min") bank.grid.yaw_min = value;
    else if (key == "yaw_max") bank.grid.yaw_max = value;
    else if (key == "step") bank.grid.step = value;
    else if (key == "ax") bank.model.ax = value;
    else if (key == "ay") bank.model.ay = value;
    else if (key == "az") bank.model.az = value;
    else if (key == "width") bank.cam.width = static_cast<int>(value);
    else if (key == "height") bank.cam.height = static_cast<int>(value);
    else if (key == "cx") bank.cam.cx = value;
    else if (key == "cy") bank.cam.cy = value;
    else if (key == "alpha_bank") alpha_bank = value;
  }
  if (bank.grid.step <= 0) throw InvalidGrid("bad bank.meta step");

  for (double pitch : grid_axis(bank.grid.pitch_min, bank.grid.pitch_max,
                                bank.grid.step)) {
    for (double yaw :
         grid_axis(bank.grid.yaw_min, bank.grid.yaw_max, bank.grid.step)) {
      std::string stem =
          "entry_" + format_tag(pitch) + "_" + format_tag(yaw);
      FaceBankEntry e;
      e.tag_rx = pitch;
      e.tag_ry = yaw;
      e.alpha_bank = alpha_bank;
      e.image = load_image(dir / (stem + ".ppm"));
      e.mask = load_image(dir / (stem + ".pgm"));
      bank.entries.push_back(std::move(e));
    }
  }
  return bank;
}

}  // namespace faceswap
