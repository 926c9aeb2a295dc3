#include "faceswap/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "faceswap/errors.hpp"

namespace faceswap {

float Image::sample_bilinear(double x, double y, int c) const {
  x = std::clamp(x, 0.0, static_cast<double>(width_ - 1));
  y = std::clamp(y, 0.0, static_cast<double>(height_ - 1));
  int x0 = static_cast<int>(x);
  int y0 = static_cast<int>(y);
  int x1 = std::min(x0 + 1, width_ - 1);
  int y1 = std::min(y0 + 1, height_ - 1);
  double fx = x - x0;
  double fy = y - y0;
  double v00 = at(x0, y0, c), v10 = at(x1, y0, c);
  double v01 = at(x0, y1, c), v11 = at(x1, y1, c);
  double top = v00 + fx * (v10 - v00);
  double bot = v01 + fx * (v11 - v01);
  return static_cast<float>(top + fy * (bot - top));
}

Image to_gray(const Image& img) {
  if (img.channels() == 1) return img;
  Image out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x)
      out.at(x, y) = (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / 3.0f;
  return out;
}

Image gradient_magnitude(const Image& gray) {
  if (gray.channels() != 1)
    throw InvalidArgument("gradient_magnitude expects a single-channel image");
  Image out(gray.width(), gray.height(), 1);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      int xl = std::max(x - 1, 0), xr = std::min(x + 1, gray.width() - 1);
      int yu = std::max(y - 1, 0), yd = std::min(y + 1, gray.height() - 1);
      double gx = 0.5 * (gray.at(xr, y) - gray.at(xl, y));
      double gy = 0.5 * (gray.at(x, yd) - gray.at(x, yu));
      out.at(x, y) = static_cast<float>(std::sqrt(gx * gx + gy * gy));
    }
  }
  return out;
}

void save_image(const Image& img, const std::filesystem::path& path) {
  if (img.channels() != 1 && img.channels() != 3)
    throw InvalidArgument("save_image supports 1 or 3 channels");
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << (img.channels() == 3 ? "P6" : "P5") << "\n"
    << img.width() << " " << img.height() << "\n255\n";
  std::vector<uint8_t> row(static_cast<size_t>(img.width()) * img.channels());
  for (int y = 0; y < img.height(); ++y) {
    size_t i = 0;
    for (int x = 0; x < img.width(); ++x)
      for (int c = 0; c < img.channels(); ++c) row[i++] = to_byte(img.at(x, y, c));
    f.write(reinterpret_cast<const char*>(row.data()), row.size());
  }
  if (!f) throw IoError("write failed: " + path.string());
}

namespace {

int read_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comments.
  int ch = in.get();
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = in.get();
    } else if (!std::isspace(ch)) {
      break;
    }
    ch = in.get();
  }
  int value = 0;
  bool any = false;
  while (ch != EOF && std::isdigit(ch)) {
    value = value * 10 + (ch - '0');
    any = true;
    ch = in.get();
  }
  if (!any) throw IoError("malformed PNM header");
  return value;
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open: " + path.string());
  char m0 = 0, m1 = 0;
  f.get(m0);
  f.get(m1);
  if (m0 != 'P' || (m1 != '5' && m1 != '6'))
    throw IoError("unsupported image format (want P5/P6 PNM): " + path.string());
  int channels = (m1 == '6') ? 3 : 1;
  int w = read_pnm_token(f);
  int h = read_pnm_token(f);
  int maxval = read_pnm_token(f);
  if (maxval != 255) throw IoError("only 8-bit PNM supported: " + path.string());
  Image img(w, h, channels);
  std::vector<uint8_t> row(static_cast<size_t>(w) * channels);
  for (int y = 0; y < h; ++y) {
    f.read(reinterpret_cast<char*>(row.data()), row.size());
    if (!f) throw IoError("truncated PNM data: " + path.string());
    size_t i = 0;
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < channels; ++c) img.at(x, y, c) = row[i++] / 255.0f;
  }
  return img;
}

Image quantize8(const Image& img) {
  Image out(img.width(), img.height(), img.channels());
  for (size_t i = 0; i < img.data().size(); ++i)
    out.data()[i] = to_byte(img.data()[i]) / 255.0f;
  return out;
}

}  // namespace faceswap
