#include "faceswap/compositor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "faceswap/errors.hpp"

namespace faceswap {

Image match_illumination(const Image& image, double alpha_est,
                         double alpha_bank) {
  if (alpha_est <= 0.0 || alpha_bank <= 0.0)
    throw InvalidGain("illumination gains must be > 0");
  double gain = alpha_est / alpha_bank;
  Image out(image.width(), image.height(), image.channels());
  for (size_t i = 0; i < image.data().size(); ++i)
    out.data()[i] =
        static_cast<float>(std::clamp(image.data()[i] * gain, 0.0, 1.0));
  return out;
}

namespace {

// Large finite stand-in for "no source on this scanline".
constexpr double kFar = 1e12;

// Felzenszwalb-Huttenlocher 1D squared distance transform.
void dt1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kFar;
  z[1] = kFar;
  for (int q = 1; q < n; ++q) {
    double s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + q * q) - (f[v[k]] + v[k] * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kFar;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

// Squared Euclidean distance to the nearest zero-mask pixel.
std::vector<double> squared_edt(const Image& mask) {
  int w = mask.width(), h = mask.height();
  std::vector<double> dist(static_cast<size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      dist[static_cast<size_t>(y) * w + x] = mask.at(x, y) > 0.0f ? kFar : 0.0;

  int n = std::max(w, h);
  std::vector<double> f(n), d(n), z(n + 1);
  std::vector<int> v(n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = dist[static_cast<size_t>(y) * w + x];
    dt1d(f.data(), w, d.data(), v.data(), z.data());
    for (int x = 0; x < w; ++x) dist[static_cast<size_t>(y) * w + x] = d[x];
  }
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = dist[static_cast<size_t>(y) * w + x];
    dt1d(f.data(), h, d.data(), v.data(), z.data());
    for (int y = 0; y < h; ++y) dist[static_cast<size_t>(y) * w + x] = d[y];
  }
  return dist;
}

}  // namespace

Image feather_alpha(const Image& mask, int feather_px) {
  if (mask.channels() != 1) throw InvalidArgument("mask must be single-channel");
  if (feather_px < 0) throw InvalidArgument("feather_px must be >= 0");
  if (feather_px == 0) return mask;

  std::vector<double> sq = squared_edt(mask);
  Image out(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      double d = sq[static_cast<size_t>(y) * mask.width() + x];
      double ramp = d >= kFar ? 1.0 : std::min(1.0, std::sqrt(d) / feather_px);
      out.at(x, y) = static_cast<float>(mask.at(x, y) * ramp);
    }
  }
  return out;
}

Image composite(const Image& frame, const Image& replacement,
                const Image& mask, int feather_px) {
  if (!frame.same_size(replacement) || !frame.same_size(mask) ||
      frame.channels() != replacement.channels() || mask.channels() != 1)
    throw DimensionMismatch("composite inputs must share dimensions");
  Image a = feather_alpha(mask, feather_px);
  Image out = frame;
  for (int y = 0; y < frame.height(); ++y) {
    for (int x = 0; x < frame.width(); ++x) {
      float av = a.at(x, y);
      if (av <= 0.0f) continue;  // untouched, bit-identical to frame
      for (int c = 0; c < frame.channels(); ++c)
        out.at(x, y, c) =
            av * replacement.at(x, y, c) + (1.0f - av) * frame.at(x, y, c);
    }
  }
  return out;
}

}  // namespace faceswap
