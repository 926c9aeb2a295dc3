#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace faceswap {

// Planar-interleaved float image, intensities in [0,1].
// 1 channel = gray or alpha mask, 3 channels = RGB.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, float fill = 0.0f)
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<size_t>(width) * height * channels, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c = 0) {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int x, int y, int c = 0) const {
    return data_[(static_cast<size_t>(y) * width_ + x) * channels_ + c];
  }

  bool contains(double x, double y) const {
    return x >= 0.0 && y >= 0.0 && x <= width_ - 1.0 && y <= height_ - 1.0;
  }

  // Bilinear sample with coordinates clamped to the valid range.
  float sample_bilinear(double x, double y, int c = 0) const;

  std::vector<float>& data() { return data_; }
  const std::vector<float>& data() const { return data_; }

  bool same_size(const Image& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

Image to_gray(const Image& img);

// Central-difference gradient magnitude of a single-channel image.
Image gradient_magnitude(const Image& gray);

// 8-bit binary PPM (P6) for 3-channel, PGM (P5) for 1-channel images.
void save_image(const Image& img, const std::filesystem::path& path);
Image load_image(const std::filesystem::path& path);

// Quantize to 8 bits and back; the on-disk representation of a frame.
Image quantize8(const Image& img);

inline uint8_t to_byte(float v) {
  float s = v * 255.0f + 0.5f;
  if (s < 0.0f) s = 0.0f;
  if (s > 255.0f) s = 255.0f;
  return static_cast<uint8_t>(s);
}

}  // namespace faceswap
