#pragma once

#include <array>
#include <cmath>

#include "faceswap/image.hpp"

namespace faceswap {

struct Vec2 {
  double x = 0, y = 0;
};

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double k) const { return {x * k, y * k, z * k}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

struct Mat3 {
  // Row-major.
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity();
  Vec3 operator*(const Vec3& v) const {
    return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  Mat3 transpose() const;
  double det() const;
};

// Ten-component head state: image translation and velocity, scale, pitch/yaw/roll
// in degrees, yaw velocity, and a global illumination gain.
struct PoseState {
  double tx = 0, ty = 0;
  double tx_dot = 0, ty_dot = 0;
  double s = 1.0;
  double rx = 0, ry = 0, rz = 0;  // degrees; rx pitch, ry yaw, rz roll
  double ry_dot = 0;
  double alpha = 1.0;
};

struct EllipsoidModel {
  double ax = 40.0, ay = 55.0, az = 48.0;  // semi-axes, model units (pixels at s=1)
  int texture_anchor = 256;                // surface parameterization resolution
};

struct CameraModel {
  double cx = 160.0, cy = 120.0;  // principal point, pixels
  int width = 320, height = 240;
};

// Wrap an angle in degrees to [-180, 180).
double wrap_degrees(double deg);

// R = Rz(rz) * Rx(rx) * Ry(ry), angles in degrees. Model axes: x right, y up,
// z toward camera. Yaw is applied first.
Mat3 rotation_matrix(double rx_deg, double ry_deg, double rz_deg);

// Scaled-orthographic projection. Image v grows downward:
//   u = cx + s*(R p).x + tx,  v = cy - s*(R p).y + ty
Vec2 project_point(const Vec3& p, const PoseState& pose, const CameraModel& cam);

// Outward unit normal of the ellipsoid surface at p.
Vec3 surface_normal(const Vec3& p, const EllipsoidModel& model);

// True iff the rotated outward normal at surface point p points toward the
// camera (+z after rotation).
bool visible(const Vec3& p, const PoseState& pose, const EllipsoidModel& model);

// Orthographic silhouette of the posed ellipsoid: an ellipse in image offsets.
// Offsets are taken about (cx+tx, cy+ty); membership test works on pixels.
struct SilhouetteEllipse {
  double u0 = 0, v0 = 0;          // center, pixels
  double q11 = 0, q12 = 0, q22 = 0;  // quadratic form on model-space offsets
  double scale = 1.0;

  bool contains(double u, double v) const {
    double x = (u - u0) / scale;
    double y = -(v - v0) / scale;
    return q11 * x * x + 2.0 * q12 * x * y + q22 * y * y <= 1.0;
  }
  // Axis-aligned bounding box in pixels: {u_min, v_min, u_max, v_max}.
  std::array<double, 4> bbox() const;
};

SilhouetteEllipse silhouette_ellipse(const EllipsoidModel& model,
                                     const PoseState& pose,
                                     const CameraModel& cam);

// Binary mask (1 inside the projected outline). Throws EmptyMask when the
// projected region lies entirely outside the image.
Image silhouette_mask(const EllipsoidModel& model, const PoseState& pose,
                      const CameraModel& cam);

// Intersect a camera ray through image pixel (u,v) with the posed ellipsoid.
// On hit, returns true and fills the model-space surface point closest to the
// camera. Pure inverse of project_point restricted to the visible half.
bool unproject_to_surface(double u, double v, const EllipsoidModel& model,
                          const PoseState& pose, const CameraModel& cam,
                          Vec3* model_point);

}  // namespace faceswap
