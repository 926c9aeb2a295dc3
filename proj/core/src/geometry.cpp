#include "faceswap/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "faceswap/errors.hpp"

namespace faceswap {

namespace {
constexpr double kDegToRad = M_PI / 180.0;
}

Mat3 Mat3::identity() {
  Mat3 r;
  r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
  return r;
}

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += m[i][k] * o.m[k][j];
      r.m[i][j] = acc;
    }
  return r;
}

Mat3 Mat3::transpose() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
  return r;
}

double Mat3::det() const {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

double wrap_degrees(double deg) {
  double w = deg - 360.0 * std::floor((deg + 180.0) / 360.0);
  // floor rounding can land exactly on 180
  if (w >= 180.0) w -= 360.0;
  return w;
}

Mat3 rotation_matrix(double rx_deg, double ry_deg, double rz_deg) {
  double cx = std::cos(rx_deg * kDegToRad), sx = std::sin(rx_deg * kDegToRad);
  double cy = std::cos(ry_deg * kDegToRad), sy = std::sin(ry_deg * kDegToRad);
  double cz = std::cos(rz_deg * kDegToRad), sz = std::sin(rz_deg * kDegToRad);

  Mat3 Rx, Ry, Rz;
  Rx.m = {{{1, 0, 0}, {0, cx, -sx}, {0, sx, cx}}};
  Ry.m = {{{cy, 0, sy}, {0, 1, 0}, {-sy, 0, cy}}};
  Rz.m = {{{cz, -sz, 0}, {sz, cz, 0}, {0, 0, 1}}};
  return Rz * (Rx * Ry);
}

Vec2 project_point(const Vec3& p, const PoseState& pose, const CameraModel& cam) {
  Mat3 R = rotation_matrix(pose.rx, pose.ry, pose.rz);
  Vec3 q = R * p;
  return {cam.cx + pose.s * q.x + pose.tx, cam.cy - pose.s * q.y + pose.ty};
}

Vec3 surface_normal(const Vec3& p, const EllipsoidModel& model) {
  Vec3 n{p.x / (model.ax * model.ax), p.y / (model.ay * model.ay),
         p.z / (model.az * model.az)};
  return n.normalized();
}

bool visible(const Vec3& p, const PoseState& pose, const EllipsoidModel& model) {
  Mat3 R = rotation_matrix(pose.rx, pose.ry, pose.rz);
  Vec3 n = R * surface_normal(p, model);
  return n.z > 0.0;
}

namespace {

// Quadric of the rotated ellipsoid: q^T B q = 1 for camera-frame points q.
Mat3 rotated_quadric(const EllipsoidModel& model, const Mat3& R) {
  Mat3 A{};
  A.m[0][0] = 1.0 / (model.ax * model.ax);
  A.m[1][1] = 1.0 / (model.ay * model.ay);
  A.m[2][2] = 1.0 / (model.az * model.az);
  return R * A * R.transpose();
}

}  // namespace

std::array<double, 4> SilhouetteEllipse::bbox() const {
  double det = q11 * q22 - q12 * q12;
  double ex = scale * std::sqrt(q22 / det);
  double ey = scale * std::sqrt(q11 / det);
  return {u0 - ex, v0 - ey, u0 + ex, v0 + ey};
}

SilhouetteEllipse silhouette_ellipse(const EllipsoidModel& model,
                                     const PoseState& pose,
                                     const CameraModel& cam) {
  Mat3 R = rotation_matrix(pose.rx, pose.ry, pose.rz);
  Mat3 B = rotated_quadric(model, R);
  // Orthographic shadow along z: Schur complement of the z block.
  double b33 = B.m[2][2];
  SilhouetteEllipse e;
  e.q11 = B.m[0][0] - B.m[0][2] * B.m[0][2] / b33;
  e.q12 = B.m[0][1] - B.m[0][2] * B.m[1][2] / b33;
  e.q22 = B.m[1][1] - B.m[1][2] * B.m[1][2] / b33;
  e.u0 = cam.cx + pose.tx;
  e.v0 = cam.cy + pose.ty;
  e.scale = pose.s;
  return e;
}

Image silhouette_mask(const EllipsoidModel& model, const PoseState& pose,
                      const CameraModel& cam) {
  SilhouetteEllipse e = silhouette_ellipse(model, pose, cam);
  auto bb = e.bbox();
  int x0 = std::max(0, static_cast<int>(std::floor(bb[0])));
  int y0 = std::max(0, static_cast<int>(std::floor(bb[1])));
  int x1 = std::min(cam.width - 1, static_cast<int>(std::ceil(bb[2])));
  int y1 = std::min(cam.height - 1, static_cast<int>(std::ceil(bb[3])));

  Image mask(cam.width, cam.height, 1, 0.0f);
  long count = 0;
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x)
      if (e.contains(x, y)) {
        mask.at(x, y) = 1.0f;
        ++count;
      }
  if (count == 0)
    throw EmptyMask("projected ellipsoid lies outside the image");
  return mask;
}

bool unproject_to_surface(double u, double v, const EllipsoidModel& model,
                          const PoseState& pose, const CameraModel& cam,
                          Vec3* model_point) {
  Mat3 R = rotation_matrix(pose.rx, pose.ry, pose.rz);
  Mat3 B = rotated_quadric(model, R);
  double qx = (u - cam.cx - pose.tx) / pose.s;
  double qy = -(v - cam.cy - pose.ty) / pose.s;
  // Solve B33 z^2 + 2(B13 qx + B23 qy) z + (quadratic in qx,qy) - 1 = 0.
  double a = B.m[2][2];
  double b = 2.0 * (B.m[0][2] * qx + B.m[1][2] * qy);
  double c = B.m[0][0] * qx * qx + 2.0 * B.m[0][1] * qx * qy +
             B.m[1][1] * qy * qy - 1.0;
  double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return false;
  double z = (-b + std::sqrt(disc)) / (2.0 * a);  // root nearest the camera
  Vec3 q{qx, qy, z};
  *model_point = R.transpose() * q;
  return true;
}

}  // namespace faceswap
