#include "raic/geometry.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace raic {
namespace {

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return s;
}

Vec3 vee_antisymmetric(const Mat3& r) {
  return Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
}

}  // namespace

bool Pose::is_valid(double tolerance) const {
  if (!rotation.allFinite() || !position.allFinite()) return false;
  const double ortho = (rotation * rotation.transpose() - Mat3::Identity()).norm();
  return ortho <= tolerance && rotation.determinant() > 0.0;
}

Vec6 PoseDelta::to_wrench_order() const {
  Vec6 v;
  v << translational, rotational;
  return v;
}

PoseDelta PoseDelta::from_wrench_order(const Vec6& v) {
  return PoseDelta{v.tail<3>(), v.head<3>()};
}

bool PoseDelta::is_finite() const {
  return rotational.allFinite() && translational.allFinite();
}

Vec6 Wrench::as_vector() const {
  Vec6 v;
  v << force, torque;
  return v;
}

bool Wrench::is_finite() const { return force.allFinite() && torque.allFinite(); }

Mat3 rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1.0, 0.0, 0.0,
       0.0, c, -s,
       0.0, s, c;
  return r;
}

Mat3 rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

Mat3 rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0.0,
       s, c, 0.0,
       0.0, 0.0, 1.0;
  return r;
}

Mat3 compose_euler(double yaw, double pitch, double roll) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

EulerAngles euler_zyx(const Mat3& r) {
  EulerAngles e;
  e.pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
  e.yaw = std::atan2(r(1, 0), r(0, 0));
  e.roll = std::atan2(r(2, 1), r(2, 2));
  return e;
}

Vec3 rotation_displacements(const Mat3& r) {
  const Vec3 v = vee_antisymmetric(r);
  const double sin_angle = 0.5 * v.norm();
  const double cos_angle = 0.5 * (r.trace() - 1.0);
  const double angle = std::atan2(sin_angle, cos_angle);

  if (std::numbers::pi - angle < kHalfTurnTolerance) {
    std::ostringstream msg;
    msg << "rotation angle " << angle << " rad is a half turn; axis is ambiguous";
    throw GeometryError(msg.str());
  }
  if (angle < 1e-5) {
    // angle / (2 sin angle) ~ 1/2 + angle^2 / 12
    return v * (0.5 + angle * angle / 12.0);
  }
  if (angle < 3.0) {
    return v * (0.5 * angle / sin_angle);
  }
  // Near pi the antisymmetric part vanishes; recover the axis from the
  // symmetric part, a a^T = (sym(R) - cos I) / (1 - cos), sign from v.
  const Mat3 b = (0.5 * (r + r.transpose()) - cos_angle * Mat3::Identity()) / (1.0 - cos_angle);
  int k = 0;
  b.diagonal().maxCoeff(&k);
  Vec3 axis = b.col(k) / std::sqrt(std::max(b(k, k), 1e-300));
  axis.normalize();
  if (axis.dot(v) < 0.0) axis = -axis;
  return axis * angle;
}

Mat3 rotation_from_displacements(const Vec3& w) {
  const double angle = w.norm();
  const Mat3 k = skew(w);
  double a, b;
  if (angle < 1e-5) {
    const double a2 = angle * angle;
    a = 1.0 - a2 / 6.0;
    b = 0.5 - a2 / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  return Mat3::Identity() + a * k + b * k * k;
}

PoseDelta pose_difference(const Pose& a, const Pose& b) {
  return PoseDelta{rotation_displacements(a.rotation * b.rotation.transpose()),
                   a.position - b.position};
}

Pose pose_integrate(const Pose& base, const PoseDelta& delta) {
  return Pose{rotation_from_displacements(delta.rotational) * base.rotation,
              base.position + delta.translational};
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(angle, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

}  // namespace raic
