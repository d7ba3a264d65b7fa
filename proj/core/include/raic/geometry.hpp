#pragma once

// Rigid-body pose types and the pose difference / integration operators that
// the trajectory generator and both controllers are built on.
//
// Frame convention: world z is up (gravity along -z). The dig plane is spanned
// by the heading direction (yaw about z) and z.

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace raic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Raised when a rotation is too close to a half turn for its rotation vector
/// to be unique.
class GeometryError : public std::domain_error {
 public:
  explicit GeometryError(const std::string& what) : std::domain_error(what) {}
};

/// Angles within this distance of pi are rejected by rotation_displacements().
inline constexpr double kHalfTurnTolerance = 1e-7;

struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();

  static Pose identity() { return {}; }
  static Pose from(const Mat3& rotation, const Vec3& position) {
    return Pose{rotation, position};
  }

  /// True when the rotation is orthonormal with determinant +1 and all entries
  /// are finite.
  bool is_valid(double tolerance = 1e-9) const;
};

/// Six-dimensional difference between two poses: a world-frame rotation vector
/// and a translation.
struct PoseDelta {
  Vec3 rotational = Vec3::Zero();
  Vec3 translational = Vec3::Zero();

  static PoseDelta zero() { return {}; }

  /// Packs as [translational; rotational], the same axis order as a Wrench.
  Vec6 to_wrench_order() const;
  static PoseDelta from_wrench_order(const Vec6& v);

  bool is_finite() const;

  PoseDelta operator+(const PoseDelta& o) const {
    return {rotational + o.rotational, translational + o.translational};
  }
  PoseDelta operator-(const PoseDelta& o) const {
    return {rotational - o.rotational, translational - o.translational};
  }
  PoseDelta operator-() const { return {-rotational, -translational}; }
  PoseDelta operator*(double k) const { return {rotational * k, translational * k}; }
};

/// Force/torque acting on the scoop, expressed in the world frame.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();

  static Wrench zero() { return {}; }
  Vec6 as_vector() const;
  bool is_finite() const;

  Wrench operator+(const Wrench& o) const { return {force + o.force, torque + o.torque}; }
  Wrench& operator+=(const Wrench& o) {
    force += o.force;
    torque += o.torque;
    return *this;
  }
};

Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// R_z(yaw) * R_y(pitch) * R_x(roll).
Mat3 compose_euler(double yaw, double pitch, double roll);

struct EulerAngles {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Inverse of compose_euler() for |pitch| < pi/2.
EulerAngles euler_zyx(const Mat3& rotation);

/// Rotation vector (axis * angle) of R: its displacement about the world x, y
/// and z axes. Throws GeometryError when the angle is within
/// kHalfTurnTolerance of pi.
Vec3 rotation_displacements(const Mat3& rotation);

/// Exponential map; inverse of rotation_displacements() for angles below pi.
Mat3 rotation_from_displacements(const Vec3& displacement);

/// Difference "from b to a": rotational part log(R_a * R_b^T), translational
/// part p_a - p_b. pose_integrate(b, pose_difference(a, b)) == a.
PoseDelta pose_difference(const Pose& a, const Pose& b);

/// Applies a difference to a pose: exp(delta.rotational) * R, p + delta.translational.
Pose pose_integrate(const Pose& base, const PoseDelta& delta);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

}  // namespace raic
