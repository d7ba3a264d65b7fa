#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <numbers>
#include <random>

#include "raic/geometry.hpp"

namespace {

using namespace raic;
constexpr double kPi = std::numbers::pi;

// Independent oracle: Eigen's angle-axis conversion.
Vec3 log_oracle(const Mat3& r) {
  const Eigen::AngleAxisd aa(r);
  return aa.angle() * aa.axis();
}

Mat3 exp_oracle(const Vec3& w) {
  const double angle = w.norm();
  if (angle == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi, kPi), pos(-1.0, 1.0);
  return Pose{compose_euler(angle(rng), angle(rng) / 2.0, angle(rng)),
              Vec3(pos(rng), pos(rng), pos(rng))};
}

// Random pose within `max_angle` rotation of `base`.
Pose nearby_pose(std::mt19937_64& rng, const Pose& base, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0), pos(-1.0, 1.0);
  Vec3 axis(n(rng), n(rng), n(rng));
  axis.normalize();
  const Mat3 r = exp_oracle(axis * max_angle * u(rng)) * base.rotation;
  return Pose{r, Vec3(pos(rng), pos(rng), pos(rng))};
}

TEST(Geometry, ElementaryRotationsMatchAngleAxis) {
  for (double a : {-1.2, -0.3, 0.0, 0.4, 1.5}) {
    EXPECT_TRUE(rot_x(a).isApprox(exp_oracle(Vec3(a, 0, 0)), 1e-15));
    EXPECT_TRUE(rot_y(a).isApprox(exp_oracle(Vec3(0, a, 0)), 1e-15));
    EXPECT_TRUE(rot_z(a).isApprox(exp_oracle(Vec3(0, 0, a)), 1e-15));
  }
}

TEST(Geometry, ComposeEulerIsZyxProduct) {
  EXPECT_EQ(compose_euler(0, 0, 0), Mat3::Identity());
  EXPECT_TRUE(compose_euler(kPi / 2, 0, 0).isApprox(rot_z(kPi / 2), 1e-15));
  const Mat3 expected = Eigen::AngleAxisd(0.1, Vec3::UnitZ()).toRotationMatrix() *
                        Eigen::AngleAxisd(0.2, Vec3::UnitY()).toRotationMatrix() *
                        Eigen::AngleAxisd(0.3, Vec3::UnitX()).toRotationMatrix();
  EXPECT_LT((compose_euler(0.1, 0.2, 0.3) - expected).norm(), 1e-15);
}

TEST(Geometry, ComposeEulerIsProperRotation) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> a(-10.0, 10.0);
  for (int i = 0; i < 500; ++i) {
    const Mat3 r = compose_euler(a(rng), a(rng), a(rng));
    EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
  }
}

TEST(Geometry, EulerExtractionInvertsComposition) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> yaw(-3.0, 3.0), pitch(-1.5, 1.5);
  for (int i = 0; i < 200; ++i) {
    const double y = yaw(rng), p = pitch(rng), r = yaw(rng);
    const EulerAngles e = euler_zyx(compose_euler(y, p, r));
    EXPECT_NEAR(e.yaw, y, 1e-9);
    EXPECT_NEAR(e.pitch, p, 1e-9);
    EXPECT_NEAR(e.roll, r, 1e-9);
  }
}

TEST(Geometry, RotationDisplacementsOfElementaryRotations) {
  EXPECT_EQ(rotation_displacements(Mat3::Identity()), Vec3::Zero());
  const Vec3 wx = rotation_displacements(rot_x(0.3));
  EXPECT_NEAR(wx.x(), 0.3, 1e-15);
  EXPECT_EQ(wx.y(), 0.0);
  EXPECT_EQ(wx.z(), 0.0);
  const Vec3 wz = rotation_displacements(rot_z(0.2) * rot_z(0.15));
  EXPECT_NEAR(wz.z(), 0.35, 1e-15);
  EXPECT_NEAR(wz.head<2>().norm(), 0.0, 1e-15);
}

TEST(Geometry, RotationDisplacementsMatchAngleAxisOracle) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, kPi - 1e-3);
  for (int i = 0; i < 1000; ++i) {
    Vec3 axis(n(rng), n(rng), n(rng));
    const Vec3 w = axis.normalized() * angle(rng);
    const Mat3 r = exp_oracle(w);
    EXPECT_LT((rotation_displacements(r) - log_oracle(r)).norm(), 1e-9);
    EXPECT_LT((rotation_from_displacements(w) - r).norm(), 1e-12);
  }
}

TEST(Geometry, TinyAndNearHalfTurnAngles) {
  for (double a : {1e-12, 1e-9, 1e-6, 1e-4}) {
    const Vec3 w = Vec3(1.0, -2.0, 0.5).normalized() * a;
    EXPECT_LT((rotation_displacements(rotation_from_displacements(w)) - w).norm(), 1e-15);
  }
  const Vec3 axis = Vec3(0.3, -0.4, 0.5).normalized();
  const Vec3 w = axis * (kPi - 1e-4);
  EXPECT_LT((rotation_displacements(exp_oracle(w)) - w).norm(), 1e-8);
}

TEST(Geometry, HalfTurnIsRejected) {
  EXPECT_THROW(rotation_displacements(rot_z(kPi)), GeometryError);
  EXPECT_THROW(rotation_displacements(exp_oracle(Vec3(1, 1, 0).normalized() * kPi)),
               GeometryError);
}

TEST(Geometry, DifferenceOfIdenticalPosesIsZero) {
  std::mt19937_64 rng(3);
  const Pose t = random_pose(rng);
  const PoseDelta d = pose_difference(t, t);
  EXPECT_EQ(d.rotational, Vec3::Zero());
  EXPECT_EQ(d.translational, Vec3::Zero());
}

TEST(Geometry, PureTranslationDifference) {
  const Pose b = Pose{compose_euler(0.4, -0.2, 0.1), Vec3(0.3, -0.1, 0.2)};
  Pose a = b;
  a.position += Vec3(0.1, 0.0, 0.0);
  const PoseDelta d = pose_difference(a, b);
  EXPECT_LT(d.rotational.norm(), 1e-15);
  EXPECT_NEAR(d.translational.x(), 0.1, 1e-15);
  EXPECT_EQ(d.translational.y(), 0.0);
  EXPECT_EQ(d.translational.z(), 0.0);
}

TEST(Geometry, RotationAboutZDifference) {
  const Pose b = Pose{compose_euler(0.3, 0.0, 0.0), Vec3::Zero()};
  const Pose a = Pose{rot_z(kPi / 8) * b.rotation, Vec3::Zero()};
  const PoseDelta d = pose_difference(a, b);
  EXPECT_NEAR(d.rotational.z(), kPi / 8, 1e-15);
  EXPECT_NEAR(d.rotational.x(), 0.0, 1e-15);
  EXPECT_NEAR(d.rotational.y(), 0.0, 1e-15);
}

TEST(Geometry, IntegrateZeroAndQuarterTurn) {
  std::mt19937_64 rng(9);
  const Pose t = random_pose(rng);
  const Pose same = pose_integrate(t, PoseDelta::zero());
  EXPECT_EQ(same.rotation, t.rotation);
  EXPECT_EQ(same.position, t.position);

  PoseDelta d;
  d.rotational = Vec3(0, 0, kPi / 2);
  const Pose r = pose_integrate(Pose::identity(), d);
  EXPECT_LT((r.rotation - rot_z(kPi / 2)).norm(), 1e-15);
  EXPECT_EQ(r.position, Vec3::Zero());
}

TEST(Geometry, RoundTripProperty) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const Pose b = random_pose(rng);
    const Pose a = nearby_pose(rng, b, kPi / 2);
    const Pose back = pose_integrate(b, pose_difference(a, b));
    EXPECT_LT((back.rotation - a.rotation).norm(), 1e-9);
    EXPECT_LT((back.position - a.position).norm(), 1e-12);
  }
}

TEST(Geometry, DifferenceIsAntisymmetric) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 500; ++i) {
    const Pose b = random_pose(rng);
    const Pose a = nearby_pose(rng, b, kPi / 2);
    const PoseDelta ab = pose_difference(a, b);
    const PoseDelta ba = pose_difference(b, a);
    EXPECT_EQ(ab.translational, (-ba.translational).eval());
    EXPECT_LT((ab.rotational + ba.rotational).norm(), 1e-9);
  }
}

TEST(Geometry, WrenchOrderPacking) {
  PoseDelta d;
  d.rotational = Vec3(4, 5, 6);
  d.translational = Vec3(1, 2, 3);
  Vec6 expected;
  expected << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(d.to_wrench_order(), expected);
  const PoseDelta back = PoseDelta::from_wrench_order(expected);
  EXPECT_EQ(back.rotational, d.rotational);
  EXPECT_EQ(back.translational, d.translational);

  Wrench w;
  w.force = Vec3(1, 2, 3);
  w.torque = Vec3(4, 5, 6);
  EXPECT_EQ(w.as_vector(), expected);
}

TEST(Geometry, PoseValidity) {
  EXPECT_TRUE(Pose::identity().is_valid());
  Pose bad;
  bad.rotation(0, 0) = -1.0;  // reflection
  EXPECT_FALSE(bad.is_valid());
  Pose scaled;
  scaled.rotation *= 1.01;
  EXPECT_FALSE(scaled.is_valid());
}

TEST(Geometry, WrapAngle) {
  EXPECT_DOUBLE_EQ(wrap_angle(0.0), 0.0);
  EXPECT_DOUBLE_EQ(wrap_angle(kPi), kPi);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(3 * kPi / 2), -kPi / 2, 1e-15);
}

}  // namespace
