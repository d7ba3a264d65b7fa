#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "raic/controllers.hpp"
#include "raic/trajectory.hpp"

namespace {

using namespace raic;
constexpr double kPi = std::numbers::pi;
constexpr double kDt = 0.008;

Wrench force_x(double fx) {
  Wrench w;
  w.force = Vec3(fx, 0, 0);
  return w;
}

Pose at(double x, double y = 0.0, double z = 0.0) {
  return Pose{Mat3::Identity(), Vec3(x, y, z)};
}

// Closed-form free response of m x'' + b x' + k x = 0, x(0) = x0, x'(0) = 0,
// overdamped.
double overdamped(double t, double x0, double k, double b, double m) {
  const double disc = std::sqrt(b * b - 4 * k * m);
  const double r1 = (-b + disc) / (2 * m), r2 = (-b - disc) / (2 * m);
  const double c1 = -r2 * x0 / (r1 - r2), c2 = r1 * x0 / (r1 - r2);
  return c1 * std::exp(r1 * t) + c2 * std::exp(r2 * t);
}

TEST(Gains, Defaults) {
  const ImpedanceGains g = ImpedanceGains::defaults();
  EXPECT_EQ(g.stiffness[0], 750.0);
  EXPECT_EQ(g.stiffness[3], 80.0);
  EXPECT_EQ(g.damping[2], 330.0);
  EXPECT_EQ(g.damping[5], 12.0);
  EXPECT_EQ(g.inertia, Vec6::Ones());
  const RaicGains r = RaicGains::defaults();
  EXPECT_EQ(r.cutoff[0], 15.0);
  EXPECT_DOUBLE_EQ(r.scale[0], 1.0 / 30.0);
  EXPECT_EQ(r.cutoff[3], 2.5);
  EXPECT_DOUBLE_EQ(r.scale[3], 1.0 / 5.0);
  EXPECT_EQ(r.feedback_cutoff, Vec6::Zero());
  EXPECT_DOUBLE_EQ(r.feedback_scale[1], 1.0 / 15.0);
  EXPECT_DOUBLE_EQ(r.feedback_scale[4], 1.0 / 2.5);
}

TEST(Gains, ValidationRejectsNonPositive) {
  ImpedanceGains g = ImpedanceGains::defaults();
  g.damping[1] = 0.0;
  EXPECT_THROW(g.validate(), std::invalid_argument);
  RaicGains r = RaicGains::defaults();
  r.scale[2] = -1.0;
  EXPECT_THROW(r.validate(), std::invalid_argument);
  EXPECT_THROW(SpringDamper(ImpedanceGains::defaults(), 0.0), std::invalid_argument);
}

TEST(DampingPhi, Goldens) {
  const double s = 1.0 / 30.0, c = 15.0;
  EXPECT_NEAR(damping_phi(0.0, s, c), 1.0, 1e-12);
  EXPECT_NEAR(damping_phi(15.0, s, c), 1.0, 1e-12);
  EXPECT_NEAR(damping_phi(30.0, s, c), 0.5, 1e-12);
  EXPECT_NEAR(damping_phi(-30.0, s, c), 0.5, 1e-12);
  EXPECT_NEAR(damping_phi(45.0, s, c), 0.0, 1e-12);
  EXPECT_EQ(damping_phi(200.0, s, c), 0.0);
}

TEST(DampingPhi, MonotoneAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int i = 0; i < 500; ++i) {
    const double s = 1.0 / (1.0 + u(rng)), c = u(rng) / 4;
    double prev = 1.0;
    for (double f = 0.0; f < 200.0; f += 0.5) {
      const double phi = damping_phi(f, s, c);
      EXPECT_GE(phi, 0.0);
      EXPECT_LE(phi, 1.0);
      EXPECT_LE(phi, prev);
      EXPECT_EQ(phi, damping_phi(-f, s, c));
      prev = phi;
    }
  }
}

TEST(ExitDamping, Goldens) {
  EXPECT_EQ(exit_damping(0.0, 0.3), 0.0);
  EXPECT_EQ(exit_damping(20.0, 0.0), 0.0);
  EXPECT_EQ(exit_damping(-5.0, 0.3), 0.0);
  EXPECT_EQ(exit_damping(5.0, -0.3), 0.0);
  EXPECT_NEAR(exit_damping(1.0, 1.0), 0.7615941559557649, 1e-12);
  EXPECT_NEAR(exit_damping(-4.0, -0.25), 0.7615941559557649, 1e-12);
  EXPECT_GT(exit_damping(50.0, 0.1), 0.9999);
}

TEST(Gate, KeepsAlignedAndZeroesOpposing) {
  PoseDelta d, e;
  d.translational = Vec3(0.01, 0.01, -0.02);
  e.translational = Vec3(0.02, -0.02, 0.0);
  d.rotational = Vec3(0.1, -0.1, 0.3);
  e.rotational = Vec3(-0.2, -0.5, 1e-13);  // last one inside the dead band
  const PoseDelta g = gate_feedforward(d, e);
  EXPECT_EQ(g.translational, Vec3(0.01, 0.0, -0.02));
  EXPECT_EQ(g.rotational, Vec3(0.0, -0.1, 0.3));

  const PoseDelta unchanged = gate_feedforward(d, PoseDelta::zero());
  EXPECT_EQ(unchanged.translational, d.translational);
  EXPECT_EQ(unchanged.rotational, d.rotational);
}

TEST(Attractor, OnPlanWithZeroWrenchAdvancesToNextSample) {
  const Pose now{compose_euler(0.2, -0.5, 0.1), Vec3(0.3, 0.0, -0.02)};
  const Pose next{compose_euler(0.21, -0.49, 0.09), Vec3(0.3004, 0.0001, -0.0202)};
  const ControllerState s = ControllerState::at(now);
  const AttractorUpdate u = raic_attractor_step(s, now, next, Wrench{}, RaicGains::defaults());
  EXPECT_EQ(u.feedforward_gain, Vec6::Ones());
  EXPECT_EQ(u.feedback_gain, Vec6::Ones());
  EXPECT_LT((u.attractor.rotation - next.rotation).norm(), 1e-12);
  EXPECT_LT((u.attractor.position - next.position).norm(), 1e-12);
}

TEST(Attractor, LaggingWithZeroWrenchCatchesUpInOneStep) {
  ControllerState s = ControllerState::at(at(0.10));
  const Pose now = at(0.12), next = at(0.1204);
  const AttractorUpdate u = raic_attractor_step(s, now, next, Wrench{}, RaicGains::defaults());
  EXPECT_NEAR(u.attractor.position.x(), 0.1204, 1e-15);
}

TEST(Attractor, SaturatedBlockingForceFreezesAxis) {
  // Plan pushes +x into a -x reaction; the attractor sits behind the plan.
  ControllerState s = ControllerState::at(at(0.10));
  const Pose now = at(0.11), next = at(0.1104);
  for (double fx : {-45.0, -60.0, -300.0}) {
    const AttractorUpdate u =
        raic_attractor_step(s, now, next, force_x(fx), RaicGains::defaults());
    EXPECT_EQ(u.feedforward_gain[0], 0.0);
    EXPECT_EQ(u.feedback_gain[0], 0.0);
    EXPECT_EQ(u.attractor.position.x(), 0.10);
    EXPECT_EQ(u.feedforward_gain[1], 1.0);
  }
}

TEST(Attractor, ExitReleaseWhenGapAlignsWithForce) {
  // Force pushes +x and the plan lies +x of the attractor: released.
  ControllerState s = ControllerState::at(at(0.10));
  const Pose now = at(0.20), next = at(0.2004);
  const AttractorUpdate u = raic_attractor_step(s, now, next, force_x(50.0), RaicGains::defaults());
  EXPECT_GT(u.feedforward_gain[0], 0.99);
  EXPECT_GT(u.feedback_gain[0], 0.99);
  EXPECT_GE(u.feedforward_gain[0], exit_damping(50.0, 0.1));
}

TEST(Attractor, GainsStayInUnitInterval) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> f(-200.0, 200.0), p(-0.2, 0.2);
  const RaicGains g = RaicGains::defaults();
  for (int i = 0; i < 2000; ++i) {
    ControllerState s = ControllerState::at(Pose{compose_euler(p(rng), p(rng), p(rng)),
                                                 Vec3(p(rng), p(rng), p(rng))});
    const Pose now{compose_euler(p(rng), p(rng), p(rng)), Vec3(p(rng), p(rng), p(rng))};
    Wrench w;
    w.force = Vec3(f(rng), f(rng), f(rng));
    w.torque = Vec3(f(rng), f(rng), f(rng)) / 20.0;
    const AttractorUpdate u = raic_attractor_step(s, now, now, w, g);
    EXPECT_TRUE((u.feedforward_gain.array() >= 0.0).all() &&
                (u.feedforward_gain.array() <= 1.0).all());
    EXPECT_TRUE((u.feedback_gain.array() >= 0.0).all() && (u.feedback_gain.array() <= 1.0).all());
  }
}

TEST(Attractor, MonotoneDampingInForce) {
  // e opposes f, so the exit term is zero and lambda only falls with |f|.
  ControllerState s = ControllerState::at(at(0.10));
  const Pose now = at(0.11), next = at(0.1104);
  double prev = 1.0;
  for (double fx = 0.0; fx <= 100.0; fx += 0.25) {
    const double lambda =
        raic_attractor_step(s, now, next, force_x(-fx), RaicGains::defaults()).feedforward_gain[0];
    EXPECT_LE(lambda, prev);
    prev = lambda;
  }
  EXPECT_EQ(prev, 0.0);
}

TEST(SpringDamper, EquilibriumStaysPut) {
  const SpringDamper sd(ImpedanceGains::defaults(), kDt);
  const Pose p{compose_euler(0.3, -0.2, 0.1), Vec3(0.1, 0.2, 0.3)};
  const MotionUpdate m = sd.step(p, Vec6::Zero(), p, Wrench{});
  EXPECT_LT(m.velocity.norm(), 1e-15);
  EXPECT_LT((m.end_effector.position - p.position).norm(), 1e-15);
  EXPECT_LT((m.end_effector.rotation - p.rotation).norm(), 1e-15);
}

TEST(SpringDamper, StaticBalanceHoldsStretch) {
  const ImpedanceGains g = ImpedanceGains::defaults();
  const SpringDamper sd(g, kDt);
  const Pose att = at(0.0);
  const Pose ee = at(0.02, -0.01, 0.005);
  Wrench w;
  w.force = g.stiffness.head<3>().cwiseProduct(spring_stretch(ee, att).head<3>());
  const MotionUpdate m = sd.step(ee, Vec6::Zero(), att, w);
  EXPECT_LT((m.end_effector.position - ee.position).norm(), 1e-15);
  EXPECT_LT(m.velocity.norm(), 1e-12);
}

TEST(SpringDamper, MatchesOverdampedClosedForm) {
  const ImpedanceGains g = ImpedanceGains::defaults();
  EXPECT_NEAR(g.damping[0] / (2 * std::sqrt(g.stiffness[0] * g.inertia[0])), 6.02, 0.01);
  const SpringDamper sd(g, kDt);
  const Pose att = at(0.0);
  Pose ee = at(0.01);
  Vec6 v = Vec6::Zero();
  double prev = 0.01;
  for (int k = 1; k <= 1000; ++k) {
    const MotionUpdate m = sd.step(ee, v, att, Wrench{});
    ee = m.end_effector;
    v = m.velocity;
    const double expected = overdamped(k * kDt, 0.01, 750.0, 330.0, 1.0);
    EXPECT_NEAR(ee.position.x(), expected, 1e-4) << k;
    EXPECT_NEAR(ee.position.x(), expected, 1e-12) << k;  // exact discretization
    EXPECT_LE(ee.position.x(), prev);
    EXPECT_GE(ee.position.x(), -0.05 * 0.01);
    prev = ee.position.x();
  }
}

TEST(SpringDamper, EnergyNonIncreasingInFreeSpace) {
  const ImpedanceGains g = ImpedanceGains::defaults();
  const SpringDamper sd(g, kDt);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  const auto energy = [&](const Pose& ee, const Vec6& v, const Pose& att) {
    const Vec6 x = spring_stretch(ee, att);
    return 0.5 * v.dot(g.inertia.cwiseProduct(v)) + 0.5 * x.dot(g.stiffness.cwiseProduct(x));
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Pose att{compose_euler(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    Pose ee{compose_euler(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng))};
    Vec6 v;
    for (int i = 0; i < 6; ++i) v[i] = u(rng);
    double e0 = energy(ee, v, att);
    for (int k = 0; k < 300; ++k) {
      const MotionUpdate m = sd.step(ee, v, att, Wrench{});
      ee = m.end_effector;
      v = m.velocity;
      const double e1 = energy(ee, v, att);
      EXPECT_LE(e1, e0 + 1e-9) << trial << " " << k;
      e0 = e1;
    }
  }
}

TEST(Impedance, ConvergesToStationaryPlan) {
  const Pose plan{compose_euler(0.1, -0.3, 0.05), Vec3(0.2, 0.0, -0.05)};
  Controller c(ControllerKind::Impedance, ImpedanceGains::defaults(), RaicGains::defaults(), kDt,
               Pose::identity());
  for (int k = 0; k < 3000; ++k) c.step(plan, plan, Wrench{});
  EXPECT_LT((c.state().end_effector.position - plan.position).norm(), 1e-9);
  EXPECT_LT((c.state().end_effector.rotation - plan.rotation).norm(), 1e-9);
}

TEST(Impedance, QuasiStaticLagIsForceOverStiffness) {
  const double v = 0.001;  // m/s
  const double f = -30.0;
  Controller c(ControllerKind::Impedance, ImpedanceGains::defaults(), RaicGains::defaults(), kDt,
               at(0.0));
  double x_plan = 0.0;
  for (int k = 0; k < 2000; ++k) {
    c.step(at(x_plan), at(x_plan + v * kDt), force_x(f));
    x_plan += v * kDt;
  }
  const double lag = c.state().end_effector.position.x() - (x_plan - v * kDt);
  EXPECT_NEAR(lag, f / 750.0, 1e-3);
  EXPECT_NEAR(lag, f / 750.0 - 330.0 * v / 750.0, 1e-5);
}

TEST(Controller, FreeSpaceRaicMatchesImpedance) {
  PrimitiveParams prim;
  prim.swivel_amplitude = kPi / 8;
  prim.swivel_frequency = kPi;
  prim.twist_amplitude = kPi / 12;
  prim.twist_frequency = 2 * kPi;
  prim.dive = 0.5;
  for (const PrimitiveParams& p : {PrimitiveParams{}, prim}) {
    const TrajectoryPlan plan = generate_plan(PdsParams{}, p);
    Controller imp(ControllerKind::Impedance, ImpedanceGains::defaults(), RaicGains::defaults(),
                   kDt, plan[0].pose);
    Controller raic(ControllerKind::Raic, ImpedanceGains::defaults(), RaicGains::defaults(), kDt,
                    plan[0].pose);
    for (std::size_t k = 0; k < plan.size(); ++k) {
      const Pose& next = plan[std::min(k + 1, plan.size() - 1)].pose;
      imp.step(plan[k].pose, next, Wrench{});
      const ControlDiagnostics d = raic.step(plan[k].pose, next, Wrench{});
      EXPECT_EQ(d.feedforward_gain, Vec6::Ones());
      // The attractor is exactly on the plan from the second step onward.
      EXPECT_LT((raic.state().attractor.position - next.position).norm(), 1e-12);
      EXPECT_LT((raic.state().attractor.rotation - next.rotation).norm(), 1e-12);
      EXPECT_LT((raic.state().end_effector.position - imp.state().end_effector.position).norm(),
                1e-9);
      EXPECT_LT((raic.state().end_effector.rotation - imp.state().end_effector.rotation).norm(),
                1e-9);
    }
  }
}

// A stiff wall at x = 0.01 blocks a plan that keeps moving +x.
struct WallRun {
  double peak_wrench = 0.0;
  double peak_spring = 0.0;
};

WallRun push_into_wall(ControllerKind kind) {
  const double wall = 0.01, k_wall = 5e4, speed = 0.05;
  const ImpedanceGains g = ImpedanceGains::defaults();
  Controller c(kind, g, RaicGains::defaults(), kDt, at(0.0));
  WallRun out;
  for (int k = 0; k < 1500; ++k) {
    const double xe = c.state().end_effector.position.x();
    const Wrench w = force_x(-k_wall * std::max(0.0, xe - wall));
    c.step(at(speed * kDt * k), at(speed * kDt * (k + 1)), w);
    out.peak_wrench = std::max(out.peak_wrench, w.force.norm());
    const Vec6 x = spring_stretch(c.state().end_effector, c.state().attractor);
    out.peak_spring = std::max(out.peak_spring, std::abs(g.stiffness[0] * x[0]));
  }
  return out;
}

TEST(Controller, RaicAttractorStaysBoundedAgainstBlockingForce) {
  const WallRun raic = push_into_wall(ControllerKind::Raic);
  const WallRun imp = push_into_wall(ControllerKind::Impedance);
  const double feedforward = 750.0 * 0.05 * kDt;
  EXPECT_LE(raic.peak_spring, raic.peak_wrench + feedforward);
  EXPECT_LT(raic.peak_wrench, 60.0);
  // Impedance keeps winding the spring up as the plan runs away.
  EXPECT_GT(imp.peak_wrench, 6 * 60.0);
}

}  // namespace
