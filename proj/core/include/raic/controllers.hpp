#pragma once

// Baseline Cartesian impedance control and the Reactive Attractor Impedance
// Controller (RAIC).
//
// All six-element gain and wrench vectors use wrench order:
// [x, y, z translational | x, y, z rotational]. Force components gate the
// translational axes of a PoseDelta and torque components the rotational ones.

#include <Eigen/Core>
#include <array>
#include <cstddef>
#include <string_view>

#include "raic/geometry.hpp"

namespace raic {

/// Diagonal M, B, K of the end-effector spring-damper, in wrench order.
struct ImpedanceGains {
  Vec6 inertia = Vec6::Ones();
  Vec6 damping = Vec6::Zero();
  Vec6 stiffness = Vec6::Zero();

  /// Isotropic translational / rotational blocks.
  static ImpedanceGains isotropic(double linear_stiffness, double rotational_stiffness,
                                  double linear_damping, double rotational_damping,
                                  double linear_inertia = 1.0, double rotational_inertia = 1.0);
  /// K = 750 N/m, 80 N m/rad; B = 330 N s/m, 12 N m s/rad; M = I.
  static ImpedanceGains defaults();

  void validate() const;
  bool operator==(const ImpedanceGains& o) const {
    return inertia == o.inertia && damping == o.damping && stiffness == o.stiffness;
  }
};

/// Per-axis cutoffs and scales of the RAIC damping functions plus the
/// protective-stop limits they are derived from.
struct RaicGains {
  Vec6 cutoff = Vec6::Zero();
  Vec6 scale = Vec6::Ones();
  Vec6 feedback_cutoff = Vec6::Zero();
  Vec6 feedback_scale = Vec6::Ones();
  double force_limit = 60.0;   // N
  double torque_limit = 10.0;  // N m

  /// c = 25% of the limit, s = 1/(50% of the limit), c_fb = 0,
  /// s_fb = 1/(25% of the limit).
  static RaicGains from_limits(double force_limit, double torque_limit);
  /// from_limits(60 N, 10 N m).
  static RaicGains defaults();

  void validate() const;
  bool operator==(const RaicGains& o) const {
    return cutoff == o.cutoff && scale == o.scale && feedback_cutoff == o.feedback_cutoff &&
           feedback_scale == o.feedback_scale && force_limit == o.force_limit &&
           torque_limit == o.torque_limit;
  }
};

struct ControllerState {
  Pose attractor;
  Pose end_effector;
  Vec6 velocity = Vec6::Zero();  // end-effector twist, wrench order
  std::size_t plan_index = 0;

  /// Attractor starts on the initial end-effector pose; velocity is zero.
  static ControllerState at(const Pose& initial);
};

/// Piecewise-linear damping in force magnitude: 1 up to the cutoff, then
/// decreasing with slope `scale`, saturating at 0.
/// clip(1 - scale * max(0, |f| - cutoff), 0, 1).
double damping_phi(double force, double scale, double cutoff);

/// max(0, tanh(f * e)): releases an axis when the plan pulls the attractor in
/// the direction the felt force is already pushing.
double exit_damping(double force, double gap);

/// Below this magnitude a gap component counts as zero when gating.
inline constexpr double kGateDeadband = 1e-12;

/// Zeroes feedforward components whose sign opposes the plan-to-attractor
/// gap on the same axis; keeps the rest.
PoseDelta gate_feedforward(const PoseDelta& feedforward, const PoseDelta& gap);

struct AttractorUpdate {
  Pose attractor;
  Vec6 feedforward_gain = Vec6::Ones();  // diag(D)
  Vec6 feedback_gain = Vec6::Ones();     // diag(F)
};

/// One RAIC attractor update:
///   d  = pose_difference(plan_next, plan_now)
///   e  = pose_difference(plan_now, attractor)
///   attractor' = pose_integrate(attractor, D(f, e) gate(d, e) + F(f, e) e)
AttractorUpdate raic_attractor_step(const ControllerState& state, const Pose& plan_now,
                                    const Pose& plan_next, const Wrench& wrench,
                                    const RaicGains& gains);

struct MotionUpdate {
  Pose end_effector;
  Vec6 velocity = Vec6::Zero();
};

/// Exact zero-order-hold discretization of M x'' + B x' + K x = f per axis,
/// where x is the end-effector displacement from the attractor.
class SpringDamper {
 public:
  SpringDamper(const ImpedanceGains& gains, double dt);

  double dt() const { return dt_; }
  const ImpedanceGains& gains() const { return gains_; }

  /// Advances one step from stretch x0 and velocity v0 under constant force f.
  void advance(const Vec6& stretch, const Vec6& velocity, const Vec6& force, Vec6& stretch_out,
               Vec6& velocity_out) const;

  MotionUpdate step(const Pose& end_effector, const Vec6& velocity, const Pose& attractor,
                    const Wrench& wrench) const;

 private:
  struct Axis {
    double xx, xv, vx, vv;  // state transition
    double xf, vf;          // force input
  };
  ImpedanceGains gains_;
  double dt_;
  std::array<Axis, 6> axes_{};
};

/// Stretch of the spring: end-effector displacement from the attractor in
/// wrench order. f = K * stretch holds the spring in static balance.
Vec6 spring_stretch(const Pose& end_effector, const Pose& attractor);

/// One spring-damper step toward `attractor`.
MotionUpdate spring_damper_step(const ControllerState& state, const Pose& attractor,
                                const Wrench& wrench, const ImpedanceGains& gains, double dt);

/// Standard impedance control: spring-damper step toward the planned pose.
MotionUpdate impedance_step(const ControllerState& state, const Pose& plan_pose,
                            const Wrench& wrench, const ImpedanceGains& gains, double dt);

enum class ControllerKind { Impedance, Raic };

std::string_view to_string(ControllerKind kind);

/// Diagnostics of one control step; Impedance reports unit gains.
struct ControlDiagnostics {
  Vec6 feedforward_gain = Vec6::Ones();
  Vec6 feedback_gain = Vec6::Ones();
};

/// Stateful controller stepping along a plan at a fixed rate.
class Controller {
 public:
  Controller(ControllerKind kind, const ImpedanceGains& impedance, const RaicGains& raic,
             double dt, const Pose& initial);

  ControllerKind kind() const { return kind_; }
  const ControllerState& state() const { return state_; }

  /// Spring-damper step toward the current attractor (the plan pose for
  /// Impedance), then advances the attractor to the next plan sample.
  ControlDiagnostics step(const Pose& plan_now, const Pose& plan_next, const Wrench& wrench);

 private:
  ControllerKind kind_;
  RaicGains raic_;
  SpringDamper spring_;
  ControllerState state_;
};

}  // namespace raic
