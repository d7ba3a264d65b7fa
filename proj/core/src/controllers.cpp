#include "raic/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace raic {
namespace {

int sign_with_deadband(double x) {
  if (x > kGateDeadband) return 1;
  if (x < -kGateDeadband) return -1;
  return 0;
}

void require_positive(const Vec6& v, const char* name) {
  for (int i = 0; i < 6; ++i) {
    if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << name << "[" << i << "] = " << v[i] << " must be > 0";
      throw std::invalid_argument(msg.str());
    }
  }
}

void require_non_negative(const Vec6& v, const char* name) {
  for (int i = 0; i < 6; ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      std::ostringstream msg;
      msg << name << "[" << i << "] = " << v[i] << " must be >= 0";
      throw std::invalid_argument(msg.str());
    }
  }
}

Vec6 blocks(double linear, double rotational) {
  Vec6 v;
  v << linear, linear, linear, rotational, rotational, rotational;
  return v;
}

}  // namespace

ImpedanceGains ImpedanceGains::isotropic(double linear_stiffness, double rotational_stiffness,
                                         double linear_damping, double rotational_damping,
                                         double linear_inertia, double rotational_inertia) {
  ImpedanceGains g;
  g.inertia = blocks(linear_inertia, rotational_inertia);
  g.damping = blocks(linear_damping, rotational_damping);
  g.stiffness = blocks(linear_stiffness, rotational_stiffness);
  return g;
}

ImpedanceGains ImpedanceGains::defaults() { return isotropic(750.0, 80.0, 330.0, 12.0); }

void ImpedanceGains::validate() const {
  require_positive(inertia, "inertia");
  require_positive(damping, "damping");
  require_positive(stiffness, "stiffness");
}

RaicGains RaicGains::from_limits(double force_limit, double torque_limit) {
  RaicGains g;
  g.force_limit = force_limit;
  g.torque_limit = torque_limit;
  g.cutoff = blocks(0.25 * force_limit, 0.25 * torque_limit);
  g.scale = blocks(1.0 / (0.5 * force_limit), 1.0 / (0.5 * torque_limit));
  g.feedback_cutoff = Vec6::Zero();
  g.feedback_scale = blocks(1.0 / (0.25 * force_limit), 1.0 / (0.25 * torque_limit));
  return g;
}

RaicGains RaicGains::defaults() { return from_limits(60.0, 10.0); }

void RaicGains::validate() const {
  require_positive(scale, "scale");
  require_positive(feedback_scale, "feedback_scale");
  require_non_negative(cutoff, "cutoff");
  require_non_negative(feedback_cutoff, "feedback_cutoff");
  if (!(force_limit > 0.0) || !(torque_limit > 0.0)) {
    throw std::invalid_argument("force_limit and torque_limit must be > 0");
  }
}

ControllerState ControllerState::at(const Pose& initial) {
  ControllerState s;
  s.attractor = initial;
  s.end_effector = initial;
  return s;
}

double damping_phi(double force, double scale, double cutoff) {
  const double excess = std::max(0.0, std::abs(force) - cutoff);
  return std::clamp(1.0 - scale * excess, 0.0, 1.0);
}

double exit_damping(double force, double gap) { return std::max(0.0, std::tanh(force * gap)); }

PoseDelta gate_feedforward(const PoseDelta& d, const PoseDelta& e) {
  PoseDelta out = d;
  for (int i = 0; i < 3; ++i) {
    if (sign_with_deadband(d.rotational[i]) * sign_with_deadband(e.rotational[i]) < 0) {
      out.rotational[i] = 0.0;
    }
    if (sign_with_deadband(d.translational[i]) * sign_with_deadband(e.translational[i]) < 0) {
      out.translational[i] = 0.0;
    }
  }
  return out;
}

AttractorUpdate raic_attractor_step(const ControllerState& state, const Pose& plan_now,
                                    const Pose& plan_next, const Wrench& wrench,
                                    const RaicGains& gains) {
  const PoseDelta d = pose_difference(plan_next, plan_now);
  const PoseDelta e = pose_difference(plan_now, state.attractor);
  const PoseDelta gated = gate_feedforward(d, e);

  const Vec6 f = wrench.as_vector();
  const Vec6 gap = e.to_wrench_order();
  AttractorUpdate out;
  for (int i = 0; i < 6; ++i) {
    const double release = exit_damping(f[i], gap[i]);
    out.feedforward_gain[i] = std::max(damping_phi(f[i], gains.scale[i], gains.cutoff[i]), release);
    out.feedback_gain[i] = std::max(
        damping_phi(f[i], gains.feedback_scale[i], gains.feedback_cutoff[i]), release);
  }

  const Vec6 step = out.feedforward_gain.cwiseProduct(gated.to_wrench_order()) +
                    out.feedback_gain.cwiseProduct(gap);
  out.attractor = pose_integrate(state.attractor, PoseDelta::from_wrench_order(step));
  return out;
}

// ---------------------------------------------------------------------------
// Spring-damper

SpringDamper::SpringDamper(const ImpedanceGains& gains, double dt) : gains_(gains), dt_(dt) {
  gains.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
  for (int i = 0; i < 6; ++i) {
    const double m = gains.inertia[i];
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    a(0, 1) = 1.0;
    a(1, 0) = -gains.stiffness[i] / m;
    a(1, 1) = -gains.damping[i] / m;
    a(1, 2) = 1.0 / m;
    const Eigen::Matrix3d phi = (a * dt).exp();
    axes_[i] = Axis{phi(0, 0), phi(0, 1), phi(1, 0), phi(1, 1), phi(0, 2), phi(1, 2)};
  }
}

void SpringDamper::advance(const Vec6& x0, const Vec6& v0, const Vec6& f, Vec6& x1,
                           Vec6& v1) const {
  for (int i = 0; i < 6; ++i) {
    const Axis& ax = axes_[i];
    x1[i] = ax.xx * x0[i] + ax.xv * v0[i] + ax.xf * f[i];
    v1[i] = ax.vx * x0[i] + ax.vv * v0[i] + ax.vf * f[i];
  }
}

MotionUpdate SpringDamper::step(const Pose& end_effector, const Vec6& velocity,
                                const Pose& attractor, const Wrench& wrench) const {
  const Vec6 x0 = spring_stretch(end_effector, attractor);
  Vec6 x1, v1;
  advance(x0, velocity, wrench.as_vector(), x1, v1);
  MotionUpdate out;
  out.end_effector = pose_integrate(end_effector, PoseDelta::from_wrench_order(x1 - x0));
  out.velocity = v1;
  return out;
}

Vec6 spring_stretch(const Pose& end_effector, const Pose& attractor) {
  return pose_difference(end_effector, attractor).to_wrench_order();
}

MotionUpdate spring_damper_step(const ControllerState& state, const Pose& attractor,
                                const Wrench& wrench, const ImpedanceGains& gains, double dt) {
  return SpringDamper(gains, dt).step(state.end_effector, state.velocity, attractor, wrench);
}

MotionUpdate impedance_step(const ControllerState& state, const Pose& plan_pose,
                            const Wrench& wrench, const ImpedanceGains& gains, double dt) {
  return spring_damper_step(state, plan_pose, wrench, gains, dt);
}

std::string_view to_string(ControllerKind kind) {
  return kind == ControllerKind::Raic ? "RAIC" : "Impedance";
}

Controller::Controller(ControllerKind kind, const ImpedanceGains& impedance,
                       const RaicGains& raic, double dt, const Pose& initial)
    : kind_(kind), raic_(raic), spring_(impedance, dt), state_(ControllerState::at(initial)) {
  raic_.validate();
}

ControlDiagnostics Controller::step(const Pose& plan_now, const Pose& plan_next,
                                    const Wrench& wrench) {
  ControlDiagnostics diag;
  if (kind_ == ControllerKind::Impedance) state_.attractor = plan_now;

  const MotionUpdate motion =
      spring_.step(state_.end_effector, state_.velocity, state_.attractor, wrench);

  if (kind_ == ControllerKind::Raic) {
    const AttractorUpdate update =
        raic_attractor_step(state_, plan_now, plan_next, wrench, raic_);
    state_.attractor = update.attractor;
    diag.feedforward_gain = update.feedforward_gain;
    diag.feedback_gain = update.feedback_gain;
  }
  state_.end_effector = motion.end_effector;
  state_.velocity = motion.velocity;
  ++state_.plan_index;
  return diag;
}

}  // namespace raic
