#include "raic/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace raic {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kBezierTablePoints = 64;
constexpr int kBlendTablePoints = 256;

template <typename T>
std::string describe(std::string_view field, const T& value, std::string_view expected) {
  std::ostringstream msg;
  msg << field << " = " << value << " is out of range; expected " << expected;
  return msg.str();
}

void require(bool ok, std::string_view field, double value, std::string_view expected) {
  if (!ok) throw ParameterError(describe(field, value, expected));
}

// 5-point Gauss-Legendre quadrature of f over [a, b].
template <typename F>
double integrate(F&& f, double a, double b) {
  static constexpr double kNodes[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                       0.5384693101056831, 0.9061798459386640};
  static constexpr double kWeights[5] = {0.2369268850561891, 0.4786286704993665,
                                         0.5688888888888889, 0.4786286704993665,
                                         0.2369268850561891};
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) sum += kWeights[i] * f(mid + half * kNodes[i]);
  return half * sum;
}

// Parameter in [lo, hi] where arc(lo) + integral of speed reaches `target`,
// by Newton steps from a linear guess.
template <typename F>
double invert_arc(F&& speed, double lo, double hi, double arc_lo, double arc_hi, double target) {
  const double span = arc_hi - arc_lo;
  if (!(span > 0.0)) return lo;
  double x = lo + (target - arc_lo) / span * (hi - lo);
  for (int it = 0; it < 4; ++it) {
    const double v = speed(x);
    if (!(v > 0.0)) break;
    x = std::clamp(x - (arc_lo + integrate(speed, lo, x) - target) / v, lo, hi);
  }
  return x;
}

// Linear interpolation that returns `b` exactly at a == 1 and `a0` at a == 0.
double lerp(double a0, double b, double a) { return (1.0 - a) * a0 + a * b; }

struct ScoopPhase {
  Vec3 drag_end;
  double start_time;    // t2
  double duration;      // t3 - t2
  double rotation_time;
  double lift_top;      // z at termination
  double speed;
  double pitch_start;
  double yaw_offset_start;
  double roll_start;
};

ScoopPhase make_scoop_phase(const PdsParams& pds, const Vec3& drag_end, double t2,
                            double pitch2, double yaw_offset2, double roll2) {
  ScoopPhase sp;
  sp.drag_end = drag_end;
  sp.start_time = t2;
  sp.rotation_time = pds.scoop_rotation_time;
  sp.lift_top = pds.start.z() + pds.lift_height;
  sp.speed = pds.tip_speed;
  sp.duration = pds.scoop_rotation_time + (sp.lift_top - drag_end.z()) / pds.tip_speed;
  sp.pitch_start = pitch2;
  sp.yaw_offset_start = yaw_offset2;
  sp.roll_start = roll2;
  return sp;
}

PlanSample scoop_sample(const PdsParams& pds, const ScoopPhase& sp, double t) {
  const double tau = std::clamp(t - sp.start_time, 0.0, sp.duration);
  const double rot_frac = std::min(tau / sp.rotation_time, 1.0);
  const double level_frac = std::min(tau / sp.duration, 1.0);

  Vec3 pos = sp.drag_end;
  if (tau > sp.rotation_time) {
    pos.z() = std::min(sp.drag_end.z() + sp.speed * (tau - sp.rotation_time), sp.lift_top);
  }
  if (t >= sp.start_time + sp.duration) pos.z() = sp.lift_top;

  PlanSample out;
  out.time = t;
  out.phase = Phase::Scoop;
  out.angles.pitch = lerp(sp.pitch_start, pds.closing_angle, rot_frac);
  out.angles.yaw = pds.heading + lerp(sp.yaw_offset_start, 0.0, level_frac);
  out.angles.roll = lerp(sp.roll_start, 0.0, level_frac);
  out.pose = Pose{compose_euler(out.angles.yaw, out.angles.pitch, out.angles.roll), pos};
  return out;
}

std::size_t sample_count(double duration, double dt) {
  const double intervals = std::ceil(duration / dt - 1e-9);
  return static_cast<std::size_t>(std::max(intervals, 1.0)) + 1;
}

}  // namespace

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Penetrate: return "penetrate";
    case Phase::Drag: return "drag";
    case Phase::Scoop: return "scoop";
  }
  return "unknown";
}

void PdsParams::validate() const {
  if (!start.allFinite()) throw ParameterError("start must be finite");
  require(std::isfinite(heading), "heading", heading, "a finite angle");
  require(attack_angle > kPi / 2.0 && attack_angle < kPi, "attack_angle", attack_angle,
          "(pi/2, pi)");
  require(depth > 0.0 && std::isfinite(depth), "depth", depth, "> 0");
  require(drag_length >= 0.0 && std::isfinite(drag_length), "drag_length", drag_length, ">= 0");
  require(std::abs(closing_angle) < kPi / 2.0, "closing_angle", closing_angle, "(-pi/2, pi/2)");
  require(lift_height >= 0.0 && std::isfinite(lift_height), "lift_height", lift_height, ">= 0");
  require(tip_speed > 0.0 && std::isfinite(tip_speed), "tip_speed", tip_speed, "> 0");
  require(scoop_rotation_time > 0.0 && std::isfinite(scoop_rotation_time),
          "scoop_rotation_time", scoop_rotation_time, "> 0");
  require(sample_dt > 0.0 && std::isfinite(sample_dt), "sample_dt", sample_dt, "> 0");
}

double PdsParams::descent_angle() const { return kPi - attack_angle; }
double PdsParams::attack_pitch() const { return attack_angle - kPi; }

Vec3 PdsParams::heading_direction() const {
  return Vec3(std::cos(heading), std::sin(heading), 0.0);
}

double PdsParams::penetration_length() const { return depth / std::sin(descent_angle()); }

Vec3 PdsParams::drag_start() const {
  const double g = descent_angle();
  const Vec3 dir = std::cos(g) * heading_direction() - std::sin(g) * Vec3::UnitZ();
  return start + penetration_length() * dir;
}

Vec3 PdsParams::drag_end() const { return drag_start() + drag_length * heading_direction(); }

void PrimitiveParams::validate() const {
  require(swivel_amplitude >= 0.0 && swivel_amplitude <= kPi / 2.0, "swivel_amplitude",
          swivel_amplitude, "[0, pi/2]");
  require(swivel_frequency >= 0.0 && std::isfinite(swivel_frequency), "swivel_frequency",
          swivel_frequency, ">= 0");
  require(twist_amplitude >= 0.0 && twist_amplitude <= kPi / 2.0, "twist_amplitude",
          twist_amplitude, "[0, pi/2]");
  require(twist_frequency >= 0.0 && std::isfinite(twist_frequency), "twist_frequency",
          twist_frequency, ">= 0");
  require(dive >= 0.0 && dive <= 1.0, "dive", dive, "[0, 1]");
}

bool PrimitiveParams::is_neutral() const {
  return swivel_amplitude == 0.0 && twist_amplitude == 0.0 && dive == 0.0;
}

double swivel_angle(double t, double amplitude, double omega) {
  return amplitude * std::sin(omega * t);
}

double twist_angle(double t, double amplitude, double omega) {
  return amplitude * std::sin(omega * t);
}

Vec3 bezier_quadratic(const Vec3& p0, const Vec3& p1, const Vec3& p2, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError(describe("u", u, "[0, 1]"));
  const double a = 1.0 - u;
  return a * a * p0 + 2.0 * u * a * p1 + u * u * p2;
}

Vec3 bezier_quadratic_derivative(const Vec3& p0, const Vec3& p1, const Vec3& p2, double u) {
  return 2.0 * (1.0 - u) * (p1 - p0) + 2.0 * u * (p2 - p1);
}

double dive_pitch(const Vec3& d) {
  const double horizontal = std::hypot(d.x(), d.y());
  if (horizontal == 0.0 && d.z() == 0.0) {
    throw ParameterError("dive_pitch: zero path velocity has no tangent");
  }
  return std::atan2(d.z(), horizontal);
}

// ---------------------------------------------------------------------------
// DivePath

DivePath::DivePath(const PdsParams& pds, double s) : s_(s) {
  pds.validate();
  require(s >= 0.0 && s <= 1.0, "dive", s, "[0, 1]");

  start_ = pds.start;
  drag_start_ = pds.drag_start();
  heading_dir_ = pds.heading_direction();
  descent_dir_ = (drag_start_ - start_).normalized();
  pen_length_ = pds.penetration_length();
  drag_length_ = pds.drag_length;
  poly_length_ = pen_length_ + drag_length_;
  corner_w_ = pen_length_ / poly_length_;
  bezier_end_ = drag_start_ + s * pds.drag_length * heading_dir_;

  const auto bezier_speed = [this](double u) {
    return bezier_quadratic_derivative(start_, drag_start_, bezier_end_, u).norm();
  };
  bezier_arc_.resize(kBezierTablePoints);
  bezier_arc_[0] = 0.0;
  for (int k = 1; k < kBezierTablePoints; ++k) {
    const double u0 = static_cast<double>(k - 1) / (kBezierTablePoints - 1);
    const double u1 = static_cast<double>(k) / (kBezierTablePoints - 1);
    bezier_arc_[k] = bezier_arc_[k - 1] + integrate(bezier_speed, u0, u1);
  }
  bezier_length_ = bezier_arc_.back();
  smoothed_length_ = bezier_length_ + (1.0 - s) * pds.drag_length;

  // Uniform knots on each side of the polyline corner, so the corner is a knot.
  const int corner_knots = std::clamp(
      static_cast<int>(std::lround(corner_w_ * (kBlendTablePoints - 1))), 1, kBlendTablePoints - 2);
  blend_w_.resize(kBlendTablePoints);
  for (int k = 0; k < kBlendTablePoints; ++k) {
    blend_w_[k] = k <= corner_knots
                      ? corner_w_ * k / corner_knots
                      : corner_w_ + (1.0 - corner_w_) * (k - corner_knots) /
                                        (kBlendTablePoints - 1 - corner_knots);
  }
  const auto speed = [this](double w) { return derivative(w).norm(); };
  blend_arc_.resize(kBlendTablePoints);
  blend_arc_[0] = 0.0;
  for (int k = 1; k < kBlendTablePoints; ++k) {
    blend_arc_[k] = blend_arc_[k - 1] + integrate(speed, blend_w_[k - 1], blend_w_[k]);
  }
  length_ = s_ == 0.0 ? poly_length_ : blend_arc_.back();
  corner_distance_ = s_ == 0.0 ? pen_length_ : distance_at_parameter(corner_w_);
}

double DivePath::bezier_parameter(double arc) const {
  const double target = std::clamp(arc, 0.0, bezier_length_);
  const auto it = std::upper_bound(bezier_arc_.begin(), bezier_arc_.end(), target);
  const std::size_t hi =
      std::clamp<std::size_t>(it - bezier_arc_.begin(), 1, bezier_arc_.size() - 1);
  const std::size_t lo = hi - 1;
  const double du = 1.0 / (kBezierTablePoints - 1);
  const auto speed = [this](double u) {
    return bezier_quadratic_derivative(start_, drag_start_, bezier_end_, u).norm();
  };
  return invert_arc(speed, lo * du, std::min(hi * du, 1.0), bezier_arc_[lo], bezier_arc_[hi],
                    target);
}

Vec3 DivePath::polyline(double w) const {
  const double dist = std::clamp(w, 0.0, 1.0) * poly_length_;
  if (dist <= pen_length_) return start_ + dist * descent_dir_;
  return drag_start_ + (dist - pen_length_) * heading_dir_;
}

Vec3 DivePath::polyline_derivative(double w) const {
  return (w < corner_w_ ? descent_dir_ : heading_dir_) * poly_length_;
}

Vec3 DivePath::smoothed(double w) const {
  const double dist = std::clamp(w, 0.0, 1.0) * smoothed_length_;
  if (dist <= bezier_length_ && bezier_length_ > 0.0) {
    return bezier_quadratic(start_, drag_start_, bezier_end_, bezier_parameter(dist));
  }
  return bezier_end_ + (dist - bezier_length_) * heading_dir_;
}

Vec3 DivePath::smoothed_derivative(double w) const {
  const double dist = std::clamp(w, 0.0, 1.0) * smoothed_length_;
  if (dist < bezier_length_ || (dist == bezier_length_ && s_ == 1.0)) {
    const Vec3 tangent =
        bezier_quadratic_derivative(start_, drag_start_, bezier_end_, bezier_parameter(dist));
    // Arc-length parameterized: unit tangent scaled by d(dist)/dw.
    return tangent.normalized() * smoothed_length_;
  }
  return heading_dir_ * smoothed_length_;
}

Vec3 DivePath::position(double w) const {
  return (1.0 - s_) * polyline(w) + s_ * smoothed(w);
}

Vec3 DivePath::derivative(double w) const {
  return (1.0 - s_) * polyline_derivative(w) + s_ * smoothed_derivative(w);
}

double DivePath::parameter_at_distance(double distance) const {
  if (s_ == 0.0) return std::clamp(distance / poly_length_, 0.0, 1.0);
  const double target = std::clamp(distance, 0.0, blend_arc_.back());
  const auto it = std::upper_bound(blend_arc_.begin(), blend_arc_.end(), target);
  const std::size_t hi =
      std::clamp<std::size_t>(it - blend_arc_.begin(), 1, blend_arc_.size() - 1);
  const std::size_t lo = hi - 1;
  const auto speed = [this](double w) { return derivative(w).norm(); };
  return invert_arc(speed, blend_w_[lo], blend_w_[hi], blend_arc_[lo], blend_arc_[hi], target);
}

double DivePath::distance_at_parameter(double w) const {
  if (s_ == 0.0) return std::clamp(w, 0.0, 1.0) * poly_length_;
  const double x = std::clamp(w, 0.0, 1.0);
  const auto it = std::upper_bound(blend_w_.begin(), blend_w_.end(), x);
  const std::size_t hi = std::clamp<std::size_t>(it - blend_w_.begin(), 1, blend_w_.size() - 1);
  const std::size_t lo = hi - 1;
  const auto speed = [this](double v) { return derivative(v).norm(); };
  return blend_arc_[lo] + integrate(speed, blend_w_[lo], x);
}

Vec3 DivePath::position_at_distance(double distance) const {
  if (distance >= length_) return drag_start_ + drag_length_ * heading_dir_;
  if (s_ == 0.0) {
    if (distance <= pen_length_) return start_ + distance * descent_dir_;
    return drag_start_ + (distance - pen_length_) * heading_dir_;
  }
  return position(parameter_at_distance(distance));
}

Vec3 dive_position(double u, double s, const PdsParams& pds) {
  if (!(u >= 0.0 && u <= 1.0)) throw ParameterError(describe("u", u, "[0, 1]"));
  return DivePath(pds, s).position(u);
}

// ---------------------------------------------------------------------------
// Plans

TrajectoryPlan generate_pds_plan(const PdsParams& pds) {
  pds.validate();
  const Vec3 dir = (pds.drag_start() - pds.start).normalized();
  const Vec3 heading = pds.heading_direction();
  const double pen = pds.penetration_length();
  const double path = pen + pds.drag_length;
  const Vec3 drag_start = pds.drag_start();

  const double t1 = pen / pds.tip_speed;
  const double t2 = path / pds.tip_speed;
  const ScoopPhase sp =
      make_scoop_phase(pds, pds.drag_end(), t2, pds.attack_pitch(), 0.0, 0.0);

  TrajectoryPlan plan;
  plan.sample_dt = pds.sample_dt;
  plan.penetrate_end = t1;
  plan.drag_end = t2;
  plan.scoop_end = t2 + sp.duration;
  const Mat3 attack = compose_euler(pds.heading, pds.attack_pitch(), 0.0);

  const std::size_t n = sample_count(plan.scoop_end, pds.sample_dt);
  plan.samples.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * pds.sample_dt;
    const double dist = pds.tip_speed * t;
    if (dist >= path) {
      plan.samples.push_back(scoop_sample(pds, sp, t));
      continue;
    }
    PlanSample s;
    s.time = t;
    s.angles = {pds.heading, pds.attack_pitch(), 0.0};
    if (dist <= pen) {
      s.phase = dist < pen ? Phase::Penetrate : Phase::Drag;
      s.pose = Pose{attack, pds.start + dist * dir};
    } else {
      s.phase = Phase::Drag;
      s.pose = Pose{attack, drag_start + (dist - pen) * heading};
    }
    plan.samples.push_back(s);
  }
  return plan;
}

TrajectoryPlan generate_plan(const PdsParams& pds, const PrimitiveParams& prim) {
  pds.validate();
  prim.validate();
  const DivePath path(pds, prim.dive);
  const double v = pds.tip_speed;
  const double corner_distance = path.corner_distance();
  const double t2 = path.length() / v;

  auto pitch_at = [&](double w, const Vec3& fallback_chord) {
    if (prim.dive == 0.0) return pds.attack_pitch();
    Vec3 d = path.derivative(w);
    if (d.norm() < 1e-12) d = fallback_chord;
    return dive_pitch(d);
  };

  const double pitch2 = pitch_at(1.0, path.position(1.0) - path.position(0.999));
  const double yaw2 = swivel_angle(t2, prim.swivel_amplitude, prim.swivel_frequency);
  const double roll2 = twist_angle(t2, prim.twist_amplitude, prim.twist_frequency);
  const ScoopPhase sp = make_scoop_phase(pds, pds.drag_end(), t2, pitch2, yaw2, roll2);

  TrajectoryPlan plan;
  plan.sample_dt = pds.sample_dt;
  plan.penetrate_end = corner_distance / v;
  plan.drag_end = t2;
  plan.scoop_end = t2 + sp.duration;

  const std::size_t n = sample_count(plan.scoop_end, pds.sample_dt);
  plan.samples.reserve(n);
  Vec3 previous = pds.start;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * pds.sample_dt;
    const double dist = v * t;
    if (dist >= path.length()) {
      plan.samples.push_back(scoop_sample(pds, sp, t));
      continue;
    }
    const double w = path.parameter_at_distance(dist);
    PlanSample s;
    s.time = t;
    s.phase = dist < corner_distance ? Phase::Penetrate : Phase::Drag;
    s.pose.position = path.position_at_distance(dist);
    s.angles.yaw = pds.heading + swivel_angle(t, prim.swivel_amplitude, prim.swivel_frequency);
    s.angles.pitch = pitch_at(w, s.pose.position - previous);
    s.angles.roll = twist_angle(t, prim.twist_amplitude, prim.twist_frequency);
    s.pose.rotation = compose_euler(s.angles.yaw, s.angles.pitch, s.angles.roll);
    previous = s.pose.position;
    plan.samples.push_back(s);
  }
  return plan;
}

}  // namespace raic
