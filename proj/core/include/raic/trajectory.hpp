#pragma once

// Penetrate-drag-scoop (PDS) loading trajectories and the swivel, twist and
// dive primitives layered on top of them.

#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "raic/geometry.hpp"

namespace raic {

class ParameterError : public std::invalid_argument {
 public:
  explicit ParameterError(const std::string& what) : std::invalid_argument(what) {}
};

enum class Phase { Penetrate, Drag, Scoop };

std::string_view to_string(Phase phase);

/// Shape of one loading cycle. The scoop enters at `start` (on the surface),
/// descends along the heading at an angle of (pi - attack_angle) below the
/// horizontal until it is `depth` below the start, drags `drag_length`
/// horizontally, rotates in place to `closing_angle` and lifts to
/// `lift_height` above the start height.
///
/// Pitch values are elevation angles of the scoop's travel axis: negative
/// nose-down, zero level.
struct PdsParams {
  Vec3 start = Vec3::Zero();
  double heading = 0.0;                 // rad, yaw of the dig plane
  double attack_angle = 5.0 * std::numbers::pi / 6.0;  // rad
  double depth = 0.07;                  // m
  double drag_length = 0.25;            // m
  double closing_angle = std::numbers::pi / 4.0;  // rad
  double lift_height = 0.10;            // m
  double tip_speed = 0.05;              // m/s along the path
  double scoop_rotation_time = 1.5;     // s
  double sample_dt = 0.008;             // s

  void validate() const;
  bool operator==(const PdsParams&) const = default;

  /// Angle of the penetration segment below the horizontal.
  double descent_angle() const;
  /// Scoop pitch held by plain PDS during penetrate and drag.
  double attack_pitch() const;
  Vec3 heading_direction() const;
  /// End of the straight penetration segment (depth reached).
  Vec3 drag_start() const;
  /// End of the drag segment.
  Vec3 drag_end() const;
  double penetration_length() const;
};

/// Oscillation amplitudes (rad), angular frequencies (rad/s) and the dive
/// curve factor in [0, 1]. All zeros reproduce plain PDS.
struct PrimitiveParams {
  double swivel_amplitude = 0.0;
  double swivel_frequency = 0.0;
  double twist_amplitude = 0.0;
  double twist_frequency = 0.0;
  double dive = 0.0;

  void validate() const;
  bool is_neutral() const;
  bool operator==(const PrimitiveParams&) const = default;
};

struct PlanSample {
  double time = 0.0;
  Pose pose;
  Phase phase = Phase::Penetrate;
  EulerAngles angles;  // yaw, pitch, roll used to build pose.rotation
};

struct TrajectoryPlan {
  std::vector<PlanSample> samples;
  double penetrate_end = 0.0;  // t1
  double drag_end = 0.0;       // t2
  double scoop_end = 0.0;      // t3
  double sample_dt = 0.0;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  const PlanSample& operator[](std::size_t i) const { return samples[i]; }
  const PlanSample& back() const { return samples.back(); }
};

/// A * sin(omega * t); the oscillation argument takes omega directly in rad/s.
double swivel_angle(double t, double amplitude, double omega);
double twist_angle(double t, double amplitude, double omega);

/// (1-u)^2 P0 + 2u(1-u) P1 + u^2 P2. Throws ParameterError for u outside [0, 1].
Vec3 bezier_quadratic(const Vec3& p0, const Vec3& p1, const Vec3& p2, double u);
/// d/du of bezier_quadratic().
Vec3 bezier_quadratic_derivative(const Vec3& p0, const Vec3& p1, const Vec3& p2, double u);

/// Penetrate+drag path blended toward a Bezier smoothing by `s`, sampled at
/// normalized arc-length parameter u in [0, 1].
Vec3 dive_position(double u, double s, const PdsParams& pds);

/// Pitch keeping the scoop tangent to a path with the given velocity:
/// atan2(vertical rate, horizontal speed). Throws ParameterError on a zero
/// velocity.
double dive_pitch(const Vec3& path_derivative);

/// Plain PDS loading cycle without primitives.
TrajectoryPlan generate_pds_plan(const PdsParams& pds);

/// PDS with swivel, twist and dive applied.
TrajectoryPlan generate_plan(const PdsParams& pds, const PrimitiveParams& prim);

/// Penetrate+drag part of a dive trajectory: the unsmoothed PDS polyline and
/// the Bezier-smoothed path (followed by the drag shortened to (1-s)*l), both
/// parameterized by their own normalized arc length w, blended as
/// (1-s)*polyline(w) + s*smoothed(w). Exposed for tests and plotting.
class DivePath {
 public:
  DivePath(const PdsParams& pds, double s);

  double dive() const { return s_; }
  /// Arc length of the blended path.
  double length() const { return length_; }
  /// Blend parameter at which the polyline turns from penetration to drag.
  double corner_parameter() const { return corner_w_; }
  /// Distance travelled when the blend parameter reaches corner_parameter().
  double corner_distance() const { return corner_distance_; }

  /// Blend parameter reached after travelling `distance` along the blended path.
  double parameter_at_distance(double distance) const;
  double distance_at_parameter(double w) const;

  Vec3 position(double w) const;
  /// d(position)/dw.
  Vec3 derivative(double w) const;
  /// Position after travelling `distance`; exact polyline evaluation when s == 0.
  Vec3 position_at_distance(double distance) const;

  Vec3 polyline(double w) const;
  Vec3 smoothed(double w) const;

 private:
  Vec3 polyline_derivative(double w) const;
  Vec3 smoothed_derivative(double w) const;
  /// Bezier parameter at an arc length along the Bezier.
  double bezier_parameter(double arc) const;

  double s_;
  Vec3 start_, drag_start_, bezier_end_, descent_dir_, heading_dir_;
  double pen_length_, drag_length_, poly_length_;
  double bezier_length_, smoothed_length_;
  double corner_w_, corner_distance_;
  std::vector<double> bezier_arc_;    // cumulative arc length at uniform Bezier u
  std::vector<double> blend_w_;       // knots in w, uniform on each side of the corner
  std::vector<double> blend_arc_;     // cumulative arc length at blend_w_
  double length_;
};

}  // namespace raic
