#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "smoothride/reconstruction.hpp"
#include "smoothride/route.hpp"
#include "smoothride/sensor_log.hpp"

namespace smoothride::scenarios {

/// East-bound straight road starting at the origin.
RouteCorridor straight_corridor(double length, std::size_t stations, double half_width,
                                double v_min, double v_max);

/// Counter-clockwise arc of `radius` about the origin, stations
/// `angle_step` radians apart starting at angle 0.
RouteCorridor arc_corridor(double radius, std::size_t stations, double angle_step,
                           double half_width, double v_min, double v_max);

/// Five stations around a 90-degree left corner of radius 10 m. The end
/// stations are fixed to the lane center; interior offsets lie in
/// [-1.5, 1.5] m and all speeds in [3, 15] m/s.
RouteCorridor toy_corner();
inline constexpr double kToyInitialSpeed = 10.0;
inline constexpr double kToyTimeWeight = 0.05;

/// Piecewise lane-center builder: straights, circular arcs and clothoid
/// ramps (curvature linear in arc length), each with its own speed limit
/// and lateral half-width. Stations are placed every `spacing` meters of
/// arc length across piece boundaries.
class CenterlineBuilder {
 public:
  CenterlineBuilder(double x0, double y0, double heading, double spacing = 4.0);

  CenterlineBuilder& straight(double length, double v_max, double half_width = 1.5);
  /// Positive `angle` turns left.
  CenterlineBuilder& arc(double radius, double angle, double v_max, double half_width = 1.5);
  /// Curvature ramps linearly from its current value to `curvature_end`
  /// (1/m, positive left) over `length`.
  CenterlineBuilder& ramp(double length, double curvature_end, double v_max,
                          double half_width = 1.5);

  RouteCorridor build(std::string name, double v_min) const;
  double length() const { return length_; }

 private:
  void push(double x, double y, double v_max, double half_width);
  void piece(double length, double k0, double k1, double v_max, double half_width);

  double x_, y_, heading_;
  double spacing_;
  double curvature_ = 0.0;
  double since_last_ = 0.0;  // arc length since the last station
  double length_ = 0.0;
  std::vector<Point2> points_;
  std::vector<double> v_max_;
  std::vector<double> half_width_;
};

/// Approach, a first roundabout taken as a left turn, a right-left-right
/// sequence of bends, a second roundabout and an exit straight; about
/// 880 m with 80, 50 and 60 km/h zones.
RouteCorridor roundabout_route();

/// Driving style of the synthetic human run.
struct HumanStyle {
  double lateral_accel = 2.8;             // m/s^2 accepted at the apex
  double brake = 2.5;                     // m/s^2, late braking into bends
  double coast = 0.35;                    // m/s^2, early lift-off deceleration
  double coast_margin = 3.0;              // m/s above the apex speed where coasting ends
  double accel = 1.2;                     // m/s^2 out of bends
  double speed_smoothing = 15.0;          // meters, Gaussian width
  double fluctuation = 0.08;              // relative cruise-speed ripple on straights
  double fluctuation_wavelength = 250.0;  // meters
  double weave_amplitude = 0.3;           // meters of in-lane weave
  double weave_wavelength = 200.0;        // meters
};

/// Lane-center plan with a slow weave whose speeds follow the style,
/// uniformly rescaled so the travel time equals `target_time` when given.
MotionPlan human_like_plan(const RouteCorridor& corridor, const HumanStyle& style = {},
                           std::optional<double> target_time = std::nullopt);

inline constexpr double kHumanTravelTime = 76.5;  // seconds

/// Ground truth sampled on the GPS grid.
struct TruthTrack {
  double Ts = 0.0;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> heading;
  std::vector<double> speed;
  std::vector<double> ax;
  std::vector<double> ay;
};

struct SyntheticLogSettings {
  double duration = 120.0;
  double gps_rate = 10.0;
  double imu_rate = 100.0;
  double gps_sigma = 0.0;
  double imu_sigma = 0.0;
  double imu_lag = 0.0;  // IMU stamps run late by this much
  std::optional<TimeWindow> outage;
  std::uint64_t seed = 0;
};

struct SyntheticLog {
  SensorLog log;
  TruthTrack truth;
};

/// Smooth continuous drive (speed 8-15 m/s, alternating bends) sampled by
/// a GPS and an IMU with optional noise, lag and a GPS outage.
SyntheticLog synthetic_drive(const SyntheticLogSettings& settings = {});

/// The smooth drive's speed and heading sampled on the grid t_k = k Ts.
ReconstructionVariables drive_variables(double duration, double Ts);

/// Constant-speed circle driven for `turns` full revolutions.
ReconstructionVariables loop_variables(double radius, double speed, double turns, double Ts);

/// Noiseless log that the discrete reconstruction model reproduces exactly:
/// GPS at the predicted positions and IMU at the predicted accelerations,
/// both on the grid.
SensorLog exact_model_log(const ReconstructionVariables& vars, double Ts);

/// A profile with constant speed on a straight line whose per-segment
/// accelerations are overwritten by `ax` and `ay` at uniform step `dt`.
MotionProfile signal_profile(const std::vector<double>& ax, const std::vector<double>& ay,
                             double dt);

}  // namespace smoothride::scenarios
