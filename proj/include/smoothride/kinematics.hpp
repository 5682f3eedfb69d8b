#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "smoothride/route.hpp"

namespace smoothride {

/// Time-stamped planar trajectory. Points and speeds are per waypoint
/// (length N); steps and accelerations are per segment (length N-1).
struct MotionProfile {
  std::vector<Point2> points;
  std::vector<double> speeds;
  std::vector<double> segment_time_steps;
  std::vector<double> ax;
  std::vector<double> ay;
  double total_time = 0.0;

  std::size_t size() const { return points.size(); }
  std::size_t segments() const { return segment_time_steps.size(); }

  /// Cumulative time at each waypoint, starting at 0.
  std::vector<double> waypoint_times() const;

  /// Throws ValidationError / DimensionError on a malformed profile.
  void validate() const;
};

/// Segment-wise kinematics of a waypoint polyline:
///   d_k   = |p_{k+1} - p_k|
///   dt_k  = 2 d_k / (v_k + v_{k+1})
///   ax_k  = (v_{k+1}^2 - v_k^2) / (2 d_k)
///   ay_k  = ((v_k + v_{k+1}) / 2)^2 * dpsi_k / d_k
/// where dpsi_k is the signed turn from segment k to segment k+1. The last
/// segment has no following heading change and its ay is 0.
MotionProfile evaluate_motion(std::span<const Point2> points,
                              std::span<const double> speeds);

MotionProfile evaluate_motion(const RouteCorridor& corridor,
                              const MotionPlan& plan);

/// Signed heading change between consecutive segment directions, length
/// points.size() - 2.
std::vector<double> heading_changes(std::span<const Point2> points);

struct UniformSeries {
  double rate = 0.0;
  std::vector<double> t;
  std::vector<double> ax;
  std::vector<double> ay;
};

/// Piecewise-linear interpolation of the per-segment accelerations (placed
/// at segment mid-times, held flat beyond the first and last) onto the grid
/// t_i = i / rate covering [0, total_time].
UniformSeries resample_uniform(const MotionProfile& profile, double rate);

/// CSV with header t,x,y,v,ax,ay. One row per waypoint; the last row carries
/// ax = ay = 0 as the per-segment series is one shorter.
void write_profile_csv(const MotionProfile& profile,
                       const std::filesystem::path& path);
MotionProfile read_profile_csv(const std::filesystem::path& path);

}  // namespace smoothride
