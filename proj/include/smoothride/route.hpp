#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace smoothride {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// A point on the lane center with the admissible lateral offsets along its
/// local lateral axis and the admissible speed range.
struct Station {
  double center_x = 0.0;
  double center_y = 0.0;
  double lateral_axis_angle = 0.0;  // radians, direction of +offset
  double y_min = 0.0;
  double y_max = 0.0;
  double v_min = 0.0;
  double v_max = 0.0;
};

/// Ordered stations along the driving direction. Immutable once built; the
/// constructor enforces every invariant and throws ValidationError carrying
/// the offending station index.
class RouteCorridor {
 public:
  static constexpr double kMinSpacing = 0.1;  // meters

  RouteCorridor(std::string name, std::vector<Station> stations);

  const std::string& name() const { return name_; }
  const std::vector<Station>& stations() const { return stations_; }
  const Station& operator[](std::size_t k) const { return stations_[k]; }
  std::size_t size() const { return stations_.size(); }

  std::vector<Point2> centers() const;

 private:
  std::string name_;
  std::vector<Station> stations_;
};

/// Planner decision vector: one lateral offset and one speed per station.
struct MotionPlan {
  std::vector<double> lateral_offsets;
  std::vector<double> speeds;

  std::size_t size() const { return speeds.size(); }
};

/// Left normal of the centered finite-difference tangent at every center
/// (one-sided at the ends).
std::vector<double> lateral_axes_from_centers(std::span<const Point2> centers);

/// Station k displaced by lateral_offsets[k] along its lateral axis.
std::vector<Point2> waypoints_to_cartesian(const RouteCorridor& corridor,
                                           const MotionPlan& plan);

MotionPlan clamp_to_bounds(const RouteCorridor& corridor, MotionPlan plan);
bool within_bounds(const RouteCorridor& corridor, const MotionPlan& plan,
                   double tolerance = 0.0);

RouteCorridor route_from_json(const nlohmann::json& doc);
nlohmann::json route_to_json(const RouteCorridor& corridor);
RouteCorridor load_route(const std::filesystem::path& path);
void save_route(const RouteCorridor& corridor,
                const std::filesystem::path& path);

}  // namespace smoothride
