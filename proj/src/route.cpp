#include "smoothride/route.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "smoothride/error.hpp"

namespace smoothride {

RouteCorridor::RouteCorridor(std::string name, std::vector<Station> stations)
    : name_(std::move(name)), stations_(std::move(stations)) {
  if (stations_.size() < 3) {
    throw ValidationError(
        fmt::format("route needs at least 3 stations, got {}",
                    stations_.size()));
  }
  for (std::size_t k = 0; k < stations_.size(); ++k) {
    const Station& s = stations_[k];
    const bool finite = std::isfinite(s.center_x) &&
                        std::isfinite(s.center_y) &&
                        std::isfinite(s.lateral_axis_angle) &&
                        std::isfinite(s.y_min) && std::isfinite(s.y_max) &&
                        std::isfinite(s.v_min) && std::isfinite(s.v_max);
    if (!finite) {
      throw ValidationError(fmt::format("station {}: non-finite field", k), k);
    }
    if (s.y_min > s.y_max) {
      throw ValidationError(
          fmt::format("station {}: y_min {} > y_max {}", k, s.y_min, s.y_max),
          k);
    }
    if (s.y_min > 0.0 || s.y_max < 0.0) {
      throw ValidationError(
          fmt::format("station {}: lane center outside [y_min, y_max]", k), k);
    }
    if (s.v_min < 0.0 || !(s.v_min < s.v_max)) {
      throw ValidationError(
          fmt::format("station {}: need 0 <= v_min < v_max, got [{}, {}]", k,
                      s.v_min, s.v_max),
          k);
    }
    if (k == 0) continue;
    const Station& p = stations_[k - 1];
    const double dx = s.center_x - p.center_x;
    const double dy = s.center_y - p.center_y;
    if (std::hypot(dx, dy) <= kMinSpacing) {
      throw ValidationError(
          fmt::format("station {}: spacing to previous station <= {} m", k,
                      kMinSpacing),
          k);
    }
    if (k >= 2) {
      const Station& pp = stations_[k - 2];
      const double px = p.center_x - pp.center_x;
      const double py = p.center_y - pp.center_y;
      if (dx * px + dy * py <= 0.0) {
        throw ValidationError(
            fmt::format("station {}: reverses the driving direction", k), k);
      }
    }
  }
}

std::vector<Point2> RouteCorridor::centers() const {
  std::vector<Point2> out;
  out.reserve(stations_.size());
  for (const Station& s : stations_) out.push_back({s.center_x, s.center_y});
  return out;
}

std::vector<double> lateral_axes_from_centers(std::span<const Point2> centers) {
  const std::size_t n = centers.size();
  std::vector<double> angles(n, 0.0);
  if (n < 2) return angles;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k == 0 ? 0 : k - 1;
    const std::size_t hi = k + 1 == n ? n - 1 : k + 1;
    const double tx = centers[hi].x - centers[lo].x;
    const double ty = centers[hi].y - centers[lo].y;
    angles[k] = std::atan2(ty, tx) + std::numbers::pi / 2.0;
  }
  return angles;
}

std::vector<Point2> waypoints_to_cartesian(const RouteCorridor& corridor,
                                           const MotionPlan& plan) {
  const std::size_t n = corridor.size();
  if (plan.lateral_offsets.size() != n || plan.speeds.size() != n) {
    throw DimensionError(fmt::format(
        "plan has {} offsets / {} speeds but corridor has {} stations",
        plan.lateral_offsets.size(), plan.speeds.size(), n));
  }
  std::vector<Point2> points(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Station& s = corridor[k];
    const double y = plan.lateral_offsets[k];
    points[k] = {s.center_x + y * std::cos(s.lateral_axis_angle),
                 s.center_y + y * std::sin(s.lateral_axis_angle)};
  }
  return points;
}

MotionPlan clamp_to_bounds(const RouteCorridor& corridor, MotionPlan plan) {
  const std::size_t n = corridor.size();
  if (plan.lateral_offsets.size() != n || plan.speeds.size() != n) {
    throw DimensionError("clamp_to_bounds: plan length mismatch");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Station& s = corridor[k];
    plan.lateral_offsets[k] =
        std::clamp(plan.lateral_offsets[k], s.y_min, s.y_max);
    plan.speeds[k] = std::clamp(plan.speeds[k], s.v_min, s.v_max);
  }
  return plan;
}

bool within_bounds(const RouteCorridor& corridor, const MotionPlan& plan,
                   double tolerance) {
  const std::size_t n = corridor.size();
  if (plan.lateral_offsets.size() != n || plan.speeds.size() != n) return false;
  for (std::size_t k = 0; k < n; ++k) {
    const Station& s = corridor[k];
    const double y = plan.lateral_offsets[k];
    const double v = plan.speeds[k];
    if (y < s.y_min - tolerance || y > s.y_max + tolerance) return false;
    if (v < s.v_min - tolerance || v > s.v_max + tolerance) return false;
  }
  return true;
}

namespace {

double required_number(const nlohmann::json& obj, const char* key,
                       const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(fmt::format("{}: missing field \"{}\"", where, key));
  }
  if (!it->is_number()) {
    throw ParseError(
        fmt::format("{}: field \"{}\" must be a number", where, key));
  }
  return it->get<double>();
}

}  // namespace

RouteCorridor route_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("route: top level must be an object");
  std::string name;
  if (const auto it = doc.find("name"); it != doc.end()) {
    if (!it->is_string()) throw ParseError("route: field \"name\" must be a string");
    name = it->get<std::string>();
  }
  const auto sit = doc.find("stations");
  if (sit == doc.end()) throw ParseError("route: missing field \"stations\"");
  if (!sit->is_array()) {
    throw ParseError("route: field \"stations\" must be an array");
  }

  std::vector<Station> stations;
  std::vector<bool> has_axis;
  stations.reserve(sit->size());
  for (std::size_t k = 0; k < sit->size(); ++k) {
    const nlohmann::json& js = (*sit)[k];
    const std::string where = fmt::format("stations[{}]", k);
    if (!js.is_object()) throw ParseError(where + ": must be an object");
    Station s;
    s.center_x = required_number(js, "x", where);
    s.center_y = required_number(js, "y", where);
    s.y_min = required_number(js, "y_min", where);
    s.y_max = required_number(js, "y_max", where);
    s.v_min = required_number(js, "v_min", where);
    s.v_max = required_number(js, "v_max", where);
    const bool axis = js.contains("lateral_axis_angle") &&
                      !js["lateral_axis_angle"].is_null();
    if (axis) s.lateral_axis_angle = required_number(js, "lateral_axis_angle", where);
    has_axis.push_back(axis);
    stations.push_back(s);
  }

  if (std::find(has_axis.begin(), has_axis.end(), false) != has_axis.end()) {
    std::vector<Point2> centers;
    centers.reserve(stations.size());
    for (const Station& s : stations) centers.push_back({s.center_x, s.center_y});
    const std::vector<double> axes = lateral_axes_from_centers(centers);
    for (std::size_t k = 0; k < stations.size(); ++k) {
      if (!has_axis[k]) stations[k].lateral_axis_angle = axes[k];
    }
  }
  return RouteCorridor(std::move(name), std::move(stations));
}

nlohmann::json route_to_json(const RouteCorridor& corridor) {
  nlohmann::json stations = nlohmann::json::array();
  for (const Station& s : corridor.stations()) {
    stations.push_back({{"x", s.center_x},
                        {"y", s.center_y},
                        {"lateral_axis_angle", s.lateral_axis_angle},
                        {"y_min", s.y_min},
                        {"y_max", s.y_max},
                        {"v_min", s.v_min},
                        {"v_max", s.v_max}});
  }
  return {{"name", corridor.name()}, {"stations", std::move(stations)}};
}

RouteCorridor load_route(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open route file {}", path.string()));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
  return route_from_json(doc);
}

void save_route(const RouteCorridor& corridor,
                const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out << route_to_json(corridor).dump(2) << '\n';
}

}  // namespace smoothride
