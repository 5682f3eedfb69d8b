#include "smoothride/kinematics.hpp"

#include <fmt/core.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>

#include "csv.hpp"
#include "smoothride/error.hpp"
#include "smoothride/kernels.hpp"

namespace smoothride {

std::vector<double> MotionProfile::waypoint_times() const {
  std::vector<double> t(points.size(), 0.0);
  for (std::size_t k = 0; k < segment_time_steps.size(); ++k) {
    t[k + 1] = t[k] + segment_time_steps[k];
  }
  return t;
}

void MotionProfile::validate() const {
  const std::size_t n = points.size();
  if (n < 2) throw ValidationError("profile needs at least 2 waypoints");
  if (speeds.size() != n || segment_time_steps.size() != n - 1 ||
      ax.size() != n - 1 || ay.size() != n - 1) {
    throw DimensionError("profile: inconsistent series lengths");
  }
  for (std::size_t k = 0; k < segment_time_steps.size(); ++k) {
    if (!(segment_time_steps[k] > 0.0)) {
      throw ValidationError(fmt::format("profile: segment {} has dt <= 0", k), k);
    }
  }
}

std::vector<double> heading_changes(std::span<const Point2> points) {
  const std::size_t n = points.size();
  std::vector<double> out(n >= 3 ? n - 2 : 0);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const double ax = points[k + 1].x - points[k].x;
    const double ay = points[k + 1].y - points[k].y;
    const double bx = points[k + 2].x - points[k + 1].x;
    const double by = points[k + 2].y - points[k + 1].y;
    out[k] = std::atan2(ax * by - ay * bx, ax * bx + ay * by);
  }
  return out;
}

MotionProfile evaluate_motion(std::span<const Point2> points,
                              std::span<const double> speeds) {
  const std::size_t n = points.size();
  if (speeds.size() != n) {
    throw DimensionError(fmt::format("{} waypoints but {} speeds", n, speeds.size()));
  }
  if (n < 2) throw ValidationError("need at least 2 waypoints");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(speeds[k] > 0.0)) {
      throw DomainError(fmt::format("speed at waypoint {} is {} (must be > 0)", k,
                                    speeds[k]));
    }
  }

  std::vector<double> xs(n), ys(n);
  for (std::size_t k = 0; k < n; ++k) {
    xs[k] = points[k].x;
    ys[k] = points[k].y;
  }

  MotionProfile p;
  p.points.assign(points.begin(), points.end());
  p.speeds.assign(speeds.begin(), speeds.end());
  std::vector<double> dist(n - 1);
  p.segment_time_steps.resize(n - 1);
  p.ax.resize(n - 1);
  p.ay.assign(n - 1, 0.0);
  kernels::active().segments(xs.data(), ys.data(), speeds.data(), n, dist.data(),
                             p.segment_time_steps.data(), p.ax.data());
  for (std::size_t k = 0; k < n - 1; ++k) {
    if (!(dist[k] > 0.0)) {
      throw DegenerateSegmentError(
          fmt::format("waypoints {} and {} coincide", k, k + 1), k);
    }
  }

  const std::vector<double> turns = heading_changes(points);
  for (std::size_t k = 0; k < turns.size(); ++k) {
    const double mean_v = 0.5 * (speeds[k] + speeds[k + 1]);
    p.ay[k] = mean_v * mean_v * turns[k] / dist[k];
  }

  double total = 0.0;
  for (double dt : p.segment_time_steps) total += dt;
  p.total_time = total;
  return p;
}

MotionProfile evaluate_motion(const RouteCorridor& corridor,
                              const MotionPlan& plan) {
  const std::vector<Point2> pts = waypoints_to_cartesian(corridor, plan);
  return evaluate_motion(pts, plan.speeds);
}

UniformSeries resample_uniform(const MotionProfile& profile, double rate) {
  if (!(rate > 0.0)) throw DomainError("resample rate must be > 0");
  const std::size_t m = profile.segments();
  if (m == 0) throw ResolutionError("cannot resample an empty profile");

  const auto count = static_cast<std::size_t>(
      std::floor(profile.total_time * rate + 1e-9)) + 1;
  if (count < 8) {
    throw ResolutionError(fmt::format(
        "{} Hz over {} s gives {} samples (< 8)", rate, profile.total_time, count));
  }

  std::vector<double> mid(m);
  double t0 = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    mid[k] = t0 + 0.5 * profile.segment_time_steps[k];
    t0 += profile.segment_time_steps[k];
  }

  UniformSeries out;
  out.rate = rate;
  out.t.resize(count);
  out.ax.resize(count);
  out.ay.resize(count);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double t = static_cast<double>(i) / rate;
    out.t[i] = t;
    if (t <= mid.front()) {
      out.ax[i] = profile.ax.front();
      out.ay[i] = profile.ay.front();
      continue;
    }
    if (t >= mid.back()) {
      out.ax[i] = profile.ax.back();
      out.ay[i] = profile.ay.back();
      continue;
    }
    while (seg + 1 < m && mid[seg + 1] < t) ++seg;
    const double w = (t - mid[seg]) / (mid[seg + 1] - mid[seg]);
    out.ax[i] = profile.ax[seg] + w * (profile.ax[seg + 1] - profile.ax[seg]);
    out.ay[i] = profile.ay[seg] + w * (profile.ay[seg + 1] - profile.ay[seg]);
  }
  return out;
}

void write_profile_csv(const MotionProfile& profile,
                       const std::filesystem::path& path) {
  profile.validate();
  auto out = fmt::output_file(path.string());
  out.print("t,x,y,v,ax,ay\n");
  const std::vector<double> t = profile.waypoint_times();
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const bool has_seg = k < profile.segments();
    out.print("{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", t[k],
              profile.points[k].x, profile.points[k].y, profile.speeds[k],
              has_seg ? profile.ax[k] : 0.0, has_seg ? profile.ay[k] : 0.0);
  }
}

MotionProfile read_profile_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  const std::string file = path.string();
  const std::size_t ct = table.column("t", file);
  const std::size_t cx = table.column("x", file);
  const std::size_t cy = table.column("y", file);
  const std::size_t cv = table.column("v", file);
  const std::size_t cax = table.column("ax", file);
  const std::size_t cay = table.column("ay", file);
  const std::size_t n = table.rows.size();
  if (n < 2) throw ValidationError(file + ": profile needs at least 2 rows");

  MotionProfile p;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& r = table.rows[k];
    p.points.push_back({r[cx], r[cy]});
    p.speeds.push_back(r[cv]);
    if (k + 1 < n) {
      p.segment_time_steps.push_back(table.rows[k + 1][ct] - r[ct]);
      p.ax.push_back(r[cax]);
      p.ay.push_back(r[cay]);
    }
  }
  double total = 0.0;
  for (double dt : p.segment_time_steps) total += dt;
  p.total_time = total;
  p.validate();
  return p;
}

}  // namespace smoothride
