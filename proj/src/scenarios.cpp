#include "smoothride/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "smoothride/error.hpp"
#include "smoothride/planner.hpp"

namespace smoothride::scenarios {

namespace {

constexpr double kPi = std::numbers::pi;

RouteCorridor corridor_from_points(std::string name, const std::vector<Point2>& points,
                                   const std::vector<double>& half_width, double v_min,
                                   const std::vector<double>& v_max) {
  const std::vector<double> axes = lateral_axes_from_centers(points);
  std::vector<Station> stations(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    stations[k] = {points[k].x, points[k].y, axes[k], -half_width[k], half_width[k],
                   v_min, v_max[k]};
  }
  return RouteCorridor(std::move(name), std::move(stations));
}

}  // namespace

RouteCorridor straight_corridor(double length, std::size_t stations, double half_width,
                                double v_min, double v_max) {
  if (stations < 3) throw ValidationError("straight corridor needs >= 3 stations");
  std::vector<Point2> pts(stations);
  for (std::size_t k = 0; k < stations; ++k) {
    pts[k] = {length * static_cast<double>(k) / static_cast<double>(stations - 1), 0.0};
  }
  return corridor_from_points("straight", pts, std::vector<double>(stations, half_width),
                              v_min, std::vector<double>(stations, v_max));
}

RouteCorridor arc_corridor(double radius, std::size_t stations, double angle_step,
                           double half_width, double v_min, double v_max) {
  std::vector<Point2> pts(stations);
  for (std::size_t k = 0; k < stations; ++k) {
    const double a = angle_step * static_cast<double>(k);
    pts[k] = {radius * std::cos(a), radius * std::sin(a)};
  }
  return corridor_from_points("arc", pts, std::vector<double>(stations, half_width), v_min,
                              std::vector<double>(stations, v_max));
}

RouteCorridor toy_corner() {
  const double r = 10.0;
  const double c45 = r * std::numbers::sqrt2 / 2.0;
  const std::vector<Point2> pts{{0.0, 0.0}, {10.0, 0.0}, {10.0 + c45, 10.0 - c45},
                                {20.0, 10.0}, {20.0, 20.0}};
  const std::vector<double> axes = lateral_axes_from_centers(pts);
  std::vector<Station> stations(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const bool end = k == 0 || k + 1 == pts.size();
    const double w = end ? 0.0 : 1.5;
    stations[k] = {pts[k].x, pts[k].y, axes[k], -w, w, 3.0, 15.0};
  }
  return RouteCorridor("toy-corner", std::move(stations));
}

CenterlineBuilder::CenterlineBuilder(double x0, double y0, double heading, double spacing)
    : x_(x0), y_(y0), heading_(heading), spacing_(spacing) {
  if (!(spacing > RouteCorridor::kMinSpacing)) {
    throw ValidationError("centerline spacing must exceed the minimum station spacing");
  }
}

void CenterlineBuilder::push(double x, double y, double v_max, double half_width) {
  points_.push_back({x, y});
  v_max_.push_back(v_max);
  half_width_.push_back(half_width);
}

void CenterlineBuilder::piece(double length, double k0, double k1, double v_max,
                              double half_width) {
  if (points_.empty()) push(x_, y_, v_max, half_width);
  const auto steps = static_cast<int>(std::max(1.0, std::ceil(length / (spacing_ / 64.0))));
  const double h = length / steps;
  auto heading_at = [&](double u) { return heading_ + k0 * u + 0.5 * (k1 - k0) * u * u / length; };
  for (int i = 0; i < steps; ++i) {
    const double mid = heading_at((i + 0.5) * h);
    x_ += h * std::cos(mid);
    y_ += h * std::sin(mid);
    since_last_ += h;
    if (since_last_ >= spacing_ - 1e-9) {
      push(x_, y_, v_max, half_width);
      since_last_ = 0.0;
    }
  }
  heading_ = heading_at(length);
  curvature_ = k1;
  length_ += length;
}

CenterlineBuilder& CenterlineBuilder::straight(double length, double v_max, double half_width) {
  piece(length, 0.0, 0.0, v_max, half_width);
  return *this;
}

CenterlineBuilder& CenterlineBuilder::arc(double radius, double angle, double v_max,
                                          double half_width) {
  const double k = (angle >= 0.0 ? 1.0 : -1.0) / radius;
  piece(radius * std::abs(angle), k, k, v_max, half_width);
  return *this;
}

CenterlineBuilder& CenterlineBuilder::ramp(double length, double curvature_end, double v_max,
                                           double half_width) {
  piece(length, curvature_, curvature_end, v_max, half_width);
  return *this;
}

RouteCorridor CenterlineBuilder::build(std::string name, double v_min) const {
  return corridor_from_points(std::move(name), points_, half_width_, v_min, v_max_);
}

RouteCorridor roundabout_route() {
  constexpr double rural = 22.2;  // 80 km/h
  constexpr double town = 13.9;   // 50 km/h
  constexpr double zone = 16.67;  // 60 km/h
  const double deg = kPi / 180.0;
  // One roundabout: deflect right on entry, circulate left through
  // `circulate` radians, deflect right on exit.
  auto roundabout = [&](CenterlineBuilder& b, double circulate) {
    b.ramp(15.0, -1.0 / 30.0, town)
        .arc(30.0, -15.0 * deg, town)
        .ramp(20.0, 1.0 / 22.0, town, 1.0)
        .arc(22.0, circulate, town, 1.0)
        .ramp(20.0, -1.0 / 30.0, town, 1.0)
        .arc(30.0, -15.0 * deg, town)
        .ramp(15.0, 0.0, town);
  };
  CenterlineBuilder b(0.0, 0.0, 0.0);
  b.straight(180.0, rural).straight(30.0, town);
  roundabout(b, 95.0 * deg);
  b.straight(30.0, zone)
      .ramp(15.0, -1.0 / 25.0, zone)
      .arc(25.0, -55.0 * deg, zone)
      .ramp(15.0, 0.0, zone)
      .straight(40.0, zone)
      .ramp(15.0, 1.0 / 25.0, zone)
      .arc(25.0, 55.0 * deg, zone)
      .ramp(15.0, 0.0, zone)
      .straight(40.0, zone)
      .ramp(15.0, -1.0 / 25.0, zone)
      .arc(25.0, -55.0 * deg, zone)
      .ramp(15.0, 0.0, zone)
      .straight(30.0, town);
  roundabout(b, 40.0 * deg);
  b.straight(30.0, town).straight(90.0, rural);
  return b.build("synthetic-roundabout", 2.0);
}

namespace {

// Gaussian-weighted moving average over the arc-length coordinate.
std::vector<double> smooth_along(const std::vector<double>& values,
                                 const std::vector<double>& along, double sigma) {
  if (!(sigma > 0.0)) return values;
  const std::size_t n = values.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0, wsum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double u = (along[j] - along[k]) / sigma;
      if (std::abs(u) > 4.0) continue;
      const double w = std::exp(-0.5 * u * u);
      acc += w * values[j];
      wsum += w;
    }
    out[k] = acc / wsum;
  }
  return out;
}

std::vector<double> arc_length(const std::vector<Point2>& p) {
  std::vector<double> s(p.size(), 0.0);
  for (std::size_t k = 0; k + 1 < p.size(); ++k) {
    s[k + 1] = s[k] + std::hypot(p[k + 1].x - p[k].x, p[k + 1].y - p[k].y);
  }
  return s;
}

}  // namespace

MotionPlan human_like_plan(const RouteCorridor& corridor, const HumanStyle& style,
                           std::optional<double> target_time) {
  const std::size_t n = corridor.size();
  const std::vector<Point2> c = corridor.centers();
  const std::vector<double> along = arc_length(c);

  // Driven line: the lane center with a slow in-lane weave.
  MotionPlan plan;
  plan.lateral_offsets.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double weave =
        style.weave_amplitude * std::sin(2.0 * kPi * along[k] / style.weave_wavelength);
    plan.lateral_offsets[k] = std::clamp(weave, corridor[k].y_min, corridor[k].y_max);
  }

  const std::vector<Point2> p = waypoints_to_cartesian(
      corridor, {plan.lateral_offsets, std::vector<double>(n, 1.0)});
  const std::vector<double> s = arc_length(p);
  std::vector<double> d(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) d[k] = s[k + 1] - s[k];
  const std::vector<double> turns = heading_changes(p);
  std::vector<double> kappa(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    kappa[k] = std::abs(turns[k - 1]) / (0.5 * (d[k - 1] + d[k]));
  }
  kappa[0] = kappa[1];
  kappa[n - 1] = kappa[n - 2];

  std::vector<double> apex(n);
  for (std::size_t k = 0; k < n; ++k) {
    apex[k] = std::min(corridor[k].v_max,
                       std::sqrt(style.lateral_accel / std::max(kappa[k], kCurvatureFloor)));
  }
  // Late braking: the hardest admissible deceleration right before a bend.
  std::vector<double> brake = apex;
  for (std::size_t k = n - 1; k-- > 0;) {
    brake[k] = std::min(brake[k], std::sqrt(brake[k + 1] * brake[k + 1] + 2.0 * style.brake * d[k]));
  }
  // Early coast: a long lift-off down to a margin above the apex speed.
  std::vector<double> coast(n);
  for (std::size_t k = 0; k < n; ++k) {
    coast[k] = std::min(corridor[k].v_max, apex[k] + style.coast_margin);
  }
  for (std::size_t k = n - 1; k-- > 0;) {
    coast[k] = std::min(coast[k], std::sqrt(coast[k + 1] * coast[k + 1] + 2.0 * style.coast * d[k]));
  }
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = std::min(brake[k], coast[k]);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    v[k + 1] = std::min(v[k + 1], std::sqrt(v[k] * v[k] + 2.0 * style.accel * d[k]));
  }
  v = smooth_along(v, s, style.speed_smoothing);
  // Cruise hunting: a slow speed ripple where the road is nearly straight.
  std::vector<double> straightness(n);
  for (std::size_t k = 0; k < n; ++k) straightness[k] = kappa[k] < 0.01 ? 1.0 : 0.0;
  straightness = smooth_along(straightness, s, style.speed_smoothing);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] += straightness[k] * style.fluctuation * v[k] *
            std::sin(2.0 * kPi * s[k] / style.fluctuation_wavelength);
  }

  auto clip = [&](std::vector<double>& speeds) {
    for (std::size_t k = 0; k < n; ++k) {
      speeds[k] = std::clamp(speeds[k], std::max(corridor[k].v_min, kSpeedFloor), corridor[k].v_max);
    }
  };
  auto travel_time = [&](const std::vector<double>& speeds) {
    double t = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) t += 2.0 * d[k] / (speeds[k] + speeds[k + 1]);
    return t;
  };
  clip(v);
  if (target_time) {
    if (!(*target_time > 0.0)) throw ValidationError("human_like_plan: target time must be > 0");
    for (int it = 0; it < 100; ++it) {
      const double t = travel_time(v);
      if (std::abs(t - *target_time) <= 1e-9 * *target_time) break;
      const double scale = t / *target_time;
      for (double& x : v) x *= scale;
      clip(v);
    }
  }
  plan.speeds = v;
  return plan;
}

namespace {

// Smooth truth drive, closed form in t.
struct Drive {
  static double speed(double t) {
    return 11.0 + 2.5 * std::sin(2.0 * kPi * t / 40.0) + 0.8 * std::sin(2.0 * kPi * t / 13.0 + 1.0);
  }
  static double accel(double t) {
    return 2.5 * (2.0 * kPi / 40.0) * std::cos(2.0 * kPi * t / 40.0) +
           0.8 * (2.0 * kPi / 13.0) * std::cos(2.0 * kPi * t / 13.0 + 1.0);
  }
  static double yaw_rate(double t) {
    return 0.12 * std::sin(2.0 * kPi * t / 25.0) + 0.05 * std::sin(2.0 * kPi * t / 9.0 + 0.5);
  }
  static double heading(double t) {
    return 0.3 - 0.12 * 25.0 / (2.0 * kPi) * std::cos(2.0 * kPi * t / 25.0) -
           0.05 * 9.0 / (2.0 * kPi) * std::cos(2.0 * kPi * t / 9.0 + 0.5);
  }
};

}  // namespace

SyntheticLog synthetic_drive(const SyntheticLogSettings& st) {
  if (!(st.duration >= 5.0) || !(st.gps_rate > 0.0) || !(st.imu_rate > 0.0)) {
    throw ValidationError("synthetic drive: duration >= 5 s and positive rates required");
  }
  SyntheticLog out;
  TruthTrack& tr = out.truth;
  tr.Ts = 1.0 / st.gps_rate;
  const auto n = static_cast<std::size_t>(std::floor(st.duration * st.gps_rate + 1e-9)) + 1;
  double x = 12.0, y = -40.0;
  constexpr int sub = 40;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * tr.Ts;
    if (k > 0) {
      // Simpson integration of the velocity over the last GPS interval.
      const double t0 = t - tr.Ts;
      const double h = tr.Ts / sub;
      double sx = 0.0, sy = 0.0;
      for (int i = 0; i <= sub; ++i) {
        const double tt = t0 + h * i;
        const double w = (i == 0 || i == sub) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        sx += w * Drive::speed(tt) * std::cos(Drive::heading(tt));
        sy += w * Drive::speed(tt) * std::sin(Drive::heading(tt));
      }
      x += sx * h / 3.0;
      y += sy * h / 3.0;
    }
    tr.t.push_back(t);
    tr.x.push_back(x);
    tr.y.push_back(y);
    tr.heading.push_back(Drive::heading(t));
    tr.speed.push_back(Drive::speed(t));
    tr.ax.push_back(Drive::accel(t));
    tr.ay.push_back(Drive::speed(t) * Drive::yaw_rate(t));
  }

  std::mt19937_64 rng(st.seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  SensorLog& log = out.log;
  for (std::size_t k = 0; k < n; ++k) {
    const bool lost = st.outage && st.outage->contains(tr.t[k]);
    const double nx = st.gps_sigma * unit(rng);
    const double ny = st.gps_sigma * unit(rng);
    log.gps.push_back({tr.t[k], tr.x[k] + nx, tr.y[k] + ny, !lost});
  }
  const auto m = static_cast<std::size_t>(std::floor(st.duration * st.imu_rate + 1e-9)) + 1;
  for (std::size_t i = 0; i < m; ++i) {
    const double stamp = static_cast<double>(i) / st.imu_rate;
    const double t = stamp - st.imu_lag;
    const double nax = st.imu_sigma * unit(rng);
    const double nay = st.imu_sigma * unit(rng);
    log.imu.push_back({stamp, Drive::accel(t) + nax, Drive::speed(t) * Drive::yaw_rate(t) + nay});
  }
  if (st.outage) log.outage_windows.push_back(*st.outage);
  log.validate();
  return out;
}

ReconstructionVariables drive_variables(double duration, double Ts) {
  const auto n = static_cast<std::size_t>(std::floor(duration / Ts + 1e-9)) + 1;
  ReconstructionVariables v;
  v.x0 = 12.0;
  v.y0 = -40.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * Ts;
    v.headings.push_back(Drive::heading(t));
    v.speeds.push_back(Drive::speed(t));
  }
  return v;
}

ReconstructionVariables loop_variables(double radius, double speed, double turns, double Ts) {
  const double rate = speed / radius;
  const auto n = static_cast<std::size_t>(std::ceil(turns * 2.0 * kPi / (rate * Ts))) + 1;
  ReconstructionVariables v;
  v.x0 = radius;
  v.y0 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    v.headings.push_back(kPi / 2.0 + rate * Ts * static_cast<double>(k));
    v.speeds.push_back(speed);
  }
  return v;
}

SensorLog exact_model_log(const ReconstructionVariables& vars, double Ts) {
  const PredictedMotion pm = predict_motion(vars, Ts);
  const std::size_t n = vars.size();
  SensorLog log;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * Ts;
    log.gps.push_back({t, pm.positions[k].x, pm.positions[k].y, true});
    const std::size_t j = std::min(k, n - 2);
    log.imu.push_back({t, pm.ax[j], pm.ay[j]});
  }
  log.sample_time = Ts;
  return log;
}

MotionProfile signal_profile(const std::vector<double>& ax, const std::vector<double>& ay,
                             double dt) {
  if (ax.size() != ay.size() || ax.empty()) {
    throw DimensionError("signal_profile: ax and ay must have the same non-zero length");
  }
  const std::size_t segs = ax.size();
  constexpr double speed = 10.0;
  MotionProfile p;
  for (std::size_t k = 0; k <= segs; ++k) {
    p.points.push_back({speed * dt * static_cast<double>(k), 0.0});
    p.speeds.push_back(speed);
  }
  p.segment_time_steps.assign(segs, dt);
  p.ax = ax;
  p.ay = ay;
  p.total_time = dt * static_cast<double>(segs);
  return p;
}

}  // namespace smoothride::scenarios
