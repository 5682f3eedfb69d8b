#include "smoothride/objectives.hpp"

#include <fmt/core.h>

#include <cmath>

#include "smoothride/error.hpp"
#include "smoothride/kernels.hpp"

namespace smoothride {

std::string_view variant_name(ObjectiveVariant v) {
  return v == ObjectiveVariant::ma ? "ma" : "ms";
}

ObjectiveVariant parse_variant(std::string_view name) {
  if (name == "ma" || name == "MA") return ObjectiveVariant::ma;
  if (name == "ms" || name == "MS") return ObjectiveVariant::ms;
  throw ValidationError(fmt::format("unknown objective \"{}\" (expected ma or ms)", name));
}

void ObjectiveConfig::validate() const {
  if (!(time_weight >= 0.0) || !std::isfinite(time_weight)) {
    throw ValidationError(fmt::format("time weight must be >= 0, got {}", time_weight));
  }
  if (cooldown < 0.0) throw ValidationError("cooldown must be >= 0");
  if (variant == ObjectiveVariant::ms) filter.validate();
}

double comfort_ma(const MotionProfile& profile) {
  return kernels::acceleration_energy(profile.ax, profile.ay,
                                      profile.segment_time_steps);
}

double comfort_ms(const MotionProfile& profile, const SicknessFilter& filter,
                  double cooldown) {
  const FilteredSeries fx =
      filter_sequence(filter, profile.ax, profile.segment_time_steps, cooldown);
  const FilteredSeries fy =
      filter_sequence(filter, profile.ay, profile.segment_time_steps, cooldown);
  return kernels::acceleration_energy(fx.output, fy.output, fx.time_steps) +
         kernels::acceleration_energy(fx.tail_output, fy.tail_output, fx.tail_steps);
}

double comfort_ms(const MotionProfile& profile, const FilterSpec& filter,
                  double cooldown) {
  return comfort_ms(profile, SicknessFilter(filter), cooldown);
}

double comfort_term(const MotionProfile& profile, const ObjectiveConfig& config) {
  return config.variant == ObjectiveVariant::ma
             ? comfort_ma(profile)
             : comfort_ms(profile, config.filter, config.cooldown);
}

double planner_cost(const MotionProfile& profile, const ObjectiveConfig& config) {
  config.validate();
  return comfort_term(profile, config) + config.time_weight * profile.total_time;
}

namespace {

// Filters two channels that share time steps and accumulates the adjoints of
// the filtered energy with respect to both input series and the steps.
double filtered_energy_adjoint(const SicknessFilter& filter,
                               std::span<const double> u0,
                               std::span<const double> u1,
                               std::span<const double> dt, double cooldown,
                               std::span<double> g_u0, std::span<double> g_u1,
                               std::span<double> g_dt) {
  using Eigen::Matrix2d;
  using Eigen::Vector2d;
  const std::size_t m = dt.size();
  const Eigen::RowVector2d C = filter.continuous().C;
  const Vector2d Ct = C.transpose();

  std::vector<DiscreteModel> models(m), derivs(m);
  for (std::size_t k = 0; k < m; ++k) {
    models[k] = filter.discretize(dt[k]);
    derivs[k] = filter.discretize_derivative(dt[k]);
  }

  std::vector<Vector2d> x0(m + 1), x1(m + 1);
  x0[0].setZero();
  x1[0].setZero();
  double energy = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const double o0 = C * x0[k];
    const double o1 = C * x1[k];
    energy += (o0 * o0 + o1 * o1) * dt[k];
    x0[k + 1] = models[k].Ad * x0[k] + models[k].Bd * u0[k];
    x1[k + 1] = models[k].Ad * x1[k] + models[k].Bd * u1[k];
  }

  const TailLayout tail = tail_layout(dt, cooldown);
  Vector2d lam0 = Vector2d::Zero();
  Vector2d lam1 = Vector2d::Zero();
  if (tail.count > 0) {
    const DiscreteModel tm = filter.discretize(tail.dt);
    const DiscreteModel td = filter.discretize_derivative(tail.dt);
    std::vector<Vector2d> t0(tail.count), t1(tail.count);
    t0[0] = x0[m];
    t1[0] = x1[m];
    for (std::size_t j = 0; j + 1 < tail.count; ++j) {
      t0[j + 1] = tm.Ad * t0[j];
      t1[j + 1] = tm.Ad * t1[j];
    }
    double g_tail_dt = 0.0;
    for (std::size_t jj = tail.count; jj-- > 0;) {
      const double o0 = C * t0[jj];
      const double o1 = C * t1[jj];
      energy += (o0 * o0 + o1 * o1) * tail.dt;
      g_tail_dt += o0 * o0 + o1 * o1;
      g_tail_dt += lam0.dot(td.Ad * t0[jj]) + lam1.dot(td.Ad * t1[jj]);
      lam0 = 2.0 * o0 * tail.dt * Ct + tm.Ad.transpose() * lam0;
      lam1 = 2.0 * o1 * tail.dt * Ct + tm.Ad.transpose() * lam1;
    }
    const double share = g_tail_dt / static_cast<double>(m);
    for (std::size_t k = 0; k < m; ++k) g_dt[k] += share;
  }

  for (std::size_t k = m; k-- > 0;) {
    const double o0 = C * x0[k];
    const double o1 = C * x1[k];
    g_u0[k] += lam0.dot(models[k].Bd);
    g_u1[k] += lam1.dot(models[k].Bd);
    g_dt[k] += o0 * o0 + o1 * o1 +
               lam0.dot(derivs[k].Ad * x0[k] + derivs[k].Bd * u0[k]) +
               lam1.dot(derivs[k].Ad * x1[k] + derivs[k].Bd * u1[k]);
    lam0 = 2.0 * o0 * dt[k] * Ct + models[k].Ad.transpose() * lam0;
    lam1 = 2.0 * o1 * dt[k] * Ct + models[k].Ad.transpose() * lam1;
  }
  return energy;
}

}  // namespace

PlanObjective::PlanObjective(const RouteCorridor& corridor, ObjectiveConfig config)
    : corridor_(corridor),
      config_(config),
      filter_(config.variant == ObjectiveVariant::ms ? config.filter
                                                     : FilterSpec::defaults()) {
  config_.validate();
  for (const Station& s : corridor_.stations()) {
    cos_axis_.push_back(std::cos(s.lateral_axis_angle));
    sin_axis_.push_back(std::sin(s.lateral_axis_angle));
  }
}

std::vector<double> PlanObjective::pack(const MotionPlan& plan) {
  std::vector<double> x(plan.lateral_offsets);
  x.insert(x.end(), plan.speeds.begin(), plan.speeds.end());
  return x;
}

MotionPlan PlanObjective::unpack(std::span<const double> x) const {
  const std::size_t n = corridor_.size();
  if (x.size() != 2 * n) throw DimensionError("decision vector has wrong length");
  MotionPlan plan;
  plan.lateral_offsets.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  plan.speeds.assign(x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  return plan;
}

PlanObjective::Terms PlanObjective::evaluate(std::span<const double> x) const {
  const MotionProfile profile = evaluate_motion(corridor_, unpack(x));
  Terms t;
  t.comfort = config_.variant == ObjectiveVariant::ma
                  ? comfort_ma(profile)
                  : comfort_ms(profile, filter_, config_.cooldown);
  t.travel_time = profile.total_time;
  t.cost = t.comfort + config_.time_weight * t.travel_time;
  return t;
}

PlanObjective::Terms PlanObjective::evaluate(std::span<const double> x,
                                             std::span<double> grad) const {
  const std::size_t n = corridor_.size();
  const std::size_t m = n - 1;
  if (grad.size() != 2 * n) throw DimensionError("gradient buffer has wrong length");
  const MotionPlan plan = unpack(x);
  const std::vector<Point2> pts = waypoints_to_cartesian(corridor_, plan);
  const MotionProfile profile = evaluate_motion(pts, plan.speeds);
  const std::span<const double> v = plan.speeds;

  std::vector<double> g_ax(m, 0.0), g_ay(m, 0.0), g_dt(m, config_.time_weight);
  Terms t;
  t.travel_time = profile.total_time;
  if (config_.variant == ObjectiveVariant::ma) {
    t.comfort = comfort_ma(profile);
    for (std::size_t k = 0; k < m; ++k) {
      g_ax[k] = 2.0 * profile.ax[k] * profile.segment_time_steps[k];
      g_ay[k] = 2.0 * profile.ay[k] * profile.segment_time_steps[k];
      g_dt[k] += profile.ax[k] * profile.ax[k] + profile.ay[k] * profile.ay[k];
    }
  } else {
    t.comfort = filtered_energy_adjoint(filter_, profile.ax, profile.ay,
                                        profile.segment_time_steps,
                                        config_.cooldown, g_ax, g_ay, g_dt);
  }
  t.cost = t.comfort + config_.time_weight * t.travel_time;

  // Segment geometry.
  std::vector<double> ex(m), ey(m), d(m);
  for (std::size_t k = 0; k < m; ++k) {
    ex[k] = pts[k + 1].x - pts[k].x;
    ey[k] = pts[k + 1].y - pts[k].y;
    d[k] = std::sqrt(ex[k] * ex[k] + ey[k] * ey[k]);
  }

  std::vector<double> g_v(n, 0.0), g_d(m, 0.0), g_ex(m, 0.0), g_ey(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    const double sigma = v[k] + v[k + 1];
    double g_sigma = 0.0;

    // ax_k = (v_{k+1}^2 - v_k^2) / (2 d_k)
    g_v[k + 1] += g_ax[k] * v[k + 1] / d[k];
    g_v[k] -= g_ax[k] * v[k] / d[k];
    g_d[k] -= g_ax[k] * profile.ax[k] / d[k];

    // dt_k = 2 d_k / sigma_k
    g_d[k] += g_dt[k] * 2.0 / sigma;
    g_sigma -= g_dt[k] * profile.segment_time_steps[k] / sigma;

    // ay_k = (sigma/2)^2 * dpsi_k / d_k, only for k < m - 1
    if (k + 1 < m) {
      const double cr = ex[k] * ey[k + 1] - ey[k] * ex[k + 1];
      const double dt = ex[k] * ex[k + 1] + ey[k] * ey[k + 1];
      const double dpsi = std::atan2(cr, dt);
      g_sigma += g_ay[k] * 0.5 * sigma * dpsi / d[k];
      g_d[k] -= g_ay[k] * profile.ay[k] / d[k];
      const double g_psi = g_ay[k] * 0.25 * sigma * sigma / d[k];
      const double r2 = cr * cr + dt * dt;
      const double g_cr = g_psi * dt / r2;
      const double g_dot = -g_psi * cr / r2;
      g_ex[k] += g_cr * ey[k + 1] + g_dot * ex[k + 1];
      g_ey[k] += -g_cr * ex[k + 1] + g_dot * ey[k + 1];
      g_ex[k + 1] += -g_cr * ey[k] + g_dot * ex[k];
      g_ey[k + 1] += g_cr * ex[k] + g_dot * ey[k];
    }

    g_v[k] += g_sigma;
    g_v[k + 1] += g_sigma;
  }

  for (std::size_t k = 0; k < m; ++k) {
    g_ex[k] += g_d[k] * ex[k] / d[k];
    g_ey[k] += g_d[k] * ey[k] / d[k];
  }

  for (std::size_t k = 0; k < n; ++k) {
    double gpx = 0.0, gpy = 0.0;
    if (k < m) {
      gpx -= g_ex[k];
      gpy -= g_ey[k];
    }
    if (k > 0) {
      gpx += g_ex[k - 1];
      gpy += g_ey[k - 1];
    }
    grad[k] = gpx * cos_axis_[k] + gpy * sin_axis_[k];
    grad[n + k] = g_v[k];
  }
  return t;
}

}  // namespace smoothride
