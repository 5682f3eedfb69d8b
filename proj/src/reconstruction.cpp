#include "smoothride/reconstruction.hpp"

#include <fmt/core.h>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "local_fit.hpp"
#include "smoothride/error.hpp"
#include "smoothride/kernels.hpp"
#include "smoothride/objectives.hpp"

namespace smoothride {

void WeightSchedule::validate() const {
  if (!(w1_normal >= 0.0) || !(w2_normal >= 0.0) || !(w1_outage >= 0.0) ||
      !(w2_outage >= 0.0)) {
    throw ValidationError("weight schedule: all weights must be >= 0");
  }
}

nlohmann::json weight_schedule_to_json(const WeightSchedule& w) {
  return {{"w1_normal", w.w1_normal},
          {"w2_normal", w.w2_normal},
          {"w1_outage", w.w1_outage},
          {"w2_outage", w.w2_outage}};
}

WeightSchedule weight_schedule_from_json(const nlohmann::json& doc) {
  WeightSchedule w;
  if (doc.is_null()) return w;
  if (!doc.is_object()) throw ParseError("weights must be an object");
  try {
    w.w1_normal = doc.value("w1_normal", w.w1_normal);
    w.w2_normal = doc.value("w2_normal", w.w2_normal);
    w.w1_outage = doc.value("w1_outage", w.w1_outage);
    w.w2_outage = doc.value("w2_outage", w.w2_outage);
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(fmt::format("weights: {}", e.what()));
  }
  w.validate();
  return w;
}

nlohmann::json reconstruction_settings_to_json(const ReconstructionSettings& s) {
  return {{"heading_smoothness", s.heading_smoothness},
          {"max_iterations", s.max_iterations},
          {"relative_tolerance", s.relative_tolerance},
          {"initial_fit_window_s", s.initial_fit_window}};
}

PredictedMotion predict_motion(const ReconstructionVariables& vars, double Ts) {
  const std::size_t n = vars.size();
  if (n < 2 || vars.headings.size() != n) {
    throw DimensionError("predict_motion: need >= 2 samples with matching headings");
  }
  const double fs = 1.0 / Ts;
  PredictedMotion out;
  out.positions.resize(n);
  out.ax.resize(n - 1);
  out.ay.resize(n - 1);
  out.positions[0] = {vars.x0, vars.y0};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double step = vars.speeds[k] * Ts;
    out.positions[k + 1] = {out.positions[k].x + step * std::cos(vars.headings[k]),
                            out.positions[k].y + step * std::sin(vars.headings[k])};
    out.ax[k] = (vars.speeds[k + 1] - vars.speeds[k]) * fs;
    out.ay[k] = vars.speeds[k] * (vars.headings[k + 1] - vars.headings[k]) * fs;
  }
  return out;
}

ReconstructionGrid prepare_grid(const SensorLog& log, const WeightSchedule& schedule) {
  log.validate();
  schedule.validate();
  ReconstructionGrid grid;
  grid.Ts = log.grid_period();
  if (!(grid.Ts > 0.0)) throw ValidationError("sensor log: cannot determine sample time");
  const double t0 = log.gps.front().t;
  const double t1 = log.gps.back().t;
  const auto n = static_cast<std::size_t>(std::floor((t1 - t0) / grid.Ts + 1e-6)) + 1;

  grid.t.resize(n);
  grid.gps_x.assign(n, 0.0);
  grid.gps_y.assign(n, 0.0);
  grid.imu_ax.resize(n);
  grid.imu_ay.resize(n);
  grid.w_position.resize(n);
  grid.w_acceleration.resize(n);

  const std::vector<GpsSample>& gps = log.gps;
  std::size_t g = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * grid.Ts;
    grid.t[k] = t;
    while (g + 1 < gps.size() && gps[g + 1].t <= t + 1e-9 * grid.Ts) ++g;
    bool valid;
    if (std::abs(gps[g].t - t) <= 1e-6 * grid.Ts || g + 1 == gps.size()) {
      valid = gps[g].valid;
      grid.gps_x[k] = gps[g].x;
      grid.gps_y[k] = gps[g].y;
    } else {
      const double w = (t - gps[g].t) / (gps[g + 1].t - gps[g].t);
      valid = gps[g].valid && gps[g + 1].valid;
      grid.gps_x[k] = gps[g].x + w * (gps[g + 1].x - gps[g].x);
      grid.gps_y[k] = gps[g].y + w * (gps[g + 1].y - gps[g].y);
    }
    const bool outage = log.in_outage(t);
    double w1 = outage ? schedule.w1_outage : schedule.w1_normal;
    if (!valid) w1 = 0.0;
    grid.w_position[k] = w1;
    grid.w_acceleration[k] = outage ? schedule.w2_outage : schedule.w2_normal;
    if (w1 == 0.0) {
      grid.gps_x[k] = 0.0;
      grid.gps_y[k] = 0.0;
    }
  }

  // IMU: mean of the samples inside [t - Ts/2, t + Ts/2); linear
  // interpolation when the IMU is sparser than the grid.
  const std::vector<ImuSample>& imu = log.imu;
  std::vector<double> px(imu.size() + 1, 0.0), py(imu.size() + 1, 0.0);
  for (std::size_t i = 0; i < imu.size(); ++i) {
    px[i + 1] = px[i] + imu[i].ax;
    py[i + 1] = py[i] + imu[i].ay;
  }
  auto lower = [&](double t) {
    return static_cast<std::size_t>(
        std::lower_bound(imu.begin(), imu.end(), t,
                         [](const ImuSample& s, double v) { return s.t < v; }) -
        imu.begin());
  };
  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.t[k];
    const double half = 0.5 * grid.Ts;
    const std::size_t a = lower(t - half - 1e-9 * grid.Ts);
    const std::size_t b = lower(t + half - 1e-9 * grid.Ts);
    if (b > a) {
      const double cnt = static_cast<double>(b - a);
      grid.imu_ax[k] = (px[b] - px[a]) / cnt;
      grid.imu_ay[k] = (py[b] - py[a]) / cnt;
      continue;
    }
    const std::size_t i = lower(t);
    if (i == 0) {
      grid.imu_ax[k] = imu.front().ax;
      grid.imu_ay[k] = imu.front().ay;
    } else if (i == imu.size()) {
      grid.imu_ax[k] = imu.back().ax;
      grid.imu_ay[k] = imu.back().ay;
    } else {
      const double w = (t - imu[i - 1].t) / (imu[i].t - imu[i - 1].t);
      grid.imu_ax[k] = imu[i - 1].ax + w * (imu[i].ax - imu[i - 1].ax);
      grid.imu_ay[k] = imu[i - 1].ay + w * (imu[i].ay - imu[i - 1].ay);
    }
  }
  return grid;
}

CostBreakdown reconstruction_cost(const ReconstructionVariables& vars,
                                  const ReconstructionGrid& grid,
                                  double heading_smoothness) {
  const std::size_t n = grid.size();
  if (vars.size() != n || vars.headings.size() != n) {
    throw DimensionError(fmt::format("reconstruction variables have {} samples, grid {}",
                                     vars.size(), n));
  }
  const PredictedMotion pm = predict_motion(vars, grid.Ts);
  std::vector<double> ex(n), ey(n), eax(n - 1), eay(n - 1);
  std::vector<double> used_p(n), used_a(n - 1);
  for (std::size_t k = 0; k < n; ++k) {
    ex[k] = grid.gps_x[k] - pm.positions[k].x;
    ey[k] = grid.gps_y[k] - pm.positions[k].y;
    used_p[k] = grid.w_position[k] > 0.0 ? 1.0 : 0.0;
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    eax[k] = grid.imu_ax[k] - pm.ax[k];
    eay[k] = grid.imu_ay[k] - pm.ay[k];
    used_a[k] = grid.w_acceleration[k] > 0.0 ? 1.0 : 0.0;
  }
  const std::span<const double> w2(grid.w_acceleration.data(), n - 1);

  CostBreakdown c;
  c.gps_term = kernels::weighted_squares(ex, ey, grid.w_position);
  c.imu_term = kernels::weighted_squares(eax, eay, w2);
  c.j_gps = kernels::weighted_squares(ex, ey, used_p);
  c.j_imu = kernels::weighted_squares(eax, eay, used_a);
  double reg = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double d = vars.headings[k + 1] - vars.headings[k];
    reg += d * d;
  }
  c.regularization_term = heading_smoothness * reg;
  return c;
}

CostBreakdown reconstruction_cost(const ReconstructionVariables& vars,
                                  const SensorLog& log, const WeightSchedule& schedule,
                                  double heading_smoothness) {
  return reconstruction_cost(vars, prepare_grid(log, schedule), heading_smoothness);
}

ReconstructionVariables initial_variables(const ReconstructionGrid& grid,
                                          double fit_window) {
  const std::size_t n = grid.size();
  std::vector<std::size_t> usable;
  for (std::size_t k = 0; k < n; ++k) {
    if (grid.w_position[k] > 0.0) usable.push_back(k);
  }
  if (usable.size() < 2) throw ValidationError("reconstruction: fewer than 2 usable GPS samples");

  std::vector<double> x(n), y(n);
  std::size_t u = 0;
  for (std::size_t k = 0; k < n; ++k) {
    while (u + 1 < usable.size() && usable[u + 1] <= k) ++u;
    const std::size_t a = usable[u];
    if (k <= a || u + 1 == usable.size()) {
      x[k] = grid.gps_x[a];
      y[k] = grid.gps_y[a];
      continue;
    }
    const std::size_t b = usable[u + 1];
    const double w = static_cast<double>(k - a) / static_cast<double>(b - a);
    x[k] = grid.gps_x[a] + w * (grid.gps_x[b] - grid.gps_x[a]);
    y[k] = grid.gps_y[a] + w * (grid.gps_y[b] - grid.gps_y[a]);
  }
  if (usable.front() > 0) {
    for (std::size_t k = 0; k < usable.front(); ++k) {
      x[k] = grid.gps_x[usable.front()];
      y[k] = grid.gps_y[usable.front()];
    }
  }

  const auto h = static_cast<std::size_t>(std::lround(fit_window / grid.Ts));
  if (h >= 1) {
    std::vector<double> sx(n), sy(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t lo = k >= h ? k - h : 0;
      const std::size_t hi = std::min(n - 1, k + h);
      const auto fx = detail::fit_quadratic(grid.t, x, lo, hi, grid.t[k]);
      const auto fy = detail::fit_quadratic(grid.t, y, lo, hi, grid.t[k]);
      sx[k] = fx ? fx->value : x[k];
      sy[k] = fy ? fy->value : y[k];
    }
    x.swap(sx);
    y.swap(sy);
  }

  ReconstructionVariables vars;
  vars.x0 = x[0];
  vars.y0 = y[0];
  vars.headings.resize(n);
  vars.speeds.resize(n);
  double prev = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double dx = x[k + 1] - x[k];
    const double dy = y[k + 1] - y[k];
    double psi = std::atan2(dy, dx);
    if (k > 0) {
      psi = prev + std::remainder(psi - prev, 2.0 * std::numbers::pi);
    }
    vars.headings[k] = psi;
    vars.speeds[k] = std::hypot(dx, dy) / grid.Ts;
    prev = psi;
  }
  vars.headings[n - 1] = vars.headings[n - 2];
  vars.speeds[n - 1] = vars.speeds[n - 2];
  return vars;
}

namespace {

Eigen::VectorXd pack(const ReconstructionVariables& v) {
  const std::size_t n = v.size();
  Eigen::VectorXd z(2 * n + 2);
  z(0) = v.x0;
  z(1) = v.y0;
  for (std::size_t k = 0; k < n; ++k) {
    z(static_cast<Eigen::Index>(2 + k)) = v.headings[k];
    z(static_cast<Eigen::Index>(2 + n + k)) = v.speeds[k];
  }
  return z;
}

ReconstructionVariables unpack(const Eigen::VectorXd& z, std::size_t n) {
  ReconstructionVariables v;
  v.x0 = z(0);
  v.y0 = z(1);
  v.headings.resize(n);
  v.speeds.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    v.headings[k] = z(static_cast<Eigen::Index>(2 + k));
    v.speeds[k] = z(static_cast<Eigen::Index>(2 + n + k));
  }
  return v;
}

// Gauss-Newton matrix J^T W J and gradient J^T W r of the half objective.
void normal_equations(const ReconstructionVariables& vars, const ReconstructionGrid& grid,
                      double smoothness, Eigen::MatrixXd& H, Eigen::VectorXd& g) {
  const std::size_t n = grid.size();
  const double Ts = grid.Ts;
  const double fs = 1.0 / Ts;
  const auto dim = static_cast<Eigen::Index>(2 * n + 2);
  const auto P = [](std::size_t k) { return static_cast<Eigen::Index>(2 + k); };
  const auto V = [n](std::size_t k) { return static_cast<Eigen::Index>(2 + n + k); };

  H.resize(dim, dim);
  g.setZero(dim);
  const PredictedMotion pm = predict_motion(vars, Ts);

  std::vector<double> c(n), s(n);
  for (std::size_t k = 0; k < n; ++k) {
    c[k] = std::cos(vars.headings[k]);
    s[k] = std::sin(vars.headings[k]);
  }

  // Suffix sums: W[j] = sum_{k >= j} w1_k, R[j] = sum_{k >= j} w1_k r_k.
  std::vector<double> W(n + 1, 0.0), Rx(n + 1, 0.0), Ry(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const double w = grid.w_position[k];
    W[k] = W[k + 1] + w;
    Rx[k] = Rx[k + 1] + w * (pm.positions[k].x - grid.gps_x[k]);
    Ry[k] = Ry[k + 1] + w * (pm.positions[k].y - grid.gps_y[k]);
  }

  // Position block: entry (i, j) carries Ts^2 * W[max(i, j) + 1].
  const kernels::KernelTable& kt = kernels::active();
  std::vector<double> coef(n);
  const double ts2 = Ts * Ts;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) coef[j] = ts2 * W[std::max(i, j) + 1];
    double* col_psi = H.col(P(i)).data();
    double* col_v = H.col(V(i)).data();
    kt.gram_column(c[i], s[i], vars.speeds[i], c.data(), s.data(), vars.speeds.data(),
                   coef.data(), n, col_psi + P(0), col_psi + V(0), col_v + P(0),
                   col_v + V(0));
  }
  H(0, 0) = W[0];
  H(1, 1) = W[0];
  H(0, 1) = H(1, 0) = 0.0;
  g(0) = Rx[0];
  g(1) = Ry[0];
  for (std::size_t j = 0; j < n; ++j) {
    const double w = Ts * W[j + 1];
    const double v = vars.speeds[j];
    H(0, P(j)) = H(P(j), 0) = -w * v * s[j];
    H(1, P(j)) = H(P(j), 1) = w * v * c[j];
    H(0, V(j)) = H(V(j), 0) = w * c[j];
    H(1, V(j)) = H(V(j), 1) = w * s[j];
    g(P(j)) += Ts * v * (-s[j] * Rx[j + 1] + c[j] * Ry[j + 1]);
    g(V(j)) += Ts * (c[j] * Rx[j + 1] + s[j] * Ry[j + 1]);
  }

  // Acceleration residuals are banded.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double w = grid.w_acceleration[k];
    if (w != 0.0) {
      const double eax = pm.ax[k] - grid.imu_ax[k];
      g(V(k + 1)) += w * eax * fs;
      g(V(k)) -= w * eax * fs;
      const double wf2 = w * fs * fs;
      H(V(k), V(k)) += wf2;
      H(V(k + 1), V(k + 1)) += wf2;
      H(V(k), V(k + 1)) -= wf2;
      H(V(k + 1), V(k)) -= wf2;

      const double dpsi = vars.headings[k + 1] - vars.headings[k];
      const double eay = pm.ay[k] - grid.imu_ay[k];
      const Eigen::Index idx[3] = {V(k), P(k + 1), P(k)};
      const double jac[3] = {dpsi * fs, vars.speeds[k] * fs, -vars.speeds[k] * fs};
      for (int a = 0; a < 3; ++a) {
        g(idx[a]) += w * eay * jac[a];
        for (int b = 0; b < 3; ++b) H(idx[a], idx[b]) += w * jac[a] * jac[b];
      }
    }
    if (smoothness != 0.0) {
      const double r = vars.headings[k + 1] - vars.headings[k];
      g(P(k + 1)) += smoothness * r;
      g(P(k)) -= smoothness * r;
      H(P(k), P(k)) += smoothness;
      H(P(k + 1), P(k + 1)) += smoothness;
      H(P(k), P(k + 1)) -= smoothness;
      H(P(k + 1), P(k)) -= smoothness;
    }
  }
}

}  // namespace

double raw_imu_energy(const SensorLog& log, double t_begin, double t_end) {
  double energy = 0.0;
  for (std::size_t i = 0; i + 1 < log.imu.size(); ++i) {
    const ImuSample& a = log.imu[i];
    if (a.t < t_begin || a.t >= t_end) continue;
    const double dt = std::min(log.imu[i + 1].t, t_end) - a.t;
    energy += (a.ax * a.ax + a.ay * a.ay) * dt;
  }
  return energy;
}

ReconstructionResult reconstruct(const SensorLog& log, const WeightSchedule& schedule,
                                 const ReconstructionSettings& settings) {
  ReconstructionResult out;
  out.grid = prepare_grid(log, schedule);
  const ReconstructionGrid& grid = out.grid;
  const std::size_t n = grid.size();
  if (grid.t.back() - grid.t.front() < 5.0) {
    throw ValidationError("reconstruction needs at least 5 s of data");
  }

  ReconstructionVariables vars = initial_variables(grid, settings.initial_fit_window);
  const double smooth = settings.heading_smoothness;
  out.initial_cost = reconstruction_cost(vars, grid, smooth);
  double cost = out.initial_cost.objective();

  Eigen::MatrixXd H, A;
  Eigen::VectorXd g;
  double mu = 1e-4;
  double nu = 2.0;
  int iter = 0;
  bool converged = false;
  for (; iter < settings.max_iterations && !converged; ++iter) {
    normal_equations(vars, grid, smooth, H, g);
    if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, cost)) {
      converged = true;
      break;
    }
    const Eigen::VectorXd diag = H.diagonal().cwiseMax(1e-9);
    bool accepted = false;
    while (!accepted) {
      A = H;
      A.diagonal() += mu * diag;
      const Eigen::LLT<Eigen::MatrixXd> llt(A);
      if (llt.info() != Eigen::Success) {
        mu *= nu;
        nu *= 2.0;
        if (mu > 1e16) break;
        continue;
      }
      const Eigen::VectorXd step = -llt.solve(g);
      const double predicted = -(2.0 * g.dot(step) + step.dot(H * step));
      const ReconstructionVariables trial =
          unpack(pack(vars) + step, n);
      const double trial_cost = reconstruction_cost(trial, grid, smooth).objective();
      if (std::isfinite(trial_cost) && trial_cost < cost) {
        const double rho = predicted > 0.0 ? (cost - trial_cost) / predicted : 0.0;
        mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
        nu = 2.0;
        const double drop = cost - trial_cost;
        vars = trial;
        cost = trial_cost;
        accepted = true;
        if (drop <= settings.relative_tolerance * std::max(cost, 1e-300) ||
            cost <= 1e-24) {
          converged = true;
        }
      } else {
        mu *= nu;
        nu *= 2.0;
        if (mu > 1e16) break;
      }
    }
    if (!accepted) {
      // No descent left at any damping: stationary to working precision.
      converged = g.lpNorm<Eigen::Infinity>() <= 1e-6 * std::max(1.0, cost);
      break;
    }
  }

  out.variables = vars;
  out.cost = reconstruction_cost(vars, grid, smooth);
  out.converged = converged;
  out.iterations = iter;

  const PredictedMotion pm = predict_motion(vars, grid.Ts);
  out.profile.points = pm.positions;
  out.profile.speeds = vars.speeds;
  out.profile.segment_time_steps.assign(n - 1, grid.Ts);
  out.profile.ax = pm.ax;
  out.profile.ay = pm.ay;
  out.profile.total_time = grid.Ts * static_cast<double>(n - 1);

  out.energy_reconstructed = comfort_ma(out.profile);
  out.energy_raw_imu = raw_imu_energy(log, grid.t.front(), grid.t.back());
  out.energy_reduction_percent =
      out.energy_raw_imu > 0.0
          ? 100.0 * (out.energy_raw_imu - out.energy_reconstructed) / out.energy_raw_imu
          : 0.0;
  return out;
}

RunValidity validate_run(const MotionProfile& profile, double min_speed) {
  RunValidity v;
  if (profile.speeds.empty()) {
    v.valid = false;
    v.reasons.push_back("empty profile");
    return v;
  }
  v.min_speed = *std::min_element(profile.speeds.begin(), profile.speeds.end());
  if (!(v.min_speed > min_speed)) {
    v.valid = false;
    v.reasons.push_back(fmt::format("min speed {:.1f} {} {:.1f}", v.min_speed,
                                    v.min_speed < min_speed ? "<" : "<=", min_speed));
  }
  return v;
}

nlohmann::json validity_to_json(const RunValidity& v) {
  return {{"valid", v.valid}, {"min_speed", v.min_speed}, {"reasons", v.reasons}};
}

}  // namespace smoothride
