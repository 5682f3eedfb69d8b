#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "smoothride/kinematics.hpp"
#include "smoothride/sensor_log.hpp"

namespace smoothride {

/// Per-sample weights of the position and acceleration errors. The outage
/// pair applies inside declared outage windows.
struct WeightSchedule {
  double w1_normal = 1.0;
  double w2_normal = 5.0;
  double w1_outage = 0.0;
  double w2_outage = 10.0;

  void validate() const;
};

nlohmann::json weight_schedule_to_json(const WeightSchedule& w);
WeightSchedule weight_schedule_from_json(const nlohmann::json& doc);

/// Initial position plus one heading and one speed per grid sample.
struct ReconstructionVariables {
  double x0 = 0.0;
  double y0 = 0.0;
  std::vector<double> headings;
  std::vector<double> speeds;

  std::size_t size() const { return speeds.size(); }
};

struct PredictedMotion {
  std::vector<Point2> positions;  // N
  std::vector<double> ax;         // N-1
  std::vector<double> ay;         // N-1
};

/// Forward-Euler dead reckoning on the sample grid:
///   x_{k+1} = x_k + v_k Ts cos(psi_k),  y_{k+1} = y_k + v_k Ts sin(psi_k)
///   ax_k = (v_{k+1} - v_k) / Ts,       ay_k = v_k (psi_{k+1} - psi_k) / Ts
PredictedMotion predict_motion(const ReconstructionVariables& vars, double Ts);

/// Sensor data resampled onto the uniform reconstruction grid with the
/// per-sample weights already resolved.
struct ReconstructionGrid {
  double Ts = 0.0;
  std::vector<double> t;
  std::vector<double> gps_x;
  std::vector<double> gps_y;
  std::vector<double> imu_ax;
  std::vector<double> imu_ay;
  std::vector<double> w_position;      // N
  std::vector<double> w_acceleration;  // N (last entry unused)

  std::size_t size() const { return t.size(); }
};

ReconstructionGrid prepare_grid(const SensorLog& log, const WeightSchedule& schedule);

struct CostBreakdown {
  double gps_term = 0.0;            // sum_k w1_k |p_gps - p|^2
  double imu_term = 0.0;            // sum_k w2_k |a_imu - a|^2
  double regularization_term = 0.0;
  double j_gps = 0.0;               // unweighted, over samples with w1 > 0
  double j_imu = 0.0;               // unweighted, over samples with w2 > 0

  double data_cost() const { return gps_term + imu_term; }
  double objective() const { return data_cost() + regularization_term; }
};

inline constexpr double kHeadingSmoothness = 1e-6;

CostBreakdown reconstruction_cost(const ReconstructionVariables& vars,
                                  const ReconstructionGrid& grid,
                                  double heading_smoothness = kHeadingSmoothness);

CostBreakdown reconstruction_cost(const ReconstructionVariables& vars,
                                  const SensorLog& log, const WeightSchedule& schedule,
                                  double heading_smoothness = kHeadingSmoothness);

struct ReconstructionSettings {
  double heading_smoothness = kHeadingSmoothness;
  int max_iterations = 200;
  double relative_tolerance = 1e-12;
  double initial_fit_window = 1.0;  // seconds, half-width of the smoothing fit
};

nlohmann::json reconstruction_settings_to_json(const ReconstructionSettings& s);

/// Initial guess: GPS track (gaps bridged linearly, smoothed by local
/// quadratic fits), headings from atan2 of consecutive deltas, unwrapped,
/// and speeds from chord length / Ts.
ReconstructionVariables initial_variables(const ReconstructionGrid& grid,
                                          double fit_window = 1.0);

struct ReconstructionResult {
  MotionProfile profile;
  ReconstructionVariables variables;
  ReconstructionGrid grid;
  CostBreakdown cost;
  CostBreakdown initial_cost;
  bool converged = false;
  int iterations = 0;
  double energy_reconstructed = 0.0;
  double energy_raw_imu = 0.0;
  double energy_reduction_percent = 0.0;
};

/// Levenberg-Marquardt on the weighted position + acceleration error. The
/// Gauss-Newton matrix is formed exactly: the position block reduces to
/// suffix sums of the weights, so each column is one SIMD Gram kernel call.
ReconstructionResult reconstruct(const SensorLog& log,
                                 const WeightSchedule& schedule = {},
                                 const ReconstructionSettings& settings = {});

/// Raw IMU acceleration energy over the grid span: sum (ax^2 + ay^2) dt.
double raw_imu_energy(const SensorLog& log, double t_begin, double t_end);

inline constexpr double kMinValidSpeed = 5.0;  // 18 km/h

struct RunValidity {
  bool valid = true;
  double min_speed = 0.0;
  std::vector<std::string> reasons;
};

/// A run is valid when its minimum speed is strictly above `min_speed`.
RunValidity validate_run(const MotionProfile& profile, double min_speed = kMinValidSpeed);

nlohmann::json validity_to_json(const RunValidity& v);

}  // namespace smoothride
