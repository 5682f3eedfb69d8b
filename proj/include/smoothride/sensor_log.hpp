#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"

namespace smoothride {

struct GpsSample {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  bool valid = true;
};

/// Body-frame accelerations: ax longitudinal, ay lateral (positive left).
struct ImuSample {
  double t = 0.0;
  double ax = 0.0;
  double ay = 0.0;
};

struct TimeWindow {
  double start = 0.0;
  double end = 0.0;

  bool contains(double t) const { return t >= start && t <= end; }
};

struct SensorLog {
  std::vector<GpsSample> gps;
  std::vector<ImuSample> imu;
  double sample_time = 0.0;  // reconstruction grid period; <= 0 means "GPS median period"
  std::vector<TimeWindow> outage_windows;

  /// Strictly increasing timestamps, non-empty streams, windows inside the
  /// log span. Throws ValidationError.
  void validate() const;

  double gps_period() const;  // median GPS sample spacing
  double grid_period() const; // sample_time if set, else gps_period()
  bool in_outage(double t) const;
};

/// gps.csv: t,x,y,valid   imu.csv: t,ax,ay
SensorLog read_sensor_log(const std::filesystem::path& gps_csv,
                          const std::filesystem::path& imu_csv);
void write_sensor_log(const SensorLog& log, const std::filesystem::path& gps_csv,
                      const std::filesystem::path& imu_csv);

/// {"outage_windows": [{"t_start": s, "t_end": s}, ...], "sample_time_s": s}
/// ("sample_time_s" optional).
void apply_outage_json(SensorLog& log, const nlohmann::json& doc);
nlohmann::json outage_json(const SensorLog& log);

struct AlignmentResult {
  SensorLog log;          // IMU timestamps corrected by -shift
  double shift = 0.0;     // seconds the IMU stream lags the GPS stream
  double correlation = 0.0;
  bool edge_warning = false;  // peak at the search bracket edge
};

inline constexpr double kDefaultMaxShift = 0.2;

/// Finds the IMU lag in [-max_shift, max_shift] maximizing the correlation
/// between IMU lateral acceleration and the GPS-derived lateral
/// acceleration (heading rate times speed from local quadratic fits of the
/// GPS track), then removes it from the IMU timestamps.
AlignmentResult align_imu(const SensorLog& log, double max_shift = kDefaultMaxShift);

/// Lateral acceleration implied by the GPS track at each GPS sample, from a
/// least-squares quadratic fit over +-half_window seconds. Samples whose
/// window touches invalid GPS, or where speed < 1 m/s, are NaN.
std::vector<double> gps_lateral_acceleration(const SensorLog& log,
                                             double half_window = 1.0);

}  // namespace smoothride
