#include "smoothride/sensor_log.hpp"

#include <fmt/core.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "csv.hpp"
#include "local_fit.hpp"
#include "smoothride/error.hpp"

namespace smoothride {

void SensorLog::validate() const {
  if (gps.size() < 2) throw ValidationError("sensor log: need at least 2 GPS samples");
  if (imu.size() < 2) throw ValidationError("sensor log: need at least 2 IMU samples");
  for (std::size_t i = 1; i < gps.size(); ++i) {
    if (!(gps[i].t > gps[i - 1].t)) {
      throw ValidationError(fmt::format("gps: timestamps not increasing at row {}", i), i);
    }
  }
  for (std::size_t i = 1; i < imu.size(); ++i) {
    if (!(imu[i].t > imu[i - 1].t)) {
      throw ValidationError(fmt::format("imu: timestamps not increasing at row {}", i), i);
    }
  }
  if (sample_time < 0.0) throw ValidationError("sensor log: sample time must be > 0");
  const double t0 = gps.front().t;
  const double t1 = gps.back().t;
  for (std::size_t w = 0; w < outage_windows.size(); ++w) {
    const TimeWindow& win = outage_windows[w];
    if (!(win.start <= win.end) || win.start < t0 || win.end > t1) {
      throw ValidationError(
          fmt::format("outage window {} [{}, {}] not inside log span [{}, {}]", w,
                      win.start, win.end, t0, t1),
          w);
    }
  }
}

double SensorLog::gps_period() const {
  if (gps.size() < 2) return 0.0;
  std::vector<double> diffs;
  diffs.reserve(gps.size() - 1);
  for (std::size_t i = 1; i < gps.size(); ++i) diffs.push_back(gps[i].t - gps[i - 1].t);
  std::nth_element(diffs.begin(), diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2),
                   diffs.end());
  return diffs[diffs.size() / 2];
}

double SensorLog::grid_period() const {
  return sample_time > 0.0 ? sample_time : gps_period();
}

bool SensorLog::in_outage(double t) const {
  return std::any_of(outage_windows.begin(), outage_windows.end(),
                     [t](const TimeWindow& w) { return w.contains(t); });
}

SensorLog read_sensor_log(const std::filesystem::path& gps_csv,
                          const std::filesystem::path& imu_csv) {
  SensorLog log;
  {
    const csv::Table table = csv::read(gps_csv);
    const std::string file = gps_csv.string();
    const std::size_t ct = table.column("t", file);
    const std::size_t cx = table.column("x", file);
    const std::size_t cy = table.column("y", file);
    const std::size_t cv = table.column("valid", file);
    for (const auto& r : table.rows) log.gps.push_back({r[ct], r[cx], r[cy], r[cv] != 0.0});
  }
  {
    const csv::Table table = csv::read(imu_csv);
    const std::string file = imu_csv.string();
    const std::size_t ct = table.column("t", file);
    const std::size_t cax = table.column("ax", file);
    const std::size_t cay = table.column("ay", file);
    for (const auto& r : table.rows) log.imu.push_back({r[ct], r[cax], r[cay]});
  }
  log.validate();
  return log;
}

void write_sensor_log(const SensorLog& log, const std::filesystem::path& gps_csv,
                      const std::filesystem::path& imu_csv) {
  auto g = fmt::output_file(gps_csv.string());
  g.print("t,x,y,valid\n");
  for (const GpsSample& s : log.gps) {
    g.print("{:.9g},{:.9g},{:.9g},{}\n", s.t, s.x, s.y, s.valid ? 1 : 0);
  }
  auto m = fmt::output_file(imu_csv.string());
  m.print("t,ax,ay\n");
  for (const ImuSample& s : log.imu) m.print("{:.9g},{:.9g},{:.9g}\n", s.t, s.ax, s.ay);
}

void apply_outage_json(SensorLog& log, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("outage file: top level must be an object");
  if (doc.contains("sample_time_s")) {
    if (!doc["sample_time_s"].is_number()) {
      throw ParseError("outage file: field \"sample_time_s\" must be a number");
    }
    log.sample_time = doc["sample_time_s"].get<double>();
  }
  if (!doc.contains("outage_windows")) return;
  const auto& arr = doc["outage_windows"];
  if (!arr.is_array()) throw ParseError("outage file: field \"outage_windows\" must be an array");
  log.outage_windows.clear();
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& w = arr[i];
    const std::string where = fmt::format("outage_windows[{}]", i);
    if (!w.is_object() || !w.contains("t_start") || !w.contains("t_end") ||
        !w["t_start"].is_number() || !w["t_end"].is_number()) {
      throw ParseError(where + ": needs numeric \"t_start\" and \"t_end\"");
    }
    log.outage_windows.push_back({w["t_start"].get<double>(), w["t_end"].get<double>()});
  }
}

nlohmann::json outage_json(const SensorLog& log) {
  nlohmann::json windows = nlohmann::json::array();
  for (const TimeWindow& w : log.outage_windows) {
    windows.push_back({{"t_start", w.start}, {"t_end", w.end}});
  }
  nlohmann::json doc{{"outage_windows", windows}};
  if (log.sample_time > 0.0) doc["sample_time_s"] = log.sample_time;
  return doc;
}

std::vector<double> gps_lateral_acceleration(const SensorLog& log, double half_window) {
  const std::size_t n = log.gps.size();
  std::vector<double> t(n), x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = log.gps[i].t;
    x[i] = log.gps[i].x;
    y[i] = log.gps[i].y;
  }
  std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 0; i < n; ++i) {
    while (t[i] - t[lo] > half_window + 1e-9) ++lo;
    while (hi + 1 < n && t[hi + 1] - t[i] <= half_window + 1e-9) ++hi;
    if (t[i] - t[lo] < half_window - 1e-9 || t[hi] - t[i] < half_window - 1e-9) continue;
    bool valid = true;
    for (std::size_t j = lo; j <= hi && valid; ++j) valid = log.gps[j].valid;
    if (!valid) continue;
    const auto fx = detail::fit_quadratic(t, x, lo, hi, t[i]);
    const auto fy = detail::fit_quadratic(t, y, lo, hi, t[i]);
    if (!fx || !fy) continue;
    const double speed = std::hypot(fx->rate, fy->rate);
    if (speed < 1.0) continue;
    out[i] = (fx->rate * fy->curvature - fy->rate * fx->curvature) / speed;
  }
  return out;
}

namespace {

// Moving average of the IMU lateral channel over +-half_width seconds,
// evaluated at an arbitrary time by linear interpolation of the averages.
class SmoothedImu {
 public:
  SmoothedImu(const std::vector<ImuSample>& imu, double half_width) : imu_(imu) {
    const std::size_t n = imu.size();
    prefix_.assign(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) prefix_[i + 1] = prefix_[i] + imu[i].ay;
    avg_.resize(n);
    std::size_t lo = 0, hi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      while (imu[i].t - imu[lo].t > half_width + 1e-12) ++lo;
      while (hi + 1 < n && imu[hi + 1].t - imu[i].t <= half_width + 1e-12) ++hi;
      avg_[i] = (prefix_[hi + 1] - prefix_[lo]) / static_cast<double>(hi - lo + 1);
    }
  }

  double front() const { return imu_.front().t; }
  double back() const { return imu_.back().t; }

  double at(double t) const {
    const auto it = std::upper_bound(imu_.begin(), imu_.end(), t,
                                     [](double v, const ImuSample& s) { return v < s.t; });
    if (it == imu_.begin()) return avg_.front();
    if (it == imu_.end()) return avg_.back();
    const std::size_t i = static_cast<std::size_t>(it - imu_.begin());
    const double w = (t - imu_[i - 1].t) / (imu_[i].t - imu_[i - 1].t);
    return avg_[i - 1] + w * (avg_[i] - avg_[i - 1]);
  }

 private:
  const std::vector<ImuSample>& imu_;
  std::vector<double> prefix_;
  std::vector<double> avg_;
};

}  // namespace

AlignmentResult align_imu(const SensorLog& log, double max_shift) {
  log.validate();
  if (!(max_shift > 0.0)) throw DomainError("align_imu: max_shift must be > 0");
  if (log.imu.back().t < log.gps.front().t || log.imu.front().t > log.gps.back().t) {
    throw ValidationError("align_imu: GPS and IMU streams do not overlap");
  }

  const double gps_dt = log.gps_period();
  const std::vector<double> lat = gps_lateral_acceleration(log);
  const SmoothedImu imu(log.imu, 0.5 * gps_dt);

  double imu_dt = (log.imu.back().t - log.imu.front().t) /
                  static_cast<double>(log.imu.size() - 1);
  const double step = std::min(0.005, 0.5 * imu_dt);
  const int half = static_cast<int>(std::ceil(max_shift / step - 1e-9));

  std::vector<double> corr;
  std::vector<double> lags;
  for (int j = -half; j <= half; ++j) {
    const double lag = std::clamp(j * step, -max_shift, max_shift);
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (std::isnan(lat[i])) continue;
      const double ts = log.gps[i].t + lag;
      if (ts < imu.front() || ts > imu.back()) continue;
      const double a = lat[i];
      const double b = imu.at(ts);
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
      ++count;
    }
    double r = 0.0;
    if (count >= 3) {
      const double nn = static_cast<double>(count);
      const double va = saa - sa * sa / nn;
      const double vb = sbb - sb * sb / nn;
      const double cov = sab - sa * sb / nn;
      if (va > 1e-12 * nn && vb > 1e-12 * nn) r = cov / std::sqrt(va * vb);
    }
    corr.push_back(r);
    lags.push_back(lag);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < corr.size(); ++i) {
    if (corr[i] > corr[best]) best = i;
  }
  AlignmentResult out;
  out.correlation = corr[best];
  out.shift = lags[best];
  if (best == 0 || best + 1 == corr.size()) {
    out.edge_warning = true;
  } else {
    const double c0 = corr[best - 1], c1 = corr[best], c2 = corr[best + 1];
    const double denom = c0 - 2.0 * c1 + c2;
    if (denom < 0.0) {
      const double offset = 0.5 * (c0 - c2) / denom;
      out.shift = std::clamp(lags[best] + offset * step, -max_shift, max_shift);
    }
  }

  out.log = log;
  for (ImuSample& s : out.log.imu) s.t -= out.shift;
  return out;
}

}  // namespace smoothride
