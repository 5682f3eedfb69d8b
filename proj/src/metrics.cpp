#include "smoothride/metrics.hpp"

#include <fftw3.h>
#include <fmt/core.h>
#include <fmt/os.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "smoothride/error.hpp"

namespace smoothride {

nlohmann::json comparison_report_to_json(const ComparisonReport& r) {
  nlohmann::json j{{"travel_time_human", r.travel_time_human},
                   {"travel_time_planner", r.travel_time_planner},
                   {"energy_human", r.energy_human},
                   {"energy_planner", r.energy_planner},
                   {"deficiency_ma", r.deficiency_ma}};
  if (r.weighted_energy_human) j["weighted_energy_human"] = *r.weighted_energy_human;
  if (r.weighted_energy_planner) j["weighted_energy_planner"] = *r.weighted_energy_planner;
  if (r.deficiency_ms) j["deficiency_ms"] = *r.deficiency_ms;
  return j;
}

double deficiency_percent(double human, double planner) {
  if (!(planner > 0.0)) {
    throw DomainError(fmt::format("deficiency: planner comfort must be > 0, got {}", planner));
  }
  return (human - planner) / planner * 100.0;
}

namespace {

void check_time_match(const MotionProfile& human, const MotionProfile& planner,
                      double tolerance) {
  const double gap = std::abs(human.total_time - planner.total_time);
  if (gap > tolerance) {
    throw ComparabilityError(fmt::format(
        "travel times differ by {:.3f} s (human {:.3f} s, planner {:.3f} s), limit {:.3f} s",
        gap, human.total_time, planner.total_time, tolerance));
  }
}

}  // namespace

double deficiency(const MotionProfile& human, const MotionProfile& planner,
                  ObjectiveVariant variant, const FilterSpec& filter, double cooldown,
                  double time_tolerance) {
  check_time_match(human, planner, time_tolerance);
  if (variant == ObjectiveVariant::ma) {
    return deficiency_percent(comfort_ma(human), comfort_ma(planner));
  }
  const SicknessFilter f(filter);
  return deficiency_percent(comfort_ms(human, f, cooldown), comfort_ms(planner, f, cooldown));
}

ComparisonReport compare_profiles(const MotionProfile& human, const MotionProfile& ma_plan,
                                  const MotionProfile* ms_plan, const FilterSpec& filter,
                                  double cooldown, double time_tolerance) {
  check_time_match(human, ma_plan, time_tolerance);
  ComparisonReport r;
  r.travel_time_human = human.total_time;
  r.travel_time_planner = ma_plan.total_time;
  r.energy_human = comfort_ma(human);
  r.energy_planner = comfort_ma(ma_plan);
  r.deficiency_ma = deficiency_percent(r.energy_human, r.energy_planner);
  if (ms_plan != nullptr) {
    check_time_match(human, *ms_plan, time_tolerance);
    const SicknessFilter f(filter);
    r.weighted_energy_human = comfort_ms(human, f, cooldown);
    r.weighted_energy_planner = comfort_ms(*ms_plan, f, cooldown);
    r.deficiency_ms = deficiency_percent(*r.weighted_energy_human, *r.weighted_energy_planner);
  }
  return r;
}

std::string_view axis_name(Axis a) {
  return a == Axis::longitudinal ? "longitudinal" : "lateral";
}

Axis parse_axis(std::string_view name) {
  if (name == "longitudinal" || name == "x" || name == "ax") return Axis::longitudinal;
  if (name == "lateral" || name == "y" || name == "ay") return Axis::lateral;
  throw ValidationError(fmt::format("unknown axis \"{}\" (expected longitudinal|lateral)", name));
}

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    const std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

}  // namespace

Spectrum welch(std::span<const double> signal, double rate, const WelchSettings& settings) {
  if (!(rate > 0.0)) throw DomainError("welch: rate must be > 0");
  if (!(settings.overlap >= 0.0 && settings.overlap < 1.0)) {
    throw DomainError("welch: overlap must be in [0, 1)");
  }
  const std::size_t n = signal.size();
  if (n < 8 || settings.max_segment < 8) {
    throw ResolutionError(fmt::format("welch: need at least 8 samples, got {}", n));
  }
  const std::size_t len = std::min(n, settings.max_segment);
  const auto shift = std::max<std::size_t>(
      1, len - static_cast<std::size_t>(std::floor(settings.overlap * static_cast<double>(len))));
  const std::size_t segments = 1 + (n - len) / shift;
  const std::size_t bins = len / 2 + 1;

  std::vector<double> window(len);
  double window_power = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(len));
    window_power += window[i] * window[i];
  }

  std::vector<double> buffer(len);
  auto* spectrum = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins));
  const std::unique_ptr<fftw_complex, decltype(&fftw_free)> spectrum_guard(
      reinterpret_cast<fftw_complex*>(spectrum), [](void* p) { fftw_free(p); });
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    const std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_r2c_1d(static_cast<int>(len), buffer.data(), spectrum,
                                    FFTW_ESTIMATE));
  }

  Spectrum out;
  out.frequency.resize(bins);
  out.density.assign(bins, 0.0);
  for (std::size_t seg = 0; seg < segments; ++seg) {
    const std::size_t first = seg * shift;
    double mean = 0.0;
    if (settings.detrend) {
      for (std::size_t i = 0; i < len; ++i) mean += signal[first + i];
      mean /= static_cast<double>(len);
    }
    for (std::size_t i = 0; i < len; ++i) buffer[i] = (signal[first + i] - mean) * window[i];
    fftw_execute(plan.get());
    for (std::size_t k = 0; k < bins; ++k) {
      out.density[k] += spectrum[k][0] * spectrum[k][0] + spectrum[k][1] * spectrum[k][1];
    }
  }

  const double scale = 1.0 / (rate * window_power * static_cast<double>(segments));
  for (std::size_t k = 0; k < bins; ++k) {
    const bool unpaired = k == 0 || (len % 2 == 0 && k == bins - 1);
    out.density[k] *= unpaired ? scale : 2.0 * scale;
    out.frequency[k] = static_cast<double>(k) * rate / static_cast<double>(len);
  }
  return out;
}

Spectrum psd(const MotionProfile& profile, Axis axis, double rate,
             const WelchSettings& settings) {
  if (profile.total_time < kMinPsdDuration) {
    throw ResolutionError(fmt::format("psd: profile lasts {:.3f} s, need at least {:.0f} s",
                                      profile.total_time, kMinPsdDuration));
  }
  const UniformSeries series = resample_uniform(profile, rate);
  return welch(axis == Axis::longitudinal ? series.ax : series.ay, rate, settings);
}

double integrated_density(const Spectrum& s) {
  double total = 0.0;
  for (std::size_t k = 1; k < s.frequency.size(); ++k) {
    total += 0.5 * (s.density[k] + s.density[k - 1]) * (s.frequency[k] - s.frequency[k - 1]);
  }
  return total;
}

double band_energy(const Spectrum& s, double f_lo, double f_hi) {
  if (s.frequency.size() < 2) throw DomainError("band_energy: empty spectrum");
  const double f0 = s.frequency.front();
  const double f1 = s.frequency.back();
  const double slack = 1e-12 * f1;
  if (!(f_lo < f_hi) || f_lo < f0 - slack || f_hi > f1 + slack) {
    throw DomainError(fmt::format("band [{}, {}] Hz outside the spectrum grid [{}, {}] Hz",
                                  f_lo, f_hi, f0, f1));
  }
  f_lo = std::max(f_lo, f0);
  f_hi = std::min(f_hi, f1);
  auto density_at = [&](double f) {
    const auto it = std::upper_bound(s.frequency.begin(), s.frequency.end(), f);
    if (it == s.frequency.end()) return s.density.back();
    const auto i = static_cast<std::size_t>(it - s.frequency.begin());
    const double w = (f - s.frequency[i - 1]) / (s.frequency[i] - s.frequency[i - 1]);
    return s.density[i - 1] + w * (s.density[i] - s.density[i - 1]);
  };
  double total = 0.0;
  double f_prev = f_lo;
  double d_prev = density_at(f_lo);
  for (std::size_t k = 0; k < s.frequency.size(); ++k) {
    const double f = s.frequency[k];
    if (f <= f_lo) continue;
    if (f >= f_hi) break;
    total += 0.5 * (s.density[k] + d_prev) * (f - f_prev);
    f_prev = f;
    d_prev = s.density[k];
  }
  total += 0.5 * (density_at(f_hi) + d_prev) * (f_hi - f_prev);
  return total;
}

double mean_square(std::span<const double> signal) {
  if (signal.empty()) return 0.0;
  double sum = 0.0;
  for (double v : signal) sum += v * v;
  return sum / static_cast<double>(signal.size());
}

std::vector<ContourPoint> discomfort_contours(std::span<const FrontierPoint> frontier,
                                              std::span<const double> factors) {
  std::vector<ContourPoint> out;
  out.reserve(frontier.size() * factors.size());
  for (double factor : factors) {
    if (!(factor > 0.0)) throw ValidationError("contour factors must be > 0");
    for (const FrontierPoint& p : frontier) {
      out.push_back({factor, p.travel_time, factor * p.comfort});
    }
  }
  return out;
}

void write_spectrum_csv(const Spectrum& s, const std::filesystem::path& path) {
  auto out = fmt::output_file(path.string());
  out.print("frequency,density\n");
  for (std::size_t k = 0; k < s.frequency.size(); ++k) {
    out.print("{:.9g},{:.9g}\n", s.frequency[k], s.density[k]);
  }
}

void write_contour_csv(std::span<const ContourPoint> contours,
                       const std::filesystem::path& path) {
  auto out = fmt::output_file(path.string());
  out.print("factor,time,comfort\n");
  for (const ContourPoint& c : contours) {
    out.print("{:.9g},{:.9g},{:.9g}\n", c.factor, c.travel_time, c.comfort);
  }
}

}  // namespace smoothride
