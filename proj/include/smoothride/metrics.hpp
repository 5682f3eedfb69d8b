#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "smoothride/kinematics.hpp"
#include "smoothride/objectives.hpp"

namespace smoothride {

inline constexpr double kTimeMatchTolerance = 1.0;  // seconds

struct ComparisonReport {
  double travel_time_human = 0.0;
  double travel_time_planner = 0.0;
  double energy_human = 0.0;
  double energy_planner = 0.0;
  std::optional<double> weighted_energy_human;
  std::optional<double> weighted_energy_planner;
  double deficiency_ma = 0.0;
  std::optional<double> deficiency_ms;
};

nlohmann::json comparison_report_to_json(const ComparisonReport& r);

/// (human - planner) / planner * 100.
double deficiency_percent(double human, double planner);

/// Percentage excess of the human comfort term over the planner's. Throws
/// ComparabilityError when the travel times differ by more than
/// `time_tolerance`.
double deficiency(const MotionProfile& human, const MotionProfile& planner,
                  ObjectiveVariant variant, const FilterSpec& filter = FilterSpec::defaults(),
                  double cooldown = kDefaultCooldown,
                  double time_tolerance = kTimeMatchTolerance);

/// MA fields from `ma_plan`; the weighted (MS) fields are filled only when
/// `ms_plan` is given.
ComparisonReport compare_profiles(const MotionProfile& human, const MotionProfile& ma_plan,
                                  const MotionProfile* ms_plan = nullptr,
                                  const FilterSpec& filter = FilterSpec::defaults(),
                                  double cooldown = kDefaultCooldown,
                                  double time_tolerance = kTimeMatchTolerance);

enum class Axis { longitudinal, lateral };

std::string_view axis_name(Axis a);
Axis parse_axis(std::string_view name);

struct WelchSettings {
  std::size_t max_segment = 512;
  double overlap = 0.5;
  bool detrend = false;  // subtract each segment's mean
};

/// One-sided density in (m/s^2)^2/Hz at frequencies k * rate / L.
struct Spectrum {
  std::vector<double> frequency;
  std::vector<double> density;
};

/// Welch estimate with a periodic Hann window; segment length
/// min(N, max_segment).
Spectrum welch(std::span<const double> signal, double rate, const WelchSettings& settings = {});

inline constexpr double kMinPsdDuration = 30.0;  // seconds

/// Resamples one acceleration axis at `rate` and applies welch(). Throws
/// ResolutionError below kMinPsdDuration.
Spectrum psd(const MotionProfile& profile, Axis axis, double rate = 10.0,
             const WelchSettings& settings = {});

/// Trapezoidal integral of the density over the whole frequency grid.
double integrated_density(const Spectrum& s);

/// Trapezoidal integral over [f_lo, f_hi] with the density interpolated at
/// the band edges. Throws DomainError outside the grid.
double band_energy(const Spectrum& s, double f_lo, double f_hi);

/// Mean of the squared samples.
double mean_square(std::span<const double> signal);

inline const std::vector<double> kDefaultContourFactors{1.1, 1.2, 1.5, 2.0};

struct FrontierPoint {
  double travel_time = 0.0;
  double comfort = 0.0;
};

struct ContourPoint {
  double factor = 1.0;
  double travel_time = 0.0;
  double comfort = 0.0;
};

/// Iso-discomfort lines: each frontier point with its comfort scaled by each
/// factor, grouped by factor.
std::vector<ContourPoint> discomfort_contours(std::span<const FrontierPoint> frontier,
                                              std::span<const double> factors);

void write_spectrum_csv(const Spectrum& s, const std::filesystem::path& path);
void write_contour_csv(std::span<const ContourPoint> contours,
                       const std::filesystem::path& path);

}  // namespace smoothride
