#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smoothride/kinematics.hpp"
#include "smoothride/route.hpp"
#include "smoothride/sickness_filter.hpp"

namespace smoothride {

enum class ObjectiveVariant { ma, ms };

std::string_view variant_name(ObjectiveVariant v);
ObjectiveVariant parse_variant(std::string_view name);

/// J = comfort + W * T. W carries m^2/s^4 so both addends are m^2/s^3.
struct ObjectiveConfig {
  ObjectiveVariant variant = ObjectiveVariant::ma;
  double time_weight = 1.0;
  FilterSpec filter = FilterSpec::defaults();
  double cooldown = kDefaultCooldown;

  void validate() const;
};

/// sum_k (ax_k^2 + ay_k^2) dt_k
double comfort_ma(const MotionProfile& profile);

/// Same energy on the band-pass filtered accelerations, including the
/// zero-input cooldown tail.
double comfort_ms(const MotionProfile& profile, const FilterSpec& filter,
                  double cooldown = kDefaultCooldown);
double comfort_ms(const MotionProfile& profile, const SicknessFilter& filter,
                  double cooldown = kDefaultCooldown);

double comfort_term(const MotionProfile& profile, const ObjectiveConfig& config);

double planner_cost(const MotionProfile& profile, const ObjectiveConfig& config);

/// Planner cost as a function of the packed decision vector
/// x = [y_0 .. y_{N-1}, v_0 .. v_{N-1}], with an analytic gradient obtained
/// by reverse accumulation through the segment kinematics and, for the MS
/// variant, through the filter recursion (including the dt-dependence of
/// the discretized matrices and of the cooldown tail step).
class PlanObjective {
 public:
  PlanObjective(const RouteCorridor& corridor, ObjectiveConfig config);

  std::size_t dimension() const { return 2 * corridor_.size(); }
  const ObjectiveConfig& config() const { return config_; }

  struct Terms {
    double cost = 0.0;
    double comfort = 0.0;
    double travel_time = 0.0;
  };

  Terms evaluate(std::span<const double> x) const;

  /// Fills `grad` (size dimension()) and returns the terms.
  Terms evaluate(std::span<const double> x, std::span<double> grad) const;

  static std::vector<double> pack(const MotionPlan& plan);
  MotionPlan unpack(std::span<const double> x) const;

 private:
  RouteCorridor corridor_;
  ObjectiveConfig config_;
  SicknessFilter filter_;
  std::vector<double> cos_axis_;
  std::vector<double> sin_axis_;
};

}  // namespace smoothride
