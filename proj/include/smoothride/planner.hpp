#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "json.hpp"
#include "smoothride/kinematics.hpp"
#include "smoothride/objectives.hpp"
#include "smoothride/route.hpp"

namespace smoothride {

struct SolverSettings {
  double tolerance = 1e-6;   // projected-gradient infinity norm
  int max_iterations = 3000;
  int restarts = 3;          // perturbed starts in addition to the guess
  double perturbation = 0.1; // fraction of each bound width
  std::uint64_t seed = 0;
  int memory = 10;
};

nlohmann::json solver_settings_to_json(const SolverSettings& s);
SolverSettings solver_settings_from_json(const nlohmann::json& doc);

struct PlanProblem {
  RouteCorridor corridor;
  ObjectiveConfig objective;
  double initial_speed = 0.0;  // pins v_1
  SolverSettings solver;
  std::optional<MotionPlan> warm_start;  // tried as an extra start

  void validate() const;
};

struct PlanResult {
  MotionPlan plan;
  MotionProfile profile;
  double cost = 0.0;
  double comfort_term = 0.0;
  double travel_time = 0.0;
  double time_weight = 0.0;
  bool converged = false;
  int iterations = 0;
};

nlohmann::json plan_result_to_json(const PlanResult& r);

inline constexpr double kReferenceLateralAccel = 2.0;  // m/s^2
inline constexpr double kCurvatureFloor = 1e-6;        // 1/m
inline constexpr double kSpeedFloor = 0.1;             // m/s

/// Unsigned curvature of the lane-center polyline at each station.
std::vector<double> center_curvature(const RouteCorridor& corridor);

/// Lane-center offsets and the curvature-limited speed
/// min(v_max, sqrt(a_ref / max(|kappa|, eps))), clipped to bounds, v_1 pinned.
MotionPlan initialize_guess(const PlanProblem& problem,
                            double reference_lateral_accel = kReferenceLateralAccel);

/// Multi-start projected L-BFGS on the box-constrained planner program.
/// Deterministic for a given problem and seed. Never returns a plan worse
/// than the initial guess.
PlanResult solve_plan(const PlanProblem& problem);

struct MatchResult {
  PlanResult result;
  double time_weight = 0.0;
  int bisection_iterations = 0;
  bool matched = false;
  double min_time = 0.0;  // travel time at the largest weight
  double max_time = 0.0;  // travel time at the smallest weight
};

inline constexpr double kLogWeightLow = -3.0;
inline constexpr double kLogWeightHigh = 3.0;
inline constexpr int kMaxBisections = 40;

/// Bisection on log10(W) in [-3, 3] until the planned travel time is within
/// `time_tolerance` of `target_time`. Throws BracketError when the target
/// lies outside the travel times reachable at the bracket ends.
MatchResult match_travel_time(const RouteCorridor& corridor,
                              const ObjectiveConfig& objective,
                              double initial_speed, double target_time,
                              double time_tolerance = 0.5,
                              const SolverSettings& solver = {});

struct SweepRow {
  double time_weight = 0.0;
  double travel_time = 0.0;
  double comfort = 0.0;
  double cost = 0.0;
  bool converged = false;
  bool failed = false;
  std::string error;
};

/// Independent solves over a grid of time weights, spread over `jobs`
/// worker threads. Row order follows the grid.
std::vector<SweepRow> sweep_time_weight(const RouteCorridor& corridor,
                                        const ObjectiveConfig& objective,
                                        double initial_speed,
                                        const std::vector<double>& weights,
                                        const SolverSettings& solver = {},
                                        int jobs = 1);

/// True when no row is dominated in (travel_time, comfort) by another row
/// by more than `noise` in both coordinates.
bool is_nondominated(const std::vector<SweepRow>& rows, double noise = 1e-6);

}  // namespace smoothride
