#pragma once

#include <filesystem>
#include <vector>

#include "json.hpp"
#include "smoothride/metrics.hpp"
#include "smoothride/objectives.hpp"
#include "smoothride/planner.hpp"
#include "smoothride/reconstruction.hpp"

namespace smoothride::cli {

/// Everything a subcommand may read from --config. Missing sections keep
/// their defaults; unknown keys are rejected so typos do not pass silently.
struct Config {
  ObjectiveConfig objective;
  SolverSettings solver;

  WeightSchedule weights;
  ReconstructionSettings reconstruction;
  bool align = true;
  double max_shift = kDefaultMaxShift;
  double min_valid_speed = kMinValidSpeed;

  double match_tolerance = 0.5;              // seconds
  double comparability_tolerance = kTimeMatchTolerance;

  double psd_rate = 10.0;
  WelchSettings welch;
  std::vector<double> contour_factors = kDefaultContourFactors;
};

Config config_from_json(const nlohmann::json& doc);
Config load_config(const std::filesystem::path& path);

/// Full effective configuration, embedded in every output JSON.
nlohmann::json config_to_json(const Config& c);

}  // namespace smoothride::cli
