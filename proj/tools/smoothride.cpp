// smoothride: batch frontend for planning, reconstruction and comparison.
//
// Exit codes: 0 success, 1 convergence or comparability failure,
// 2 usage, parse or validation error.

#include <fmt/core.h>
#include <fmt/os.h>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cli_config.hpp"
#include "smoothride/error.hpp"
#include "smoothride/kinematics.hpp"
#include "smoothride/metrics.hpp"
#include "smoothride/planner.hpp"
#include "smoothride/reconstruction.hpp"
#include "smoothride/route.hpp"
#include "smoothride/scenarios.hpp"
#include "smoothride/sensor_log.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace smoothride::cli {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int jobs = 1;
};

Config effective_config(const Globals& g) {
  Config c = g.config_path.empty() ? Config{} : load_config(g.config_path);
  if (g.seed) c.solver.seed = *g.seed;
  return c;
}

fs::path output_dir(const Globals& g) {
  const fs::path dir(g.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ValidationError(fmt::format("output directory {} is not writable", dir.string()));
  }
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw ValidationError(fmt::format("cannot write {}", path.string()));
  out << doc.dump(2) << '\n';
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double initial_speed_for(const RouteCorridor& route, std::optional<double> v0) {
  if (v0) return *v0;
  const Station& s = route[0];
  return 0.5 * (s.v_min + s.v_max);
}

json match_to_json(const MatchResult& m) {
  return {{"time_weight", m.time_weight},
          {"bisection_iterations", m.bisection_iterations},
          {"matched", m.matched},
          {"min_time", m.min_time},
          {"max_time", m.max_time},
          {"result", plan_result_to_json(m.result)}};
}

json cost_to_json(const CostBreakdown& c) {
  return {{"gps_term", c.gps_term},
          {"imu_term", c.imu_term},
          {"regularization_term", c.regularization_term},
          {"j_gps", c.j_gps},
          {"j_imu", c.j_imu},
          {"objective", c.objective()}};
}

// ---- reconstruct ---------------------------------------------------------

struct ReconstructArgs {
  std::string gps, imu, outage, truth;
  bool no_align = false;
};

int cmd_reconstruct(const Globals& g, const ReconstructArgs& a) {
  const Config cfg = effective_config(g);
  SensorLog log = read_sensor_log(a.gps, a.imu);
  if (!a.outage.empty()) apply_outage_json(log, read_json_file(a.outage));
  log.validate();

  json alignment = nullptr;
  if (cfg.align && !a.no_align) {
    const AlignmentResult al = align_imu(log, cfg.max_shift);
    alignment = {{"shift_s", al.shift},
                 {"correlation", al.correlation},
                 {"edge_warning", al.edge_warning}};
    if (al.edge_warning) {
      fmt::print(stderr, "warning: IMU lag estimate {:.3f} s sits at the search edge\n", al.shift);
    }
    log = al.log;
  }

  const ReconstructionResult r = reconstruct(log, cfg.weights, cfg.reconstruction);
  const RunValidity validity = validate_run(r.profile, cfg.min_valid_speed);

  json doc{{"config", config_to_json(cfg)},
           {"inputs", {{"gps", a.gps}, {"imu", a.imu}, {"outage", a.outage}}},
           {"alignment", alignment},
           {"grid", {{"sample_time_s", r.grid.Ts}, {"samples", r.grid.size()}}},
           {"converged", r.converged},
           {"iterations", r.iterations},
           {"initial_cost", cost_to_json(r.initial_cost)},
           {"cost", cost_to_json(r.cost)},
           {"energy_reconstructed", r.energy_reconstructed},
           {"energy_raw_imu", r.energy_raw_imu},
           {"energy_reduction_percent", r.energy_reduction_percent},
           {"travel_time", r.profile.total_time},
           {"validity", validity_to_json(validity)}};

  if (!a.truth.empty()) {
    const MotionProfile truth = read_profile_csv(a.truth);
    if (truth.size() != r.profile.size()) {
      throw DimensionError(fmt::format("{}: {} rows but the reconstruction has {} samples",
                                       a.truth, truth.size(), r.profile.size()));
    }
    double sp = 0.0, sv = 0.0, sa = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k) {
      sp += std::pow(r.profile.points[k].x - truth.points[k].x, 2) +
            std::pow(r.profile.points[k].y - truth.points[k].y, 2);
      sv += std::pow(r.profile.speeds[k] - truth.speeds[k], 2);
    }
    for (std::size_t k = 0; k < truth.segments(); ++k) {
      sa += std::pow(r.profile.ax[k] - truth.ax[k], 2) + std::pow(r.profile.ay[k] - truth.ay[k], 2);
    }
    const auto n = static_cast<double>(truth.size());
    doc["truth"] = {{"file", a.truth},
                    {"position_rms", std::sqrt(sp / n)},
                    {"speed_rms", std::sqrt(sv / n)},
                    {"acceleration_rms", std::sqrt(sa / static_cast<double>(truth.segments()))}};
  }

  const fs::path dir = output_dir(g);
  write_profile_csv(r.profile, dir / "profile.csv");
  write_json(dir / "reconstruction.json", doc);
  fmt::print("reconstruct: {} samples, {} iterations, reduction {:.2f}%, valid {}\n",
             r.grid.size(), r.iterations, r.energy_reduction_percent, validity.valid);
  if (!r.converged) {
    fmt::print(stderr, "error: reconstruction did not converge in {} iterations\n", r.iterations);
    return kExitFailure;
  }
  return kExitOk;
}

// ---- plan / match-time ----------------------------------------------------

struct PlanArgs {
  std::string route;
  std::string objective;
  std::optional<double> time_weight;
  std::optional<double> target_time;
  std::optional<double> v0;
};

ObjectiveConfig objective_for(const Config& cfg, const PlanArgs& a) {
  ObjectiveConfig oc = cfg.objective;
  if (!a.objective.empty()) oc.variant = parse_variant(a.objective);
  if (a.time_weight) oc.time_weight = *a.time_weight;
  oc.validate();
  return oc;
}

int cmd_plan(const Globals& g, const PlanArgs& a) {
  const Config cfg = effective_config(g);
  const RouteCorridor route = load_route(a.route);
  const ObjectiveConfig oc = objective_for(cfg, a);
  const double v0 = initial_speed_for(route, a.v0);
  json doc{{"config", config_to_json(cfg)}, {"route", a.route}, {"initial_speed", v0}};
  doc["config"]["objective"]["variant"] = variant_name(oc.variant);
  doc["config"]["objective"]["time_weight"] = oc.time_weight;

  PlanResult result;
  if (a.target_time) {
    const MatchResult m =
        match_travel_time(route, oc, v0, *a.target_time, cfg.match_tolerance, cfg.solver);
    result = m.result;
    doc["target_time"] = *a.target_time;
    doc["match"] = match_to_json(m);
    doc["match"].erase("result");
    doc["config"]["objective"]["time_weight"] = m.time_weight;
  } else {
    PlanProblem problem{route, oc, v0, cfg.solver, std::nullopt};
    result = solve_plan(problem);
  }
  doc["result"] = plan_result_to_json(result);

  const fs::path dir = output_dir(g);
  write_json(dir / "plan.json", doc);
  write_profile_csv(result.profile, dir / "profile.csv");
  fmt::print("plan: W {:.6g}, travel time {:.3f} s, comfort {:.6g}, converged {}\n",
             result.time_weight, result.travel_time, result.comfort_term, result.converged);
  return result.converged ? kExitOk : kExitFailure;
}

int cmd_match_time(const Globals& g, const PlanArgs& a) {
  const Config cfg = effective_config(g);
  const RouteCorridor route = load_route(a.route);
  const ObjectiveConfig oc = objective_for(cfg, a);
  const double v0 = initial_speed_for(route, a.v0);
  const MatchResult m =
      match_travel_time(route, oc, v0, *a.target_time, cfg.match_tolerance, cfg.solver);

  json doc{{"config", config_to_json(cfg)},
           {"route", a.route},
           {"initial_speed", v0},
           {"target_time", *a.target_time},
           {"match", match_to_json(m)}};
  doc["config"]["objective"]["variant"] = variant_name(oc.variant);
  const fs::path dir = output_dir(g);
  write_json(dir / "match.json", doc);
  write_profile_csv(m.result.profile, dir / "profile.csv");
  fmt::print("match-time: W {:.6g} after {} bisections, travel time {:.3f} s (target {:.3f} s)\n",
             m.time_weight, m.bisection_iterations, m.result.travel_time, *a.target_time);
  if (!m.matched) {
    fmt::print(stderr, "error: travel time not matched within {:.3f} s\n", cfg.match_tolerance);
    return kExitFailure;
  }
  return m.result.converged ? kExitOk : kExitFailure;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string human;
  std::string route;
  std::string objective = "ma";
};

json band_summary(const Spectrum& s) {
  const double nyquist = s.frequency.back();
  const double split = std::min(0.2, nyquist);
  return {{"total", integrated_density(s)},
          {"below_0_2_hz", band_energy(s, s.frequency.front(), split)},
          {"above_0_2_hz", split < nyquist ? band_energy(s, split, nyquist) : 0.0}};
}

json write_psds(const Config& cfg, const MotionProfile& p, const std::string& tag,
                const fs::path& dir) {
  if (p.total_time < kMinPsdDuration) {
    return {{"skipped", fmt::format("profile lasts {:.3f} s, PSD needs {:.0f} s", p.total_time,
                                    kMinPsdDuration)}};
  }
  json out = json::object();
  for (Axis axis : {Axis::longitudinal, Axis::lateral}) {
    const Spectrum s = psd(p, axis, cfg.psd_rate, cfg.welch);
    const std::string name = fmt::format("psd_{}_{}.csv", tag, axis_name(axis));
    write_spectrum_csv(s, dir / name);
    json summary = band_summary(s);
    summary["file"] = name;
    out[std::string(axis_name(axis))] = summary;
  }
  return out;
}

int cmd_compare(const Globals& g, const CompareArgs& a) {
  const Config cfg = effective_config(g);
  const MotionProfile human = read_profile_csv(a.human);
  const RouteCorridor route = load_route(a.route);
  const ObjectiveVariant variant = parse_variant(a.objective);
  const double v0 = human.speeds.front();
  const double target = human.total_time;

  ObjectiveConfig ma = cfg.objective;
  ma.variant = ObjectiveVariant::ma;
  const MatchResult ma_match =
      match_travel_time(route, ma, v0, target, cfg.match_tolerance, cfg.solver);
  std::optional<MatchResult> ms_match;
  if (variant == ObjectiveVariant::ms) {
    ObjectiveConfig ms = cfg.objective;
    ms.variant = ObjectiveVariant::ms;
    ms_match = match_travel_time(route, ms, v0, target, cfg.match_tolerance, cfg.solver);
  }

  const ComparisonReport report = compare_profiles(
      human, ma_match.result.profile, ms_match ? &ms_match->result.profile : nullptr,
      cfg.objective.filter, cfg.objective.cooldown, cfg.comparability_tolerance);

  const fs::path dir = output_dir(g);
  json doc{{"config", config_to_json(cfg)},
           {"human", a.human},
           {"route", a.route},
           {"objective", variant_name(variant)},
           {"initial_speed", v0},
           {"target_time", target},
           {"report", comparison_report_to_json(report)}};
  doc["ma_match"] = match_to_json(ma_match);
  doc["ma_match"].erase("result");
  doc["ma_match"]["plan"] = plan_result_to_json(ma_match.result);
  write_profile_csv(ma_match.result.profile, dir / "plan_ma.csv");
  if (ms_match) {
    doc["ms_match"] = match_to_json(*ms_match);
    doc["ms_match"].erase("result");
    doc["ms_match"]["plan"] = plan_result_to_json(ms_match->result);
    write_profile_csv(ms_match->result.profile, dir / "plan_ms.csv");
  }
  doc["psd"] = {{"human", write_psds(cfg, human, "human", dir)},
                {"plan_ma", write_psds(cfg, ma_match.result.profile, "plan_ma", dir)}};
  if (ms_match) doc["psd"]["plan_ms"] = write_psds(cfg, ms_match->result.profile, "plan_ms", dir);
  write_json(dir / "comparison.json", doc);

  fmt::print("compare: travel time human {:.3f} s, planner {:.3f} s, deficiency MA {:.2f}%",
             report.travel_time_human, report.travel_time_planner, report.deficiency_ma);
  if (report.deficiency_ms) fmt::print(", MS {:.2f}%", *report.deficiency_ms);
  fmt::print("\n");
  const bool converged = ma_match.result.converged && (!ms_match || ms_match->result.converged);
  return converged ? kExitOk : kExitFailure;
}

// ---- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string route;
  std::string objective;
  std::vector<std::string> grid;
  std::optional<double> v0;
};

std::vector<double> parse_grid(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const std::string& item : items) {
    if (item.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t used = 0;
    double w = 0.0;
    try {
      w = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || item.find_first_not_of(" \t", used) != std::string::npos) {
      throw ValidationError(fmt::format("sweep: \"{}\" is not a number", item));
    }
    out.push_back(w);
  }
  if (out.empty()) throw ValidationError("sweep: --w-grid is empty");
  return out;
}

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const std::vector<double> weights = parse_grid(a.grid);
  const Config cfg = effective_config(g);
  const RouteCorridor route = load_route(a.route);
  ObjectiveConfig oc = cfg.objective;
  if (!a.objective.empty()) oc.variant = parse_variant(a.objective);
  const double v0 = initial_speed_for(route, a.v0);

  const std::vector<SweepRow> rows =
      sweep_time_weight(route, oc, v0, weights, cfg.solver, g.jobs);

  const fs::path dir = output_dir(g);
  {
    auto out = fmt::output_file((dir / "pareto.csv").string());
    out.print("W,travel_time,comfort_term,converged\n");
    for (const SweepRow& r : rows) {
      out.print("{:.9g},{:.9g},{:.9g},{}\n", r.time_weight, r.travel_time, r.comfort,
                r.converged ? 1 : 0);
    }
  }

  std::vector<SweepRow> usable;
  for (const SweepRow& r : rows) {
    if (r.converged && !r.failed) usable.push_back(r);
  }
  std::vector<FrontierPoint> frontier;
  for (const SweepRow& r : usable) {
    const bool dominated = std::any_of(usable.begin(), usable.end(), [&](const SweepRow& o) {
      return o.travel_time <= r.travel_time && o.comfort <= r.comfort &&
             (o.travel_time < r.travel_time || o.comfort < r.comfort);
    });
    if (!dominated) frontier.push_back({r.travel_time, r.comfort});
  }
  std::sort(frontier.begin(), frontier.end(),
            [](const FrontierPoint& p, const FrontierPoint& q) { return p.travel_time < q.travel_time; });
  write_contour_csv(discomfort_contours(frontier, cfg.contour_factors), dir / "contours.csv");

  json table = json::array();
  std::size_t converged = 0;
  for (const SweepRow& r : rows) {
    converged += r.converged ? 1 : 0;
    json row{{"time_weight", r.time_weight}, {"travel_time", r.travel_time},
             {"comfort_term", r.comfort},    {"cost", r.cost},
             {"converged", r.converged},     {"failed", r.failed}};
    if (r.failed) row["error"] = r.error;
    table.push_back(row);
  }
  json doc{{"config", config_to_json(cfg)},
           {"route", a.route},
           {"initial_speed", v0},
           {"rows", table},
           {"nondominated", is_nondominated(usable)},
           {"converged", converged}};
  doc["config"]["objective"]["variant"] = variant_name(oc.variant);
  write_json(dir / "sweep.json", doc);

  fmt::print("sweep: {} of {} weights converged\n", converged, rows.size());
  return 5 * converged >= 4 * rows.size() ? kExitOk : kExitFailure;
}

// ---- psd -------------------------------------------------------------------

struct PsdArgs {
  std::string profile;
  std::string axis = "both";
  std::optional<double> rate;
};

int cmd_psd(const Globals& g, const PsdArgs& a) {
  Config cfg = effective_config(g);
  if (a.rate) cfg.psd_rate = *a.rate;
  if (!(cfg.psd_rate > 0.0)) throw ValidationError("psd: --rate must be > 0");
  const MotionProfile profile = read_profile_csv(a.profile);
  std::vector<Axis> axes;
  if (a.axis == "both") {
    axes = {Axis::longitudinal, Axis::lateral};
  } else {
    axes = {parse_axis(a.axis)};
  }

  const fs::path dir = output_dir(g);
  json doc{{"config", config_to_json(cfg)}, {"profile", a.profile}};
  const UniformSeries series = resample_uniform(profile, cfg.psd_rate);
  for (Axis axis : axes) {
    const Spectrum s = psd(profile, axis, cfg.psd_rate, cfg.welch);
    const std::string name = fmt::format("psd_{}.csv", axis_name(axis));
    write_spectrum_csv(s, dir / name);
    json summary = band_summary(s);
    summary["file"] = name;
    summary["mean_square"] =
        mean_square(axis == Axis::longitudinal ? series.ax : series.ay);
    doc[std::string(axis_name(axis))] = summary;
  }
  write_json(dir / "psd.json", doc);
  fmt::print("psd: wrote {} spectra to {}\n", axes.size(), dir.string());
  return kExitOk;
}

// ---- validate --------------------------------------------------------------

struct ValidateArgs {
  std::string profile;
  std::string route;
  std::optional<double> min_speed;
};

int cmd_validate(const Globals& g, const ValidateArgs& a) {
  const Config cfg = effective_config(g);
  json doc{{"config", config_to_json(cfg)}};
  if (!a.route.empty()) {
    const RouteCorridor route = load_route(a.route);
    doc["route"] = {{"file", a.route}, {"stations", route.size()}, {"valid", true}};
    fmt::print("validate: route {} ok ({} stations)\n", a.route, route.size());
  }
  if (!a.profile.empty()) {
    const MotionProfile profile = read_profile_csv(a.profile);
    const RunValidity v = validate_run(profile, a.min_speed.value_or(cfg.min_valid_speed));
    doc["profile"] = {{"file", a.profile},
                      {"travel_time", profile.total_time},
                      {"validity", validity_to_json(v)}};
    fmt::print("validate: profile {} valid {}", a.profile, v.valid);
    for (const std::string& r : v.reasons) fmt::print(" ({})", r);
    fmt::print("\n");
  }
  write_json(output_dir(g) / "validation.json", doc);
  return kExitOk;
}

// ---- synth -----------------------------------------------------------------

struct SynthArgs {
  std::string kind;
  double duration = 120.0;
  double gps_sigma = 0.0;
  double imu_sigma = 0.0;
  double imu_lag = 0.0;
  std::vector<double> outage;
  std::optional<double> target_time;
};

void write_truth_csv(const scenarios::TruthTrack& tr, const fs::path& path) {
  auto out = fmt::output_file(path.string());
  out.print("t,x,y,v,ax,ay\n");
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    out.print("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", tr.t[k], tr.x[k], tr.y[k],
              tr.speed[k], tr.ax[k], tr.ay[k]);
  }
}

int cmd_synth(const Globals& g, const SynthArgs& a) {
  const fs::path dir = output_dir(g);
  if (a.kind == "roundabout" || a.kind == "toy-corner") {
    const RouteCorridor route =
        a.kind == "roundabout" ? scenarios::roundabout_route() : scenarios::toy_corner();
    save_route(route, dir / "route.json");
    fmt::print("synth: {} route with {} stations\n", a.kind, route.size());
  } else if (a.kind == "human") {
    const RouteCorridor route = scenarios::roundabout_route();
    const MotionPlan plan = scenarios::human_like_plan(
        route, {}, a.target_time.value_or(scenarios::kHumanTravelTime));
    const MotionProfile profile = evaluate_motion(route, plan);
    save_route(route, dir / "route.json");
    write_profile_csv(profile, dir / "human.csv");
    fmt::print("synth: human-like run, {:.3f} s\n", profile.total_time);
  } else if (a.kind == "drive" || a.kind == "exact") {
    scenarios::SyntheticLog syn;
    if (a.kind == "drive") {
      scenarios::SyntheticLogSettings st;
      st.duration = a.duration;
      st.gps_sigma = a.gps_sigma;
      st.imu_sigma = a.imu_sigma;
      st.imu_lag = a.imu_lag;
      st.seed = g.seed.value_or(0);
      if (!a.outage.empty()) {
        if (a.outage.size() != 2) throw ValidationError("synth: --outage takes START END");
        st.outage = TimeWindow{a.outage[0], a.outage[1]};
      }
      syn = scenarios::synthetic_drive(st);
    } else {
      const double Ts = 0.1;
      const ReconstructionVariables vars = scenarios::drive_variables(a.duration, Ts);
      syn.log = scenarios::exact_model_log(vars, Ts);
      const PredictedMotion pm = predict_motion(vars, Ts);
      syn.truth.Ts = Ts;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        const std::size_t j = std::min(k, vars.size() - 2);
        syn.truth.t.push_back(static_cast<double>(k) * Ts);
        syn.truth.x.push_back(pm.positions[k].x);
        syn.truth.y.push_back(pm.positions[k].y);
        syn.truth.heading.push_back(vars.headings[k]);
        syn.truth.speed.push_back(vars.speeds[k]);
        syn.truth.ax.push_back(k + 1 < vars.size() ? pm.ax[j] : 0.0);
        syn.truth.ay.push_back(k + 1 < vars.size() ? pm.ay[j] : 0.0);
      }
    }
    write_sensor_log(syn.log, dir / "gps.csv", dir / "imu.csv");
    write_json(dir / "outage.json", outage_json(syn.log));
    write_truth_csv(syn.truth, dir / "truth.csv");
    fmt::print("synth: {} log, {} GPS and {} IMU samples\n", a.kind, syn.log.gps.size(),
               syn.log.imu.size());
  } else {
    throw ValidationError(fmt::format("synth: unknown kind \"{}\"", a.kind));
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Comfort-oriented motion planning and motion reconstruction"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "JSON configuration file")
      ->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Random seed for solver restarts and synthetic data");
  app.add_option("--out", g.out_dir, "Output directory")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.fallthrough();

  ReconstructArgs rec;
  auto* c_rec = app.add_subcommand("reconstruct", "Reconstruct a motion profile from GPS + IMU");
  c_rec->add_option("--gps", rec.gps, "GPS CSV (t,x,y,valid)")->required();
  c_rec->add_option("--imu", rec.imu, "IMU CSV (t,ax,ay)")->required();
  c_rec->add_option("--outage", rec.outage, "Outage windows JSON");
  c_rec->add_option("--truth", rec.truth, "Ground-truth profile CSV for RMS diagnostics");
  c_rec->add_flag("--no-align", rec.no_align, "Skip IMU time-offset estimation");

  PlanArgs plan;
  auto* c_plan = app.add_subcommand("plan", "Plan a motion profile along a route");
  c_plan->add_option("--route", plan.route, "Route JSON")->required();
  c_plan->add_option("--objective", plan.objective, "ma or ms")
      ->check(CLI::IsMember({"ma", "ms"}));
  auto* w_opt = c_plan->add_option("--time-weight", plan.time_weight, "Weight W on travel time");
  auto* t_opt = c_plan->add_option("--target-time", plan.target_time, "Travel time to match");
  w_opt->excludes(t_opt);
  c_plan->add_option("--v0", plan.v0, "Initial speed (m/s)");

  PlanArgs match;
  auto* c_match = app.add_subcommand("match-time", "Find the time weight matching a travel time");
  c_match->add_option("--route", match.route, "Route JSON")->required();
  c_match->add_option("--objective", match.objective, "ma or ms")
      ->check(CLI::IsMember({"ma", "ms"}));
  c_match->add_option("--target-time", match.target_time, "Travel time to match")->required();
  c_match->add_option("--v0", match.v0, "Initial speed (m/s)");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare", "Compare a driven profile with time-matched plans");
  c_cmp->add_option("--human", cmp.human, "Driven profile CSV")->required();
  c_cmp->add_option("--route", cmp.route, "Route JSON")->required();
  c_cmp->add_option("--objective", cmp.objective, "ma, or ms to add the weighted comparison")
      ->check(CLI::IsMember({"ma", "ms"}))
      ->capture_default_str();

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Sweep the time weight and write the frontier");
  c_sweep->add_option("--route", sweep.route, "Route JSON")->required();
  c_sweep->add_option("--objective", sweep.objective, "ma or ms")
      ->check(CLI::IsMember({"ma", "ms"}));
  c_sweep->add_option("--w-grid", sweep.grid, "Time weights, comma separated")
      ->delimiter(',')
      ->required()
      ->expected(0, -1);
  c_sweep->add_option("--v0", sweep.v0, "Initial speed (m/s)");

  PsdArgs psd_args;
  auto* c_psd = app.add_subcommand("psd", "Welch PSD of a profile's accelerations");
  c_psd->add_option("--profile", psd_args.profile, "Profile CSV")->required();
  c_psd->add_option("--axis", psd_args.axis, "longitudinal, lateral or both")
      ->capture_default_str();
  c_psd->add_option("--rate", psd_args.rate, "Resampling rate (Hz)");

  ValidateArgs val;
  auto* c_val = app.add_subcommand("validate", "Check a route file or a run's validity");
  c_val->add_option("--profile", val.profile, "Profile CSV");
  c_val->add_option("--route", val.route, "Route JSON");
  c_val->add_option("--min-speed", val.min_speed, "Validity speed threshold (m/s)");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth", "Write synthetic fixtures");
  c_syn->add_option("--kind", syn.kind, "roundabout, toy-corner, human, drive or exact")
      ->required()
      ->check(CLI::IsMember({"roundabout", "toy-corner", "human", "drive", "exact"}));
  c_syn->add_option("--duration", syn.duration, "Log duration (s)")->capture_default_str();
  c_syn->add_option("--gps-sigma", syn.gps_sigma, "GPS noise (m)");
  c_syn->add_option("--imu-sigma", syn.imu_sigma, "IMU noise (m/s^2)");
  c_syn->add_option("--imu-lag", syn.imu_lag, "IMU timestamp lag (s)");
  c_syn->add_option("--outage", syn.outage, "GPS outage START END (s)")->expected(2);
  c_syn->add_option("--target-time", syn.target_time, "Human run travel time (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_rec->parsed()) return cmd_reconstruct(g, rec);
    if (c_plan->parsed()) return cmd_plan(g, plan);
    if (c_match->parsed()) return cmd_match_time(g, match);
    if (c_cmp->parsed()) return cmd_compare(g, cmp);
    if (c_sweep->parsed()) return cmd_sweep(g, sweep);
    if (c_psd->parsed()) return cmd_psd(g, psd_args);
    if (c_val->parsed()) {
      if (val.profile.empty() && val.route.empty()) {
        throw ValidationError("validate: give --profile and/or --route");
      }
      return cmd_validate(g, val);
    }
    if (c_syn->parsed()) return cmd_synth(g, syn);
  } catch (const BracketError& e) {
    fmt::print(stderr, "error: {} (reachable travel times [{:.3f}, {:.3f}] s)\n", e.what(),
               e.min_time(), e.max_time());
    return kExitFailure;
  } catch (const ComparabilityError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitFailure;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace smoothride::cli

int main(int argc, char** argv) { return smoothride::cli::run(argc, argv); }
