#include "smoothride/planner.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

#include "smoothride/box_lbfgs.hpp"
#include "smoothride/error.hpp"

namespace smoothride {

nlohmann::json solver_settings_to_json(const SolverSettings& s) {
  return {{"tolerance", s.tolerance},       {"max_iterations", s.max_iterations},
          {"restarts", s.restarts},         {"perturbation", s.perturbation},
          {"seed", s.seed},                 {"memory", s.memory}};
}

SolverSettings solver_settings_from_json(const nlohmann::json& doc) {
  SolverSettings s;
  if (doc.is_null()) return s;
  if (!doc.is_object()) throw ParseError("solver settings must be an object");
  try {
    s.tolerance = doc.value("tolerance", s.tolerance);
    s.max_iterations = doc.value("max_iterations", s.max_iterations);
    s.restarts = doc.value("restarts", s.restarts);
    s.perturbation = doc.value("perturbation", s.perturbation);
    s.seed = doc.value("seed", s.seed);
    s.memory = doc.value("memory", s.memory);
  } catch (const nlohmann::json::type_error& e) {
    throw ParseError(fmt::format("solver settings: {}", e.what()));
  }
  if (s.max_iterations <= 0 || s.restarts < 0 || s.memory <= 0 || !(s.tolerance > 0.0)) {
    throw ValidationError("solver settings out of range");
  }
  return s;
}

void PlanProblem::validate() const {
  objective.validate();
  const Station& first = corridor[0];
  if (initial_speed < first.v_min || initial_speed > first.v_max) {
    throw ValidationError(
        fmt::format("initial speed {} outside [{}, {}] at station 0",
                    initial_speed, first.v_min, first.v_max),
        0);
  }
  if (initial_speed < kSpeedFloor) {
    throw ValidationError(fmt::format("initial speed {} must be >= {} m/s",
                                      initial_speed, kSpeedFloor));
  }
  for (std::size_t k = 0; k < corridor.size(); ++k) {
    if (corridor[k].v_max < kSpeedFloor) {
      throw ValidationError(
          fmt::format("station {}: v_max below {} m/s leaves no moving speed", k,
                      kSpeedFloor),
          k);
    }
  }
}

nlohmann::json plan_result_to_json(const PlanResult& r) {
  return {{"cost", r.cost},
          {"comfort_term", r.comfort_term},
          {"travel_time", r.travel_time},
          {"time_weight", r.time_weight},
          {"time_term", r.time_weight * r.travel_time},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"lateral_offsets", r.plan.lateral_offsets},
          {"speeds", r.plan.speeds}};
}

std::vector<double> center_curvature(const RouteCorridor& corridor) {
  const std::vector<Point2> c = corridor.centers();
  const std::size_t n = c.size();
  const std::vector<double> turns = heading_changes(c);
  std::vector<double> kappa(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double d0 = std::hypot(c[k].x - c[k - 1].x, c[k].y - c[k - 1].y);
    const double d1 = std::hypot(c[k + 1].x - c[k].x, c[k + 1].y - c[k].y);
    kappa[k] = std::abs(turns[k - 1]) / (0.5 * (d0 + d1));
  }
  kappa[0] = kappa[1];
  kappa[n - 1] = kappa[n - 2];
  return kappa;
}

MotionPlan initialize_guess(const PlanProblem& problem,
                            double reference_lateral_accel) {
  const RouteCorridor& corridor = problem.corridor;
  const std::size_t n = corridor.size();
  const std::vector<double> kappa = center_curvature(corridor);
  MotionPlan plan;
  plan.lateral_offsets.assign(n, 0.0);
  plan.speeds.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Station& s = corridor[k];
    const double curve_speed =
        std::sqrt(reference_lateral_accel / std::max(kappa[k], kCurvatureFloor));
    plan.speeds[k] =
        std::clamp(std::min(s.v_max, curve_speed), std::max(s.v_min, kSpeedFloor), s.v_max);
  }
  plan.speeds[0] = problem.initial_speed;
  return plan;
}

namespace {

struct Bounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

Bounds plan_bounds(const PlanProblem& problem) {
  const std::size_t n = problem.corridor.size();
  Bounds b{std::vector<double>(2 * n), std::vector<double>(2 * n)};
  for (std::size_t k = 0; k < n; ++k) {
    const Station& s = problem.corridor[k];
    b.lower[k] = s.y_min;
    b.upper[k] = s.y_max;
    b.lower[n + k] = std::max(s.v_min, kSpeedFloor);
    b.upper[n + k] = s.v_max;
  }
  b.lower[n] = problem.initial_speed;
  b.upper[n] = problem.initial_speed;
  return b;
}

}  // namespace

PlanResult solve_plan(const PlanProblem& problem) {
  problem.validate();
  const PlanObjective objective(problem.corridor, problem.objective);
  const Bounds bounds = plan_bounds(problem);
  const std::size_t dim = objective.dimension();

  ValueAndGradient fg = [&](std::span<const double> x, std::span<double> g) {
    try {
      return objective.evaluate(x, g).cost;
    } catch (const Error&) {
      std::fill(g.begin(), g.end(), 0.0);
      return std::numeric_limits<double>::infinity();
    }
  };

  auto project = [&](std::vector<double> x) {
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = std::clamp(x[i], bounds.lower[i], bounds.upper[i]);
    }
    return x;
  };

  const std::vector<double> guess = project(PlanObjective::pack(initialize_guess(problem)));
  std::vector<std::vector<double>> starts{guess};
  if (problem.warm_start) {
    starts.push_back(project(PlanObjective::pack(*problem.warm_start)));
  }
  std::mt19937_64 rng(problem.solver.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int r = 0; r < problem.solver.restarts; ++r) {
    std::vector<double> x = guess;
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] += problem.solver.perturbation * (bounds.upper[i] - bounds.lower[i]) * unit(rng);
    }
    starts.push_back(project(std::move(x)));
  }

  BoxLbfgsSettings settings;
  settings.memory = problem.solver.memory;
  settings.max_iterations = problem.solver.max_iterations;
  settings.gradient_tolerance = problem.solver.tolerance;

  std::vector<double> best_x = guess;
  double best_value = objective.evaluate(guess).cost;
  bool best_converged = false;
  int best_iterations = 0;
  for (const std::vector<double>& start : starts) {
    BoxLbfgsResult run = minimize_box(fg, start, bounds.lower, bounds.upper, settings);
    if (std::isfinite(run.value) && run.value < best_value) {
      best_value = run.value;
      best_x = std::move(run.x);
      best_converged = run.converged;
      best_iterations = run.iterations;
    } else if (run.value == best_value && !best_converged) {
      best_converged = run.converged;
      best_iterations = run.iterations;
    }
  }

  PlanResult result;
  result.plan = clamp_to_bounds(problem.corridor, objective.unpack(project(best_x)));
  result.plan.speeds[0] = problem.initial_speed;
  result.profile = evaluate_motion(problem.corridor, result.plan);
  result.comfort_term = comfort_term(result.profile, problem.objective);
  result.travel_time = result.profile.total_time;
  result.time_weight = problem.objective.time_weight;
  result.cost = result.comfort_term + result.time_weight * result.travel_time;
  result.converged = best_converged;
  result.iterations = best_iterations;
  return result;
}

MatchResult match_travel_time(const RouteCorridor& corridor,
                              const ObjectiveConfig& objective,
                              double initial_speed, double target_time,
                              double time_tolerance,
                              const SolverSettings& solver) {
  if (!(target_time > 0.0)) throw DomainError("target time must be > 0");
  if (!(time_tolerance > 0.0)) throw DomainError("time tolerance must be > 0");

  PlanProblem problem{corridor, objective, initial_speed, solver, std::nullopt};
  auto solve_at = [&](double log_w, const std::optional<MotionPlan>& warm) {
    problem.objective.time_weight = std::pow(10.0, log_w);
    problem.warm_start = warm;
    return solve_plan(problem);
  };

  double lo = kLogWeightLow;
  double hi = kLogWeightHigh;
  PlanResult slow = solve_at(lo, std::nullopt);
  PlanResult fast = solve_at(hi, std::nullopt);

  MatchResult out;
  out.min_time = fast.travel_time;
  out.max_time = slow.travel_time;
  if (target_time > slow.travel_time + time_tolerance ||
      target_time < fast.travel_time - time_tolerance) {
    throw BracketError(
        fmt::format("target {:.3f} s outside achievable range [{:.3f}, {:.3f}] s",
                    target_time, fast.travel_time, slow.travel_time),
        fast.travel_time, slow.travel_time);
  }

  auto consider = [&](const PlanResult& r, double log_w) {
    const double err = std::abs(r.travel_time - target_time);
    if (out.result.profile.size() == 0 ||
        err < std::abs(out.result.travel_time - target_time)) {
      out.result = r;
      out.time_weight = std::pow(10.0, log_w);
    }
  };
  consider(slow, lo);
  consider(fast, hi);

  for (int it = 0; it < kMaxBisections; ++it) {
    if (std::abs(out.result.travel_time - target_time) <= time_tolerance) break;
    const double mid = 0.5 * (lo + hi);
    PlanResult r = solve_at(mid, out.result.plan);
    out.bisection_iterations = it + 1;
    consider(r, mid);
    if (r.travel_time > target_time) {
      lo = mid;  // too slow: weigh time more
    } else {
      hi = mid;
    }
  }
  out.matched = std::abs(out.result.travel_time - target_time) <= time_tolerance;
  return out;
}

std::vector<SweepRow> sweep_time_weight(const RouteCorridor& corridor,
                                        const ObjectiveConfig& objective,
                                        double initial_speed,
                                        const std::vector<double>& weights,
                                        const SolverSettings& solver, int jobs) {
  if (weights.empty()) throw ValidationError("sweep: empty weight grid");
  for (double w : weights) {
    if (!(w >= 0.0)) throw ValidationError(fmt::format("sweep: invalid weight {}", w));
  }
  std::vector<SweepRow> rows(weights.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < weights.size(); i = next++) {
      SweepRow& row = rows[i];
      row.time_weight = weights[i];
      try {
        PlanProblem problem{corridor, objective, initial_speed, solver, std::nullopt};
        problem.objective.time_weight = weights[i];
        const PlanResult r = solve_plan(problem);
        row.travel_time = r.travel_time;
        row.comfort = r.comfort_term;
        row.cost = r.cost;
        row.converged = r.converged;
      } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
      }
    }
  };
  const int n_threads =
      std::clamp(jobs, 1, static_cast<int>(weights.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return rows;
}

bool is_nondominated(const std::vector<SweepRow>& rows, double noise) {
  for (const SweepRow& a : rows) {
    if (a.failed) continue;
    for (const SweepRow& b : rows) {
      if (&a == &b || b.failed) continue;
      const bool better_time = b.travel_time < a.travel_time - noise;
      const bool better_comfort = b.comfort < a.comfort - noise;
      const bool no_worse_time = b.travel_time <= a.travel_time + noise;
      const bool no_worse_comfort = b.comfort <= a.comfort + noise;
      if (no_worse_time && no_worse_comfort && (better_time || better_comfort)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace smoothride
