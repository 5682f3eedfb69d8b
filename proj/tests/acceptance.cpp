// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <string>

#include "oracles.hpp"
#include "smoothride/metrics.hpp"
#include "smoothride/objectives.hpp"
#include "smoothride/planner.hpp"
#include "smoothride/reconstruction.hpp"
#include "smoothride/scenarios.hpp"
#include "smoothride/sickness_filter.hpp"

using namespace smoothride;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

PlanProblem toy_problem(ObjectiveVariant variant) {
  PlanProblem p{scenarios::toy_corner(), {}, scenarios::kToyInitialSpeed, {}, std::nullopt};
  p.objective.variant = variant;
  p.objective.time_weight = scenarios::kToyTimeWeight;
  return p;
}

Outcome filter_exactness() {
  const FilterSpec spec{0.796, 7.96};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> step(0.05, 0.5), accel(-3.0, 3.0);
  std::uniform_int_distribution<int> length(5, 200);
  double worst = 0.0, elapsed = 0.0;
  for (int s = 0; s < 50; ++s) {
    std::vector<double> u(static_cast<std::size_t>(length(rng))), dt(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
      u[k] = accel(rng);
      dt[k] = step(rng);
    }
    const auto t0 = Clock::now();
    const FilteredSeries f = filter_sequence(spec, u, dt, kDefaultCooldown);
    elapsed += seconds_since(t0);
    const oracle::Filtered o = oracle::filter(spec.tau1, spec.tau2, u, dt, kDefaultCooldown);
    worst = std::max(worst, oracle::relative_error(f.output, o.output));
    if (f.tail_output.size() != o.tail.size()) return {false, "tail length differs"};
    worst = std::max(worst, oracle::relative_error(f.tail_output, o.tail));
  }
  return {worst <= 1e-9 && elapsed < 1.0,
          fmt::format("max relative error {:.2e} (limit 1e-9), {:.4f} s (limit 1 s)", worst, elapsed)};
}

Outcome transfer_identity() {
  const FilterSpec spec = FilterSpec::defaults();
  const ContinuousModel m = continuous_matrices(spec);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> logf(-3.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const std::complex<double> s(0.0, 2.0 * oracle::kPi * std::pow(10.0, logf(rng)));
    worst = std::max(worst, std::abs(state_space_response(m, s) -
                                     oracle::transfer(spec.tau1, spec.tau2, s)));
  }
  return {worst < 1e-10, fmt::format("max |C(sI-A)^-1 B - H(s)| {:.2e} (limit 1e-10)", worst)};
}

oracle::GridProblem toy_grid(const PlanProblem& p, std::size_t levels) {
  oracle::GridProblem g;
  const RouteCorridor& c = p.corridor;
  for (std::size_t k = 0; k < c.size(); ++k) {
    g.cx.push_back(c[k].center_x);
    g.cy.push_back(c[k].center_y);
    g.axis.push_back(c[k].lateral_axis_angle);
    g.offsets.push_back(c[k].y_min == c[k].y_max
                            ? std::vector<double>{c[k].y_min}
                            : oracle::linspace(c[k].y_min, c[k].y_max, levels));
    g.speeds.push_back(k == 0 ? std::vector<double>{p.initial_speed}
                              : oracle::linspace(c[k].v_min, c[k].v_max, levels));
  }
  g.time_weight = p.objective.time_weight;
  g.weighted = p.objective.variant == ObjectiveVariant::ms;
  g.tau1 = p.objective.filter.tau1;
  g.tau2 = p.objective.filter.tau2;
  g.cooldown = p.objective.cooldown;
  return g;
}

Outcome toy_optimality() {
  const auto t0 = Clock::now();
  bool ok = true;
  std::string detail;
  for (ObjectiveVariant v : {ObjectiveVariant::ma, ObjectiveVariant::ms}) {
    const PlanProblem p = toy_problem(v);
    const PlanResult r = solve_plan(p);
    const double grid = oracle::grid_minimum(toy_grid(p, 9));
    ok = ok && r.cost <= grid + 1e-3;
    detail += fmt::format("{} solver {:.6f} grid {:.6f}; ", variant_name(v), r.cost, grid);
  }
  const double elapsed = seconds_since(t0);
  ok = ok && elapsed < 60.0;
  return {ok, detail + fmt::format("{:.2f} s (limit 60 s)", elapsed)};
}

Outcome gradients() {
  double worst = 0.0;
  for (ObjectiveVariant v : {ObjectiveVariant::ma, ObjectiveVariant::ms}) {
    const PlanProblem p = toy_problem(v);
    const PlanObjective obj(p.corridor, p.objective);
    const RouteCorridor& c = p.corridor;
    std::mt19937_64 rng(static_cast<unsigned>(v) + 3);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> x(obj.dimension());
      for (std::size_t k = 0; k < c.size(); ++k) {
        x[k] = std::uniform_real_distribution<double>(c[k].y_min, c[k].y_max)(rng);
        x[c.size() + k] = std::uniform_real_distribution<double>(c[k].v_min, c[k].v_max)(rng);
      }
      std::vector<double> g(obj.dimension());
      obj.evaluate(x, g);
      const auto fd = oracle::fd_gradient(
          [&](std::span<const double> q) { return obj.evaluate(q).cost; }, x, 1e-6);
      worst = std::max(worst, oracle::relative_error(g, fd));
    }
  }
  return {worst < 1e-4, fmt::format("max relative error {:.2e} (limit 1e-4)", worst)};
}

Outcome time_matching() {
  const RouteCorridor route = scenarios::roundabout_route();
  const double v0 = scenarios::human_like_plan(route).speeds.front();
  const ObjectiveConfig obj;
  auto time_at = [&](double w) {
    ObjectiveConfig o = obj;
    o.time_weight = w;
    return solve_plan({route, o, v0, {}, std::nullopt}).travel_time;
  };
  const double t_min = time_at(std::pow(10.0, kLogWeightHigh));
  const double t_max = time_at(std::pow(10.0, kLogWeightLow));
  bool ok = true;
  double worst_gap = 0.0;
  int worst_iter = 0;
  for (int i = 0; i < 10; ++i) {
    const double target = t_min + (t_max - t_min) * (i + 0.5) / 10.0;
    const MatchResult m = match_travel_time(route, obj, v0, target);
    const double gap = std::abs(m.result.travel_time - target);
    worst_gap = std::max(worst_gap, gap);
    worst_iter = std::max(worst_iter, m.bisection_iterations);
    ok = ok && m.matched && gap <= 0.5 && m.bisection_iterations <= kMaxBisections;
  }
  return {ok, fmt::format("targets in [{:.2f}, {:.2f}] s; max miss {:.3f} s (limit 0.5), "
                          "max {} iterations (limit 40)",
                          t_min, t_max, worst_gap, worst_iter)};
}

Outcome reconstruction_recovery() {
  scenarios::SyntheticLogSettings st;
  st.gps_sigma = 0.3;
  st.imu_sigma = 0.05;
  st.imu_lag = 0.13;
  st.outage = TimeWindow{50.0, 65.0};
  st.seed = 7;
  const auto syn = scenarios::synthetic_drive(st);
  const AlignmentResult al = align_imu(syn.log);
  const ReconstructionResult r = reconstruct(al.log);
  double se = 0.0;
  for (std::size_t k = 0; k < r.profile.segments(); ++k) {
    se += std::pow(r.profile.ax[k] - syn.truth.ax[k], 2) + std::pow(r.profile.ay[k] - syn.truth.ay[k], 2);
  }
  const double rms = std::sqrt(se / static_cast<double>(r.profile.segments()));
  double jump = 0.0;
  for (double edge : {st.outage->start, st.outage->end}) {
    const auto k = static_cast<std::size_t>(std::round(edge / r.grid.Ts));
    // Position error against truth on both sides of the edge, and its change
    // across the edge.
    auto error = [&](std::size_t j) {
      return std::hypot(r.profile.points[j].x - syn.truth.x[j], r.profile.points[j].y - syn.truth.y[j]);
    };
    for (std::size_t j = k - 1; j <= k + 1; ++j) jump = std::max(jump, error(j));
    jump = std::max(jump, std::abs(error(k + 1) - error(k - 1)));
  }
  const double red = r.energy_reduction_percent;
  const bool ok = std::abs(al.shift - 0.13) <= 0.02 && rms <= 0.1 && jump <= 0.5 && red >= 0.0 &&
                  red <= 30.0;
  return {ok, fmt::format("lag {:.4f} s (0.13 +- 0.02), accel RMS {:.4f} (limit 0.1), "
                          "edge position error {:.4f} m (limit 0.5), energy reduction {:.2f}% (range [0, 30])",
                          al.shift, rms, jump, red)};
}

Outcome pareto() {
  const RouteCorridor route = scenarios::roundabout_route();
  const double v0 = scenarios::human_like_plan(route).speeds.front();
  const std::vector<double> grid{0.03, 0.1, 0.3, 1.0, 3.0, 10.0};
  const auto rows = sweep_time_weight(route, {}, v0, grid, {}, 2);
  bool monotone = true;
  std::string times;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    times += fmt::format("{:.2f} ", rows[i].travel_time);
    if (rows[i].failed) monotone = false;
    if (i > 0 && rows[i].travel_time > rows[i - 1].travel_time + 1e-6) monotone = false;
  }
  const bool nd = is_nondominated(rows);
  return {monotone && nd, fmt::format("times {}s, non-increasing {}, non-dominated {}", times,
                                      monotone, nd)};
}

Outcome metrics_oracles() {
  double worst = 0.0;
  const double rate = 10.0;
  for (double f : {0.05, 0.5, 2.0}) {
    std::vector<double> s(3000);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(2.0 * oracle::kPi * f * static_cast<double>(i) / rate);
    worst = std::max(worst, std::abs(integrated_density(welch(s, rate)) / mean_square(s) - 1.0));
  }
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g(0.0, 0.5);
  std::vector<double> n(10000);
  for (double& x : n) x = g(rng);
  worst = std::max(worst, std::abs(integrated_density(welch(n, rate)) / mean_square(n) - 1.0));

  const double A = 1.5, f = 0.2, T = 50.0, dt = 0.05;
  std::vector<double> ax(static_cast<std::size_t>(T / dt)), ay(ax.size(), 0.0);
  for (std::size_t k = 0; k < ax.size(); ++k) ax[k] = A * std::sin(2.0 * oracle::kPi * f * static_cast<double>(k) * dt);
  const double exact = A * A * (T / 2.0 - std::sin(4.0 * oracle::kPi * f * T) / (8.0 * oracle::kPi * f));
  const double cm = std::abs(comfort_ma(scenarios::signal_profile(ax, ay, dt)) / exact - 1.0);
  return {worst <= 0.03 && cm <= 0.01,
          fmt::format("Parseval max deviation {:.2f}% (limit 3%), comfort_ma deviation {:.3f}% "
                      "(limit 1%)",
                      100.0 * worst, 100.0 * cm)};
}

Outcome qualitative() {
  const RouteCorridor route = scenarios::roundabout_route();
  const MotionPlan human = scenarios::human_like_plan(route, {}, scenarios::kHumanTravelTime);
  const MotionProfile hp = evaluate_motion(route, human);
  ObjectiveConfig ma;
  ObjectiveConfig ms;
  ms.variant = ObjectiveVariant::ms;
  const MatchResult mma = match_travel_time(route, ma, human.speeds.front(), hp.total_time);
  const MatchResult mms = match_travel_time(route, ms, human.speeds.front(), hp.total_time);
  const ComparisonReport r = compare_profiles(hp, mma.result.profile, &mms.result.profile);
  const double dms = r.deficiency_ms.value_or(0.0);
  return {r.deficiency_ma > 0.0 && dms > r.deficiency_ma,
          fmt::format("deficiency MA {:.2f}%, MS {:.2f}% (need MA > 0 and MS > MA)",
                      r.deficiency_ma, dms)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"filter exactness", filter_exactness},
      {"transfer-function identity", transfer_identity},
      {"toy-instance optimality", toy_optimality},
      {"gradient correctness", gradients},
      {"time matching", time_matching},
      {"reconstruction recovery", reconstruction_recovery},
      {"Pareto monotonicity", pareto},
      {"metrics oracles", metrics_oracles},
      {"end-to-end ordering", qualitative},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += o.pass ? 0 : 1;
    fmt::print("{} {}. {}: {}\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
             criteria.size());
  return failed == 0 ? 0 : 1;
}
