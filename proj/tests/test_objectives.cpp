#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "smoothride/error.hpp"
#include "smoothride/objectives.hpp"
#include "smoothride/scenarios.hpp"

using namespace smoothride;

namespace {

std::vector<double> random_feasible(const RouteCorridor& c, std::mt19937_64& rng) {
  std::vector<double> x(2 * c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    std::uniform_real_distribution<double> y(c[k].y_min, c[k].y_max == c[k].y_min
                                                             ? c[k].y_min + 1e-12
                                                             : c[k].y_max);
    std::uniform_real_distribution<double> v(c[k].v_min, c[k].v_max);
    x[k] = c[k].y_min == c[k].y_max ? c[k].y_min : y(rng);
    x[c.size() + k] = v(rng);
  }
  return x;
}

double gradient_error(const PlanObjective& obj, const std::vector<double>& x) {
  std::vector<double> g(obj.dimension());
  obj.evaluate(x, g);
  const auto fd = oracle::fd_gradient(
      [&](std::span<const double> p) { return obj.evaluate(p).cost; }, x, 1e-6);
  return oracle::relative_error(g, fd);
}

}  // namespace

TEST_CASE("comfort examples") {
  SUBCASE("straight constant speed") {
    const RouteCorridor c = scenarios::straight_corridor(100.0, 11, 1.5, 1.0, 20.0);
    const MotionProfile p = evaluate_motion(c, fixtures::uniform_plan(11, 0.0, 10.0));
    CHECK(comfort_ma(p) == 0.0);
    CHECK(comfort_ms(p, FilterSpec::defaults()) == 0.0);
    ObjectiveConfig cfg;
    cfg.time_weight = 1.0;
    CHECK(planner_cost(p, cfg) == doctest::Approx(10.0).epsilon(1e-12));
  }
  SUBCASE("single segment 10 -> 14 m/s over 20 m") {
    const std::vector<Point2> pts{{0, 0}, {20, 0}};
    const MotionProfile p = evaluate_motion(pts, std::vector<double>{10.0, 14.0});
    CHECK(comfort_ma(p) == doctest::Approx(2.4 * 2.4 * 40.0 / 24.0).epsilon(1e-12));
    CHECK(comfort_ma(p) == doctest::Approx(9.6).epsilon(1e-12));
    ObjectiveConfig cfg;
    cfg.time_weight = 0.0;
    CHECK(planner_cost(p, cfg) == comfort_ma(p));
    cfg.time_weight = 0.5;
    CHECK(planner_cost(p, cfg) == doctest::Approx(9.6 + 0.5 * 40.0 / 24.0).epsilon(1e-12));
    CHECK(planner_cost(p, cfg) == doctest::Approx(10.433).epsilon(1e-4));
  }
}

TEST_CASE("a slow ramp is mostly rejected by the band-pass") {
  const double dt = 0.5;
  const std::size_t n = 400;  // 200 s
  std::vector<double> ax(n), ay(n, 0.0), dts(n, dt);
  for (std::size_t k = 0; k < n; ++k) ax[k] = 0.005 * dt * (static_cast<double>(k) + 0.5);
  const MotionProfile p = scenarios::signal_profile(ax, ay, dt);
  const FilterSpec spec = FilterSpec::defaults();
  const double ms = comfort_ms(p, spec);
  const double ma = comfort_ma(p);

  const oracle::Filtered f = oracle::filter(spec.tau1, spec.tau2, ax, dts, kDefaultCooldown);
  double e = 0.0;
  for (double y : f.output) e += y * y * dt;
  for (double y : f.tail) e += y * y * f.tail_dt;
  CHECK(ms == doctest::Approx(e).epsilon(1e-9));
  CHECK(ms / ma < 0.01);
}

TEST_CASE("a 0.1 Hz lateral sinusoid is weighted by |H|^2") {
  const double dt = 0.05;
  const std::size_t n = 1200;  // 60 s
  std::vector<double> ax(n, 0.0), ay(n);
  for (std::size_t k = 0; k < n; ++k) {
    ay[k] = std::sin(2.0 * oracle::kPi * 0.1 * (static_cast<double>(k) + 0.5) * dt);
  }
  const MotionProfile p = scenarios::signal_profile(ax, ay, dt);
  const FilterSpec spec = FilterSpec::defaults();
  const double gain =
      std::abs(oracle::transfer(spec.tau1, spec.tau2, {0.0, 2.0 * oracle::kPi * 0.1}));
  CHECK(comfort_ms(p, spec) == doctest::Approx(gain * gain * comfort_ma(p)).epsilon(0.05));
}

TEST_CASE("comfort is invariant under mirroring and reversal") {
  std::mt19937_64 rng(12);
  const RouteCorridor c = scenarios::roundabout_route();
  std::vector<double> x = random_feasible(c, rng);
  const MotionPlan plan{std::vector<double>(x.begin(), x.begin() + c.size()),
                        std::vector<double>(x.begin() + c.size(), x.end())};
  const auto pts = waypoints_to_cartesian(c, plan);
  const MotionProfile p = evaluate_motion(pts, plan.speeds);

  std::vector<Point2> mirrored = pts;
  for (Point2& q : mirrored) q.y = -q.y;
  CHECK(comfort_ma(evaluate_motion(mirrored, plan.speeds)) ==
        doctest::Approx(comfort_ma(p)).epsilon(1e-9));

  std::vector<Point2> rp(pts.rbegin(), pts.rend());
  std::vector<double> rv(plan.speeds.rbegin(), plan.speeds.rend());
  const MotionProfile r = evaluate_motion(rp, rv);
  // ax energy is a per-segment sum of squares and survives reversal exactly;
  // ay is re-attributed to the neighbouring segment.
  double ex = 0.0, er = 0.0;
  for (std::size_t k = 0; k < p.segments(); ++k) {
    ex += p.ax[k] * p.ax[k] * p.segment_time_steps[k];
    er += r.ax[k] * r.ax[k] * r.segment_time_steps[k];
  }
  CHECK(er == doctest::Approx(ex).epsilon(1e-9));
}

TEST_CASE("ax energy scales with the square of the speed differences") {
  // Constant step dt fixed by construction: scale the acceleration series.
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(-2.0, 2.0);
  std::vector<double> ax(100), ay(100, 0.0);
  for (double& v : ax) v = a(rng);
  const MotionProfile p = scenarios::signal_profile(ax, ay, 0.2);
  std::vector<double> scaled = ax;
  for (double& v : scaled) v *= 1.7;
  const MotionProfile q = scenarios::signal_profile(scaled, ay, 0.2);
  CHECK(comfort_ma(q) == doctest::Approx(1.7 * 1.7 * comfort_ma(p)).epsilon(1e-12));
}

TEST_CASE("planner cost grows linearly in W with slope T") {
  const RouteCorridor c = scenarios::toy_corner();
  const MotionProfile p = evaluate_motion(c, fixtures::uniform_plan(5, 0.0, 8.0));
  ObjectiveConfig cfg;
  cfg.variant = ObjectiveVariant::ms;
  double previous = -1.0;
  for (double w : {0.0, 0.1, 1.0, 10.0}) {
    cfg.time_weight = w;
    const double cost = planner_cost(p, cfg);
    CHECK(cost > previous);
    CHECK(cost - comfort_ms(p, cfg.filter) == doctest::Approx(w * p.total_time));
    previous = cost;
  }
  cfg.time_weight = -1.0;
  CHECK_THROWS_AS(planner_cost(p, cfg), ValidationError);
}

TEST_CASE("weighted comfort is non-negative") {
  std::mt19937_64 rng(30);
  const RouteCorridor c = scenarios::toy_corner();
  const PlanObjective obj(c, {ObjectiveVariant::ms, 0.0});
  for (int i = 0; i < 20; ++i) {
    CHECK(obj.evaluate(random_feasible(c, rng)).comfort >= 0.0);
  }
}

TEST_CASE("analytic gradients match central differences") {
  const RouteCorridor c = scenarios::toy_corner();
  std::mt19937_64 rng(2024);
  for (ObjectiveVariant variant : {ObjectiveVariant::ma, ObjectiveVariant::ms}) {
    CAPTURE(variant_name(variant));
    const PlanObjective obj(c, {variant, scenarios::kToyTimeWeight});
    for (int i = 0; i < 20; ++i) {
      const auto x = random_feasible(c, rng);
      CHECK(gradient_error(obj, x) < 1e-4);
    }
  }
}

TEST_CASE("MS gradient on a longer route with non-default filter") {
  const RouteCorridor c = scenarios::arc_corridor(30.0, 15, 0.08, 1.5, 2.0, 15.0);
  ObjectiveConfig cfg{ObjectiveVariant::ms, 0.3, {2.0, 5.0}, 10.0};
  const PlanObjective obj(c, cfg);
  std::mt19937_64 rng(77);
  for (int i = 0; i < 5; ++i) CHECK(gradient_error(obj, random_feasible(c, rng)) < 1e-4);
}

TEST_CASE("evaluate with and without gradient agree") {
  const RouteCorridor c = scenarios::toy_corner();
  std::mt19937_64 rng(5);
  for (ObjectiveVariant variant : {ObjectiveVariant::ma, ObjectiveVariant::ms}) {
    const PlanObjective obj(c, {variant, 0.2});
    const auto x = random_feasible(c, rng);
    std::vector<double> g(obj.dimension());
    const auto a = obj.evaluate(x);
    const auto b = obj.evaluate(x, g);
    CHECK(a.cost == doctest::Approx(b.cost).epsilon(1e-13));
    CHECK(a.travel_time == b.travel_time);
  }
}

TEST_CASE("pack and unpack are inverse") {
  const RouteCorridor c = scenarios::toy_corner();
  const PlanObjective obj(c, {});
  const MotionPlan plan{{0, 0.5, -0.5, 1.0, 0}, {10, 11, 12, 13, 14}};
  const MotionPlan back = obj.unpack(PlanObjective::pack(plan));
  CHECK(back.lateral_offsets == plan.lateral_offsets);
  CHECK(back.speeds == plan.speeds);
  CHECK_THROWS_AS(obj.unpack(std::vector<double>(3, 0.0)), DimensionError);
}

TEST_CASE("variant names") {
  CHECK(variant_name(ObjectiveVariant::ma) == "ma");
  CHECK(parse_variant("ms") == ObjectiveVariant::ms);
  CHECK_THROWS_AS(parse_variant("fast"), ValidationError);
}
