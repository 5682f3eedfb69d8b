#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "smoothride/error.hpp"
#include "smoothride/kinematics.hpp"
#include "smoothride/scenarios.hpp"

using namespace smoothride;

namespace {

// Random plan on a random wiggly, forward-moving polyline.
struct RandomPath {
  std::vector<Point2> points;
  std::vector<double> speeds;
};

RandomPath random_path(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> step(2.0, 6.0), turn(-0.4, 0.4), speed(3.0, 20.0);
  RandomPath p;
  double x = 0.0, y = 0.0, h = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    p.points.push_back({x, y});
    p.speeds.push_back(speed(rng));
    h += turn(rng);
    const double s = step(rng);
    x += s * std::cos(h);
    y += s * std::sin(h);
  }
  return p;
}

double path_length(const std::vector<Point2>& pts) {
  double s = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    s += std::hypot(pts[k].x - pts[k - 1].x, pts[k].y - pts[k - 1].y);
  }
  return s;
}

}  // namespace

TEST_CASE("uniform straight motion has no acceleration") {
  std::vector<Point2> pts;
  for (int k = 0; k <= 10; ++k) pts.push_back({10.0 * k, 0.0});
  const MotionProfile p = evaluate_motion(pts, std::vector<double>(11, 10.0));
  CHECK(p.total_time == doctest::Approx(10.0).epsilon(1e-12));
  for (std::size_t k = 0; k < p.segments(); ++k) {
    CHECK(p.ax[k] == 0.0);
    CHECK(p.ay[k] == 0.0);
  }
}

TEST_CASE("one segment from 10 to 14 m/s over 20 m") {
  const std::vector<Point2> pts{{0, 0}, {20, 0}};
  const MotionProfile p = evaluate_motion(pts, std::vector<double>{10.0, 14.0});
  REQUIRE(p.segments() == 1);
  CHECK(p.segment_time_steps[0] == doctest::Approx(40.0 / 24.0).epsilon(1e-12));
  CHECK(p.segment_time_steps[0] == doctest::Approx(1.667).epsilon(1e-3));
  CHECK(p.ax[0] == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(p.ay[0] == 0.0);
}

TEST_CASE("lateral acceleration on an arc converges to v^2/r at second order") {
  constexpr double r = 15.0, v = 7.0;
  const double exact = v * v / r;
  std::vector<double> errors;
  for (std::size_t stations : {20, 40, 80, 160}) {
    const double step = 0.5 * std::numbers::pi / static_cast<double>(stations - 1);
    const RouteCorridor c = scenarios::arc_corridor(r, stations, step, 1.0, 1.0, 20.0);
    const MotionProfile p =
        evaluate_motion(c, fixtures::uniform_plan(stations, 0.0, v));
    // Interior segment, away from the zero-padded last entry.
    errors.push_back(std::abs(p.ay[stations / 2] - exact));
  }
  CHECK(errors.back() < 1e-3 * exact);
  for (std::size_t i = 1; i < errors.size(); ++i) {
    const double ratio = errors[i - 1] / errors[i];
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.05));
  }
}

TEST_CASE("ay of the last segment is zero-padded and turns are signed") {
  const std::vector<Point2> left{{0, 0}, {10, 0}, {20, 1}, {30, 3}};
  const MotionProfile p = evaluate_motion(left, std::vector<double>(4, 10.0));
  CHECK(p.ay[0] > 0.0);
  CHECK(p.ay[1] > 0.0);
  CHECK(p.ay[2] == 0.0);
  const auto turns = heading_changes(left);
  REQUIRE(turns.size() == 2);
  CHECK(turns[0] == doctest::Approx(std::atan2(1.0, 10.0)));
}

TEST_CASE("invalid speeds and coincident points are rejected") {
  const std::vector<Point2> pts{{0, 0}, {10, 0}, {20, 0}};
  CHECK_THROWS_AS(evaluate_motion(pts, std::vector<double>{10.0, 0.0, 10.0}), DomainError);
  CHECK_THROWS_AS(evaluate_motion(pts, std::vector<double>{10.0, -1.0, 10.0}), DomainError);
  CHECK_THROWS_AS(evaluate_motion(pts, std::vector<double>{10.0, 10.0}), DimensionError);
  const std::vector<Point2> dup{{0, 0}, {10, 0}, {10, 0}};
  try {
    evaluate_motion(dup, std::vector<double>(3, 10.0));
    FAIL("expected a degenerate segment");
  } catch (const DegenerateSegmentError& e) {
    CHECK(e.segment() == 1);
  }
}

TEST_CASE("distance and velocity consistency on random plans") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const RandomPath path = random_path(rng, 30);
    const MotionProfile p = evaluate_motion(path.points, path.speeds);
    double dist = 0.0, dv = 0.0, total = 0.0;
    for (std::size_t k = 0; k < p.segments(); ++k) {
      dist += 0.5 * (p.speeds[k] + p.speeds[k + 1]) * p.segment_time_steps[k];
      dv += p.ax[k] * p.segment_time_steps[k];
      total += p.segment_time_steps[k];
    }
    CHECK(dist == doctest::Approx(path_length(path.points)).epsilon(1e-12));
    CHECK(p.speeds.front() + dv == doctest::Approx(p.speeds.back()).epsilon(1e-9));
    CHECK(p.total_time == doctest::Approx(total).epsilon(1e-14));
  }
}

TEST_CASE("mirroring negates ay and reversal preserves |ax|") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const RandomPath path = random_path(rng, 20);
    const MotionProfile p = evaluate_motion(path.points, path.speeds);

    std::vector<Point2> mirrored = path.points;
    for (Point2& q : mirrored) q.y = -q.y;
    const MotionProfile m = evaluate_motion(mirrored, path.speeds);
    for (std::size_t k = 0; k < p.segments(); ++k) {
      CHECK(m.ay[k] == -p.ay[k]);
      CHECK(m.ax[k] == p.ax[k]);
      CHECK(m.segment_time_steps[k] == p.segment_time_steps[k]);
    }

    std::vector<Point2> rp(path.points.rbegin(), path.points.rend());
    std::vector<double> rv(path.speeds.rbegin(), path.speeds.rend());
    const MotionProfile r = evaluate_motion(rp, rv);
    std::vector<double> a, b;
    for (double x : p.ax) a.push_back(std::abs(x));
    for (double x : r.ax) b.push_back(std::abs(x));
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(std::abs(a[k] - b[k]) <= 1e-9);
  }
}

TEST_CASE("uniform resampling") {
  SUBCASE("a constant signal stays constant") {
    const MotionProfile p = scenarios::signal_profile(std::vector<double>(50, 1.0),
                                                      std::vector<double>(50, 0.0), 0.3);
    for (double rate : {1.0, 3.7, 10.0, 50.0}) {
      const UniformSeries s = resample_uniform(p, rate);
      for (double v : s.ax) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("10 s at 10 Hz gives 101 samples") {
    const MotionProfile p = scenarios::signal_profile(std::vector<double>(100, 0.0),
                                                      std::vector<double>(100, 0.0), 0.1);
    const UniformSeries s = resample_uniform(p, 10.0);
    CHECK(s.t.size() == 101);
    CHECK(s.t.back() == doctest::Approx(10.0));
  }
  SUBCASE("a triangular ramp keeps its velocity change") {
    // Accelerate up, then down, over 20 s on a non-uniform grid.
    std::vector<Point2> pts{{0, 0}};
    std::vector<double> v{5.0};
    double x = 0.0, t = 0.0;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> dt(0.05, 0.4);
    while (t < 20.0) {
      const double h = dt(rng);
      const double a = t < 10.0 ? 0.2 * t : 0.2 * (20.0 - t);
      const double v1 = v.back() + a * h;
      x += 0.5 * (v.back() + v1) * h;
      pts.push_back({x, 0.0});
      v.push_back(v1);
      t += h;
    }
    const MotionProfile p = evaluate_motion(pts, v);
    const UniformSeries s = resample_uniform(p, 20.0);
    double integral = 0.0;
    for (std::size_t i = 1; i < s.t.size(); ++i) {
      integral += 0.5 * (s.ax[i] + s.ax[i - 1]) * (s.t[i] - s.t[i - 1]);
    }
    const double dv = v.back() - v.front();
    CHECK(integral == doctest::Approx(dv).epsilon(0.01));
  }
  SUBCASE("too few samples") {
    const MotionProfile p = scenarios::signal_profile(std::vector<double>(5, 0.0),
                                                      std::vector<double>(5, 0.0), 0.1);
    CHECK_THROWS_AS(resample_uniform(p, 10.0), ResolutionError);
    CHECK_THROWS_AS(resample_uniform(p, 0.0), DomainError);
  }
}

TEST_CASE("profile CSV round trip") {
  const auto dir = fixtures::scratch("profile_csv");
  std::mt19937_64 rng(2);
  const RandomPath path = random_path(rng, 12);
  const MotionProfile p = evaluate_motion(path.points, path.speeds);
  write_profile_csv(p, dir / "p.csv");
  const std::string text = fixtures::read_text(dir / "p.csv");
  CHECK(text.rfind("t,x,y,v,ax,ay\n", 0) == 0);
  const MotionProfile q = read_profile_csv(dir / "p.csv");
  REQUIRE(q.size() == p.size());
  CHECK(q.total_time == doctest::Approx(p.total_time).epsilon(1e-8));
  for (std::size_t k = 0; k < p.segments(); ++k) {
    CHECK(q.ax[k] == doctest::Approx(p.ax[k]).epsilon(1e-8));
    CHECK(q.segment_time_steps[k] == doctest::Approx(p.segment_time_steps[k]).epsilon(1e-7));
  }
  CHECK_THROWS_AS(read_profile_csv(dir / "missing.csv"), ParseError);
  fixtures::write_text(dir / "bad.csv", "t,x,y,v,ax\n0,0,0,1,0\n1,1,0,1,0\n");
  CHECK_THROWS_AS(read_profile_csv(dir / "bad.csv"), ParseError);
}
