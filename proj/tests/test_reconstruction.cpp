#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"
#include "smoothride/error.hpp"
#include "smoothride/reconstruction.hpp"
#include "smoothride/scenarios.hpp"
#include "smoothride/sensor_log.hpp"

using namespace smoothride;

namespace {

double rms(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s / static_cast<double>(a.size()));
}

double position_rms(const std::vector<Point2>& a, const std::vector<Point2>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    s += std::pow(a[k].x - b[k].x, 2) + std::pow(a[k].y - b[k].y, 2);
  }
  return std::sqrt(s / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("forward-Euler motion model") {
  SUBCASE("constant speed and heading") {
    ReconstructionVariables v{1.0, 2.0, std::vector<double>(5, 0.3), std::vector<double>(5, 8.0)};
    const PredictedMotion m = predict_motion(v, 0.1);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(m.ax[k] == 0.0);
      CHECK(m.ay[k] == 0.0);
      CHECK(m.positions[k + 1].x - m.positions[k].x == doctest::Approx(0.8 * std::cos(0.3)));
    }
  }
  SUBCASE("heading steps of 0.01 rad at 10 m/s") {
    ReconstructionVariables v{0.0, 0.0, {0.0, 0.01, 0.02}, {10.0, 10.0, 10.0}};
    const PredictedMotion m = predict_motion(v, 0.1);
    CHECK(m.ay[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.ay[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("speed step of 0.2 m/s") {
    ReconstructionVariables v{0.0, 0.0, {0.0, 0.0}, {10.0, 10.2}};
    CHECK(predict_motion(v, 0.1).ax[0] == doctest::Approx(2.0).epsilon(1e-12));
  }
}

TEST_CASE("cost terms on an exact-model log") {
  const double Ts = 0.1;
  const ReconstructionVariables truth = scenarios::drive_variables(20.0, Ts);
  SensorLog log = scenarios::exact_model_log(truth, Ts);

  SUBCASE("zero at the generating variables") {
    const CostBreakdown c = reconstruction_cost(truth, log, {});
    CHECK(c.data_cost() < 1e-20);
    CHECK(c.regularization_term > 0.0);
  }
  SUBCASE("a 1 m error at one normal sample costs w1") {
    log.gps[50].x += 1.0;
    const CostBreakdown c = reconstruction_cost(truth, log, {});
    CHECK(c.gps_term == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c.j_gps == doctest::Approx(1.0).epsilon(1e-9));
    WeightSchedule heavy;
    heavy.w1_normal = 3.0;
    CHECK(reconstruction_cost(truth, log, heavy).gps_term == doctest::Approx(3.0).epsilon(1e-9));
  }
  SUBCASE("the same error inside an outage window costs nothing") {
    log.gps[50].x += 1.0;
    log.outage_windows.push_back({4.5, 5.5});
    CHECK(reconstruction_cost(truth, log, {}).gps_term < 1e-20);
  }
  SUBCASE("invalid GPS outside any window is ignored") {
    log.gps[50].x += 1.0;
    log.gps[50].valid = false;
    CHECK(reconstruction_cost(truth, log, {}).gps_term < 1e-20);
  }
  SUBCASE("an acceleration error is weighted by w2, and by w2_outage in a window") {
    log.imu[30].ax += 0.5;
    CHECK(reconstruction_cost(truth, log, {}).imu_term == doctest::Approx(5.0 * 0.25).epsilon(1e-9));
    log.outage_windows.push_back({2.9, 3.1});
    CHECK(reconstruction_cost(truth, log, {}).imu_term == doctest::Approx(10.0 * 0.25).epsilon(1e-9));
  }
}

TEST_CASE("cost decomposition matches an independent recomputation") {
  scenarios::SyntheticLogSettings st;
  st.duration = 20.0;
  st.gps_sigma = 0.3;
  st.imu_sigma = 0.05;
  st.seed = 3;
  const auto syn = scenarios::synthetic_drive(st);
  const ReconstructionGrid grid = prepare_grid(syn.log, {});
  const ReconstructionVariables vars = initial_variables(grid);
  const CostBreakdown c = reconstruction_cost(vars, grid);
  const PredictedMotion m = predict_motion(vars, grid.Ts);
  double jg = 0.0, ji = 0.0, reg = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    jg += std::pow(grid.gps_x[k] - m.positions[k].x, 2) + std::pow(grid.gps_y[k] - m.positions[k].y, 2);
  }
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    ji += std::pow(grid.imu_ax[k] - m.ax[k], 2) + std::pow(grid.imu_ay[k] - m.ay[k], 2);
    reg += std::pow(vars.headings[k + 1] - vars.headings[k], 2);
  }
  CHECK(c.j_gps == doctest::Approx(jg).epsilon(1e-12));
  CHECK(c.j_imu == doctest::Approx(ji).epsilon(1e-12));
  CHECK(c.regularization_term == doctest::Approx(kHeadingSmoothness * reg).epsilon(1e-12));
  CHECK(std::abs(c.data_cost() - (1.0 * c.j_gps + 5.0 * c.j_imu)) <= 1e-12 * c.data_cost());
}

TEST_CASE("noiseless logs are recovered") {
  const double Ts = 0.1;
  const ReconstructionVariables truth = scenarios::drive_variables(30.0, Ts);
  const SensorLog log = scenarios::exact_model_log(truth, Ts);
  const ReconstructionResult r = reconstruct(log);
  CHECK(r.converged);
  CHECK(r.cost.data_cost() <= 1e-6);
  CHECK(rms(r.variables.speeds, truth.speeds) <= 1e-3);
  const PredictedMotion m = predict_motion(truth, Ts);
  CHECK(position_rms(r.profile.points, m.positions) <= 1e-2);
  CHECK(r.initial_cost.objective() >= r.cost.objective());
}

TEST_CASE("a full loop reconstructs without heading wrap jumps") {
  const double Ts = 0.1;
  const ReconstructionVariables truth = scenarios::loop_variables(20.0, 8.0, 1.3, Ts);
  const ReconstructionResult r = reconstruct(scenarios::exact_model_log(truth, Ts));
  CHECK(r.cost.data_cost() <= 1e-6);
  for (std::size_t k = 1; k < r.profile.size(); ++k) {
    const double step = std::hypot(r.profile.points[k].x - r.profile.points[k - 1].x,
                                   r.profile.points[k].y - r.profile.points[k - 1].y);
    CHECK(step <= 8.0 * Ts * 1.01);
  }
  for (std::size_t k = 1; k < truth.size(); ++k) {
    CHECK(std::abs(r.variables.headings[k] - r.variables.headings[k - 1]) < 0.1);
  }
}

TEST_CASE("noisy drive with an outage") {
  scenarios::SyntheticLogSettings st;
  st.duration = 60.0;
  st.gps_sigma = 0.3;
  st.imu_sigma = 0.05;
  st.outage = TimeWindow{20.0, 35.0};
  st.seed = 11;
  const auto syn = scenarios::synthetic_drive(st);
  const ReconstructionResult r = reconstruct(syn.log);
  CHECK(r.converged);
  double se = 0.0;
  for (std::size_t k = 0; k < r.profile.segments(); ++k) {
    se += std::pow(r.profile.ax[k] - syn.truth.ax[k], 2) + std::pow(r.profile.ay[k] - syn.truth.ay[k], 2);
  }
  CHECK(std::sqrt(se / static_cast<double>(r.profile.segments())) <= 0.1);
  // No jump against truth at the window edges.
  for (double edge : {20.0, 35.0}) {
    const auto k = static_cast<std::size_t>(std::round(edge / r.grid.Ts));
    for (std::size_t j = k - 1; j <= k + 1; ++j) {
      CHECK(std::hypot(r.profile.points[j].x - syn.truth.x[j],
                       r.profile.points[j].y - syn.truth.y[j]) <= 0.5);
    }
  }
  CHECK(r.energy_reduction_percent >= 0.0);
  CHECK(r.energy_reduction_percent <= 30.0);
  CHECK(r.energy_raw_imu == doctest::Approx(raw_imu_energy(syn.log, r.grid.t.front(), r.grid.t.back())));
}

TEST_CASE("rigid motions of the GPS track move the reconstruction rigidly") {
  scenarios::SyntheticLogSettings st;
  st.duration = 20.0;
  st.gps_sigma = 0.2;
  st.imu_sigma = 0.05;
  st.seed = 8;
  const auto syn = scenarios::synthetic_drive(st);
  const double th = 0.7, tx = 150.0, ty = -320.0;
  SensorLog moved = syn.log;
  for (GpsSample& g : moved.gps) {
    const double x = g.x, y = g.y;
    g.x = std::cos(th) * x - std::sin(th) * y + tx;
    g.y = std::sin(th) * x + std::cos(th) * y + ty;
  }
  ReconstructionSettings tight;
  tight.relative_tolerance = 1e-15;
  const ReconstructionResult a = reconstruct(syn.log, {}, tight);
  const ReconstructionResult b = reconstruct(moved, {}, tight);
  double worst = 0.0;
  for (std::size_t k = 0; k < a.profile.size(); ++k) {
    const Point2 p = a.profile.points[k];
    const double x = std::cos(th) * p.x - std::sin(th) * p.y + tx;
    const double y = std::sin(th) * p.x + std::cos(th) * p.y + ty;
    worst = std::max(worst, std::hypot(x - b.profile.points[k].x, y - b.profile.points[k].y));
    CHECK(b.profile.speeds[k] == doctest::Approx(a.profile.speeds[k]).epsilon(1e-6));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("IMU time alignment") {
  scenarios::SyntheticLogSettings st;
  st.gps_sigma = 0.3;
  st.imu_sigma = 0.05;
  st.seed = 5;
  SUBCASE("an injected 0.13 s lag is recovered") {
    st.imu_lag = 0.13;
    const AlignmentResult a = align_imu(scenarios::synthetic_drive(st).log);
    CHECK(std::abs(a.shift - 0.13) <= 0.02);
    CHECK_FALSE(a.edge_warning);
  }
  SUBCASE("an aligned log stays put") {
    const AlignmentResult a = align_imu(scenarios::synthetic_drive(st).log);
    CHECK(std::abs(a.shift) <= 0.02);
  }
  SUBCASE("a straight constant-speed log has no usable correlation") {
    SensorLog log;
    for (int k = 0; k <= 200; ++k) log.gps.push_back({0.1 * k, 10.0 * 0.1 * k, 0.0, true});
    for (int i = 0; i <= 2000; ++i) log.imu.push_back({0.01 * i, 0.0, 0.0});
    const AlignmentResult a = align_imu(log);
    CHECK(a.edge_warning);
    CHECK(std::abs(a.shift) <= kDefaultMaxShift);
  }
}

TEST_CASE("run validity screen") {
  auto profile_with_min = [](double vmin) {
    std::vector<Point2> pts;
    std::vector<double> v;
    for (int k = 0; k < 10; ++k) {
      pts.push_back({10.0 * k, 0.0});
      v.push_back(k == 4 ? vmin : 12.0);
    }
    return evaluate_motion(pts, v);
  };
  CHECK(validate_run(profile_with_min(6.1)).valid);
  const RunValidity low = validate_run(profile_with_min(2.0));
  CHECK_FALSE(low.valid);
  REQUIRE(low.reasons.size() == 1);
  CHECK(low.reasons[0] == "min speed 2.0 < 5.0");
  const RunValidity tie = validate_run(profile_with_min(5.0));
  CHECK_FALSE(tie.valid);
  CHECK(tie.reasons[0] == "min speed 5.0 <= 5.0");
  CHECK(validity_to_json(low)["valid"] == false);
}

TEST_CASE("weight schedule JSON and validation") {
  const WeightSchedule d = weight_schedule_from_json(nullptr);
  CHECK(d.w1_normal == 1.0);
  CHECK(d.w2_normal == 5.0);
  CHECK(d.w1_outage == 0.0);
  CHECK(d.w2_outage == 10.0);
  const WeightSchedule w = weight_schedule_from_json({{"w2_normal", 2.0}});
  CHECK(w.w2_normal == 2.0);
  CHECK(weight_schedule_to_json(w)["w2_outage"] == 10.0);
  CHECK_THROWS_AS(weight_schedule_from_json({{"w1_normal", -1.0}}), ValidationError);
  CHECK_THROWS_AS(weight_schedule_from_json({{"w1_normal", "x"}}), ParseError);
}

TEST_CASE("sensor log files") {
  const auto dir = fixtures::scratch("sensor_log");
  scenarios::SyntheticLogSettings st;
  st.duration = 10.0;
  st.outage = TimeWindow{3.0, 4.0};
  const auto syn = scenarios::synthetic_drive(st);
  write_sensor_log(syn.log, dir / "gps.csv", dir / "imu.csv");
  SensorLog back = read_sensor_log(dir / "gps.csv", dir / "imu.csv");
  CHECK(back.gps.size() == syn.log.gps.size());
  CHECK(back.imu.size() == syn.log.imu.size());
  CHECK(back.gps[35].valid == false);
  apply_outage_json(back, outage_json(syn.log));
  REQUIRE(back.outage_windows.size() == 1);
  CHECK(back.outage_windows[0].start == 3.0);

  try {
    read_sensor_log(dir / "gps.csv", dir / "nothere.csv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("nothere.csv") != std::string::npos);
  }

  SensorLog bad = syn.log;
  bad.outage_windows.push_back({9.0, 50.0});
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  std::swap(bad.gps[2], bad.gps[3]);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("grid preparation") {
  const auto syn = scenarios::synthetic_drive({});
  SensorLog log = syn.log;
  log.outage_windows.push_back({10.0, 12.0});
  const ReconstructionGrid g = prepare_grid(log, {});
  CHECK(g.Ts == doctest::Approx(0.1));
  CHECK(g.size() == log.gps.size());
  const auto k = static_cast<std::size_t>(std::round(11.0 / g.Ts));
  CHECK(g.w_position[k] == 0.0);
  CHECK(g.w_acceleration[k] == 10.0);
  CHECK(g.w_position[0] == 1.0);
  CHECK(g.w_acceleration[0] == 5.0);
}
