#include "smoothride/sickness_filter.hpp"

#include <fmt/core.h>

#include <Eigen/LU>

#include <cmath>
#include <numbers>

#include "smoothride/error.hpp"

namespace smoothride {

FilterSpec FilterSpec::defaults() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  return {1.0 / (two_pi * 0.2), 1.0 / (two_pi * 0.02)};
}

void FilterSpec::validate() const {
  if (!(tau1 > 0.0) || !std::isfinite(tau1)) {
    throw ValidationError(fmt::format("filter: tau1 must be > 0, got {}", tau1));
  }
  if (!(tau2 > 0.0) || !std::isfinite(tau2)) {
    throw ValidationError(fmt::format("filter: tau2 must be > 0, got {}", tau2));
  }
  if (tau1 == tau2) {
    throw ValidationError("filter: tau1 == tau2 gives a repeated pole");
  }
}

ContinuousModel continuous_matrices(const FilterSpec& spec) {
  spec.validate();
  const double a1 = 1.0 / spec.tau1;
  const double a2 = 1.0 / spec.tau2;
  ContinuousModel m;
  m.A << -(a1 + a2), 1.0, -a1 * a2, 0.0;
  m.B << a1 * a2, 0.0;
  m.C << 1.0, 0.0;
  return m;
}

std::complex<double> transfer_function(const FilterSpec& spec,
                                       std::complex<double> s) {
  return 1.0 / (spec.tau1 * s + 1.0) * s / (spec.tau2 * s + 1.0);
}

std::complex<double> state_space_response(const ContinuousModel& model,
                                          std::complex<double> s) {
  const Eigen::Matrix2cd M =
      s * Eigen::Matrix2cd::Identity() - model.A.cast<std::complex<double>>();
  const Eigen::Vector2cd x = M.partialPivLu().solve(model.B.cast<std::complex<double>>());
  return (model.C.cast<std::complex<double>>() * x)(0);
}

SicknessFilter::SicknessFilter(FilterSpec spec)
    : spec_(spec), model_(continuous_matrices(spec)) {
  // Characteristic polynomial s^2 + (a1 + a2) s + a1 a2 has roots -a1, -a2;
  // the eigenvector of lambda solves v2 = (a1 + a2 + lambda) v1.
  const double a1 = 1.0 / spec_.tau1;
  const double a2 = 1.0 / spec_.tau2;
  lambda_ << -a1, -a2;
  P_ << 1.0, 1.0, a2, a1;
  P_inv_ = P_.inverse();
  P_inv_B_ = P_inv_ * model_.B;
}

DiscreteModel SicknessFilter::discretize(double dt) const {
  if (!(dt > 0.0)) {
    throw DomainError(fmt::format("discretize: dt must be > 0, got {}", dt));
  }
  const double e0 = std::exp(lambda_(0) * dt);
  const double e1 = std::exp(lambda_(1) * dt);
  const double g0 = std::expm1(lambda_(0) * dt) / lambda_(0);
  const double g1 = std::expm1(lambda_(1) * dt) / lambda_(1);
  DiscreteModel d;
  d.Ad = P_ * Eigen::Vector2d(e0, e1).asDiagonal() * P_inv_;
  d.Bd = P_ * Eigen::Vector2d(g0 * P_inv_B_(0), g1 * P_inv_B_(1));
  return d;
}

DiscreteModel SicknessFilter::discretize_derivative(double dt) const {
  if (!(dt > 0.0)) {
    throw DomainError(fmt::format("discretize: dt must be > 0, got {}", dt));
  }
  const double e0 = std::exp(lambda_(0) * dt);
  const double e1 = std::exp(lambda_(1) * dt);
  DiscreteModel d;
  d.Ad = P_ * Eigen::Vector2d(lambda_(0) * e0, lambda_(1) * e1).asDiagonal() * P_inv_;
  d.Bd = P_ * Eigen::Vector2d(e0 * P_inv_B_(0), e1 * P_inv_B_(1));
  return d;
}

DiscreteModel discretize(const FilterSpec& spec, double dt) {
  return SicknessFilter(spec).discretize(dt);
}

double FilterState::step(const DiscreteModel& model,
                         const Eigen::RowVector2d& C, double input) {
  last_output = C * state;
  state = model.Ad * state + model.Bd * input;
  return last_output;
}

TailLayout tail_layout(std::span<const double> time_steps, double cooldown) {
  if (time_steps.empty() || !(cooldown > 0.0)) return {};
  double sum = 0.0;
  for (double dt : time_steps) sum += dt;
  const double mean = sum / static_cast<double>(time_steps.size());
  const auto count = static_cast<std::size_t>(std::max(1.0, std::round(cooldown / mean)));
  return {count, mean};
}

FilteredSeries filter_sequence(const SicknessFilter& filter,
                               std::span<const double> accels,
                               std::span<const double> time_steps,
                               double cooldown) {
  if (accels.size() != time_steps.size()) {
    throw DimensionError(fmt::format("filter_sequence: {} inputs but {} time steps",
                                     accels.size(), time_steps.size()));
  }
  if (cooldown < 0.0) throw DomainError("filter_sequence: cooldown must be >= 0");

  FilteredSeries out;
  out.output.reserve(accels.size());
  out.time_steps.assign(time_steps.begin(), time_steps.end());
  const Eigen::RowVector2d& C = filter.continuous().C;

  FilterState state;
  for (std::size_t k = 0; k < accels.size(); ++k) {
    out.output.push_back(state.step(filter.discretize(time_steps[k]), C, accels[k]));
  }

  const TailLayout tail = tail_layout(time_steps, cooldown);
  if (tail.count > 0) {
    const DiscreteModel model = filter.discretize(tail.dt);
    out.tail_output.reserve(tail.count);
    out.tail_steps.assign(tail.count, tail.dt);
    for (std::size_t j = 0; j < tail.count; ++j) {
      out.tail_output.push_back(state.step(model, C, 0.0));
    }
  }
  return out;
}

FilteredSeries filter_sequence(const FilterSpec& spec,
                               std::span<const double> accels,
                               std::span<const double> time_steps,
                               double cooldown) {
  return filter_sequence(SicknessFilter(spec), accels, time_steps, cooldown);
}

FilterConfig filter_config_from_json(const nlohmann::json& doc) {
  FilterConfig cfg;
  if (doc.is_null()) return cfg;
  if (!doc.is_object()) throw ParseError("filter config must be an object");
  auto read = [&](const char* key, double& field) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) {
      throw ParseError(fmt::format("filter config: field \"{}\" must be a number", key));
    }
    field = doc[key].get<double>();
  };
  read("tau1_s", cfg.spec.tau1);
  read("tau2_s", cfg.spec.tau2);
  read("cooldown_s", cfg.cooldown);
  cfg.spec.validate();
  if (cfg.cooldown < 0.0) throw ValidationError("filter config: cooldown_s must be >= 0");
  return cfg;
}

nlohmann::json filter_config_to_json(const FilterConfig& config) {
  return {{"tau1_s", config.spec.tau1},
          {"tau2_s", config.spec.tau2},
          {"cooldown_s", config.cooldown}};
}

}  // namespace smoothride
