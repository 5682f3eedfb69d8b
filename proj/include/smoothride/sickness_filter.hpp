#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace smoothride {

/// Band-pass motion-sickness weighting
///
///   H(s) = 1 / (tau1 s + 1) * s / (tau2 s + 1)
///
/// tau1 sets the upper (low-pass) corner and tau2 the lower (high-pass)
/// corner. The shipped defaults put the corners at 0.2 Hz and 0.02 Hz; they
/// are an assumption, override them per study.
struct FilterSpec {
  double tau1 = 0.0;
  double tau2 = 0.0;

  static FilterSpec defaults();

  /// Throws ValidationError unless tau1 > 0, tau2 > 0 and tau1 != tau2.
  void validate() const;
};

inline constexpr double kDefaultCooldown = 30.0;  // seconds

struct ContinuousModel {
  Eigen::Matrix2d A;
  Eigen::Vector2d B;
  Eigen::RowVector2d C;
};

struct DiscreteModel {
  Eigen::Matrix2d Ad;
  Eigen::Vector2d Bd;
};

/// Controllable-canonical realization with C (sI - A)^-1 B = H(s):
///   A = [[-(1/tau1 + 1/tau2), 1], [-1/(tau1 tau2), 0]]
///   B = [1/(tau1 tau2), 0]^T,  C = [1, 0]
ContinuousModel continuous_matrices(const FilterSpec& spec);

/// H(s) evaluated from its rational form.
std::complex<double> transfer_function(const FilterSpec& spec,
                                       std::complex<double> s);

/// C (sI - A)^-1 B for an arbitrary realization.
std::complex<double> state_space_response(const ContinuousModel& model,
                                          std::complex<double> s);

/// Filter with its eigendecomposition cached. A has the real, distinct
/// eigenvalues -1/tau1 and -1/tau2, so every per-step discretization is two
/// scalar exponentials plus a 2x2 similarity transform:
///   Ad = P exp(Omega dt) P^-1
///   Bd = A^-1 (Ad - I) B = P Omega^-1 (exp(Omega dt) - I) P^-1 B
class SicknessFilter {
 public:
  explicit SicknessFilter(FilterSpec spec);

  const FilterSpec& spec() const { return spec_; }
  const ContinuousModel& continuous() const { return model_; }
  const Eigen::Vector2d& eigenvalues() const { return lambda_; }
  const Eigen::Matrix2d& eigenvectors() const { return P_; }

  /// Zero-order-hold discretization. Throws DomainError for dt <= 0.
  DiscreteModel discretize(double dt) const;

  /// d(Ad)/d(dt) = A Ad and d(Bd)/d(dt) = Ad B.
  DiscreteModel discretize_derivative(double dt) const;

 private:
  FilterSpec spec_;
  ContinuousModel model_;
  Eigen::Vector2d lambda_;
  Eigen::Matrix2d P_;
  Eigen::Matrix2d P_inv_;
  Eigen::Vector2d P_inv_B_;
};

DiscreteModel discretize(const FilterSpec& spec, double dt);

/// Running state of one filtered channel. Not shared between threads.
struct FilterState {
  Eigen::Vector2d state = Eigen::Vector2d::Zero();
  double last_output = 0.0;

  /// Emits C x_k, then advances x_{k+1} = Ad x_k + Bd u_k.
  double step(const DiscreteModel& model, const Eigen::RowVector2d& C,
              double input);
};

/// Layout of the zero-input cooldown continuation: `count` steps of `dt`,
/// with dt the mean main-sequence step and count = round(cooldown / dt).
struct TailLayout {
  std::size_t count = 0;
  double dt = 0.0;
};

TailLayout tail_layout(std::span<const double> time_steps, double cooldown);

struct FilteredSeries {
  std::vector<double> output;       // one per input sample
  std::vector<double> time_steps;   // copy of the input steps
  std::vector<double> tail_output;  // zero-input cooldown continuation
  std::vector<double> tail_steps;
};

/// Filters `accels` held constant over `time_steps` from a zero state, then
/// continues with zero input for `cooldown` seconds.
FilteredSeries filter_sequence(const FilterSpec& spec,
                               std::span<const double> accels,
                               std::span<const double> time_steps,
                               double cooldown = kDefaultCooldown);

FilteredSeries filter_sequence(const SicknessFilter& filter,
                               std::span<const double> accels,
                               std::span<const double> time_steps,
                               double cooldown = kDefaultCooldown);

struct FilterConfig {
  FilterSpec spec = FilterSpec::defaults();
  double cooldown = kDefaultCooldown;
};

/// {"tau1_s": number, "tau2_s": number, "cooldown_s": number}; absent keys
/// keep their defaults.
FilterConfig filter_config_from_json(const nlohmann::json& doc);
nlohmann::json filter_config_to_json(const FilterConfig& config);

}  // namespace smoothride
