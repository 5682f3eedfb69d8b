#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>

namespace smoothride::detail {

struct QuadraticFit {
  double value = 0.0;
  double rate = 0.0;
  double curvature = 0.0;  // second derivative
};

/// Least-squares fit of c0 + c1 (t - tc) + c2 (t - tc)^2 over samples
/// [first, last] (inclusive).
inline std::optional<QuadraticFit> fit_quadratic(std::span<const double> t,
                                                 std::span<const double> v,
                                                 std::size_t first,
                                                 std::size_t last, double tc) {
  if (last < first + 2) return std::nullopt;
  Eigen::Matrix3d N = Eigen::Matrix3d::Zero();
  Eigen::Vector3d r = Eigen::Vector3d::Zero();
  for (std::size_t i = first; i <= last; ++i) {
    const double dt = t[i] - tc;
    const Eigen::Vector3d phi(1.0, dt, dt * dt);
    N += phi * phi.transpose();
    r += phi * v[i];
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(N);
  if (ldlt.info() != Eigen::Success) return std::nullopt;
  const Eigen::Vector3d c = ldlt.solve(r);
  return QuadraticFit{c(0), c(1), 2.0 * c(2)};
}

}  // namespace smoothride::detail
