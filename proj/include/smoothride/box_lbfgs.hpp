#pragma once

#include <functional>
#include <span>
#include <vector>

namespace smoothride {

/// Limited-memory BFGS with projection onto a box. Variables sitting on a
/// bound with the gradient pushing outward are held fixed for the step;
/// the step is a projected backtracking (Armijo) search along the
/// quasi-Newton direction of the free variables.
struct BoxLbfgsSettings {
  int memory = 10;
  int max_iterations = 3000;
  double gradient_tolerance = 1e-6;  // projected-gradient infinity norm
  double relative_decrease = 1e-10;  // over `stall_window` iterations
  int stall_window = 5;
  int max_backtracks = 40;
};

struct BoxLbfgsResult {
  std::vector<double> x;
  double value = 0.0;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Returns f(x) and writes the gradient into the second argument.
using ValueAndGradient =
    std::function<double(std::span<const double>, std::span<double>)>;

BoxLbfgsResult minimize_box(const ValueAndGradient& f, std::vector<double> x0,
                            std::span<const double> lower,
                            std::span<const double> upper,
                            const BoxLbfgsSettings& settings = {});

}  // namespace smoothride
