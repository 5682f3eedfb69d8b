#include "smoothride/box_lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "smoothride/error.hpp"

namespace smoothride {
namespace {

struct Pair {
  std::vector<double> s;
  std::vector<double> y;
};

double masked_dot(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<char>& free) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (free[i]) sum += a[i] * b[i];
  }
  return sum;
}

}  // namespace

BoxLbfgsResult minimize_box(const ValueAndGradient& f, std::vector<double> x0,
                            std::span<const double> lower,
                            std::span<const double> upper,
                            const BoxLbfgsSettings& settings) {
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw DimensionError("minimize_box: bound length mismatch");
  }
  auto project = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);
  };
  auto projected_gradient_norm = [&](const std::vector<double>& x,
                                     const std::vector<double>& g) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double moved = std::clamp(x[i] - g[i], lower[i], upper[i]) - x[i];
      norm = std::max(norm, std::abs(moved));
    }
    return norm;
  };

  BoxLbfgsResult result;
  std::vector<double> x = std::move(x0);
  project(x);
  std::vector<double> g(n), g_trial(n), x_trial(n), d(n), q(n);
  std::vector<char> free(n);
  double fx = f(x, g);
  std::deque<Pair> history;
  std::deque<double> recent{fx};

  for (int iter = 0; iter < settings.max_iterations; ++iter) {
    result.iterations = iter;
    const double pg = projected_gradient_norm(x, g);
    if (pg < settings.gradient_tolerance) {
      result.converged = true;
      break;
    }

    for (std::size_t i = 0; i < n; ++i) {
      const bool pinned = lower[i] == upper[i];
      const bool at_lower = x[i] <= lower[i] && g[i] > 0.0;
      const bool at_upper = x[i] >= upper[i] && g[i] < 0.0;
      free[i] = !(pinned || at_lower || at_upper);
    }

    // Two-loop recursion restricted to the free subspace.
    for (std::size_t i = 0; i < n; ++i) q[i] = free[i] ? g[i] : 0.0;
    std::vector<double> alpha(history.size());
    std::vector<double> rho(history.size());
    for (std::size_t h = history.size(); h-- > 0;) {
      const double sy = masked_dot(history[h].s, history[h].y, free);
      rho[h] = sy > 0.0 ? 1.0 / sy : 0.0;
      alpha[h] = rho[h] * masked_dot(history[h].s, q, free);
      for (std::size_t i = 0; i < n; ++i) {
        if (free[i]) q[i] -= alpha[h] * history[h].y[i];
      }
    }
    double gamma = 1.0;
    if (!history.empty()) {
      const double yy = masked_dot(history.back().y, history.back().y, free);
      const double sy = masked_dot(history.back().s, history.back().y, free);
      if (yy > 0.0 && sy > 0.0) gamma = sy / yy;
    }
    for (std::size_t i = 0; i < n; ++i) q[i] *= gamma;
    for (std::size_t h = 0; h < history.size(); ++h) {
      const double beta = rho[h] * masked_dot(history[h].y, q, free);
      for (std::size_t i = 0; i < n; ++i) {
        if (free[i]) q[i] += (alpha[h] - beta) * history[h].s[i];
      }
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -q[i] : 0.0;

    double slope = masked_dot(g, d, free);
    bool steepest = history.empty();
    if (!(slope < 0.0)) {
      history.clear();
      steepest = true;
      for (std::size_t i = 0; i < n; ++i) d[i] = free[i] ? -g[i] : 0.0;
      slope = masked_dot(g, d, free);
      if (!(slope < 0.0)) {
        result.converged = true;
        break;
      }
    }

    double step = 1.0;
    if (steepest) {
      double dmax = 0.0;
      for (double di : d) dmax = std::max(dmax, std::abs(di));
      step = dmax > 1.0 ? 1.0 / dmax : 1.0;
    }

    bool accepted = false;
    double f_trial = fx;
    for (int bt = 0; bt < settings.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_trial[i] = x[i] + step * d[i];
      project(x_trial);
      double decrease = 0.0;
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        const double dx = x_trial[i] - x[i];
        decrease += g[i] * dx;
        moved = moved || dx != 0.0;
      }
      if (!moved) break;
      f_trial = f(x_trial, g_trial);
      if (std::isfinite(f_trial) && f_trial <= fx + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }

    if (!accepted) {
      if (!history.empty()) {
        history.clear();
        continue;
      }
      break;
    }

    Pair pair{std::vector<double>(n), std::vector<double>(n)};
    double sy = 0.0, ss = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pair.s[i] = x_trial[i] - x[i];
      pair.y[i] = g_trial[i] - g[i];
      sy += pair.s[i] * pair.y[i];
      ss += pair.s[i] * pair.s[i];
      yy += pair.y[i] * pair.y[i];
    }
    if (sy > 1e-12 * std::sqrt(ss * yy)) {
      history.push_back(std::move(pair));
      if (static_cast<int>(history.size()) > settings.memory) history.pop_front();
    }

    x.swap(x_trial);
    g.swap(g_trial);
    fx = f_trial;
    result.iterations = iter + 1;

    recent.push_back(fx);
    if (static_cast<int>(recent.size()) > settings.stall_window + 1) recent.pop_front();
    if (static_cast<int>(recent.size()) == settings.stall_window + 1) {
      const double drop = recent.front() - recent.back();
      if (drop <= settings.relative_decrease * std::max(std::abs(fx), 1.0)) {
        result.converged = true;
        break;
      }
    }
  }

  result.projected_gradient_norm = projected_gradient_norm(x, g);
  if (result.projected_gradient_norm < settings.gradient_tolerance) {
    result.converged = true;
  }
  result.value = fx;
  result.x = std::move(x);
  return result;
}

}  // namespace smoothride
