#include <cmath>

#include "smoothride/kernels.hpp"

namespace smoothride::kernels::detail {
namespace {

double energy(const double* ax, const double* ay, const double* dt,
              std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += (ax[k] * ax[k] + ay[k] * ay[k]) * dt[k];
  }
  return sum;
}

double weighted_squares(const double* a, const double* b, const double* w,
                        std::size_t n) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += w[k] * (a[k] * a[k] + b[k] * b[k]);
  }
  return sum;
}

void segments(const double* x, const double* y, const double* v,
              std::size_t n_points, double* dist, double* step,
              double* accel) {
  for (std::size_t k = 0; k + 1 < n_points; ++k) {
    const double dx = x[k + 1] - x[k];
    const double dy = y[k + 1] - y[k];
    const double d = std::sqrt(dx * dx + dy * dy);
    dist[k] = d;
    step[k] = 2.0 * d / (v[k] + v[k + 1]);
    accel[k] = (v[k + 1] * v[k + 1] - v[k] * v[k]) / (2.0 * d);
  }
}

void gram_column(double ci, double si, double vi, const double* c,
                 const double* s, const double* v, const double* coef,
                 std::size_t n, double* pp, double* pv, double* vp,
                 double* vv) {
  for (std::size_t j = 0; j < n; ++j) {
    const double cosd = ci * c[j] + si * s[j];
    const double sind = ci * s[j] - si * c[j];
    pp[j] = coef[j] * vi * v[j] * cosd;
    pv[j] = coef[j] * vi * sind;
    vp[j] = -coef[j] * v[j] * sind;
    vv[j] = coef[j] * cosd;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable t{energy, weighted_squares, segments, gram_column};
  return t;
}

}  // namespace smoothride::kernels::detail
