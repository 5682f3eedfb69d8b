// Built with -mavx2 -mfma; only reached through the dispatcher after
// __builtin_cpu_supports has confirmed both extensions.

#include <immintrin.h>

#include <cmath>

#include "smoothride/kernels.hpp"

namespace smoothride::kernels::detail {
namespace {

constexpr std::size_t kLanes = 4;

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

double energy(const double* ax, const double* ay, const double* dt,
              std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 2 * kLanes <= n; k += 2 * kLanes) {
    const __m256d x0 = _mm256_loadu_pd(ax + k);
    const __m256d y0 = _mm256_loadu_pd(ay + k);
    const __m256d x1 = _mm256_loadu_pd(ax + k + kLanes);
    const __m256d y1 = _mm256_loadu_pd(ay + k + kLanes);
    const __m256d m0 = _mm256_fmadd_pd(x0, x0, _mm256_mul_pd(y0, y0));
    const __m256d m1 = _mm256_fmadd_pd(x1, x1, _mm256_mul_pd(y1, y1));
    acc0 = _mm256_fmadd_pd(m0, _mm256_loadu_pd(dt + k), acc0);
    acc1 = _mm256_fmadd_pd(m1, _mm256_loadu_pd(dt + k + kLanes), acc1);
  }
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d x0 = _mm256_loadu_pd(ax + k);
    const __m256d y0 = _mm256_loadu_pd(ay + k);
    const __m256d m0 = _mm256_fmadd_pd(x0, x0, _mm256_mul_pd(y0, y0));
    acc0 = _mm256_fmadd_pd(m0, _mm256_loadu_pd(dt + k), acc0);
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    sum += (ax[k] * ax[k] + ay[k] * ay[k]) * dt[k];
  }
  return sum;
}

double weighted_squares(const double* a, const double* b, const double* w,
                        std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d va = _mm256_loadu_pd(a + k);
    const __m256d vb = _mm256_loadu_pd(b + k);
    const __m256d m = _mm256_fmadd_pd(va, va, _mm256_mul_pd(vb, vb));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), m, acc);
  }
  double sum = hsum(acc);
  for (; k < n; ++k) {
    sum += w[k] * (a[k] * a[k] + b[k] * b[k]);
  }
  return sum;
}

void segments(const double* x, const double* y, const double* v,
              std::size_t n_points, double* dist, double* step,
              double* accel) {
  if (n_points < 2) return;
  const std::size_t n = n_points - 1;
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t k = 0;
  for (; k + kLanes <= n; k += kLanes) {
    const __m256d dx =
        _mm256_sub_pd(_mm256_loadu_pd(x + k + 1), _mm256_loadu_pd(x + k));
    const __m256d dy =
        _mm256_sub_pd(_mm256_loadu_pd(y + k + 1), _mm256_loadu_pd(y + k));
    const __m256d d =
        _mm256_sqrt_pd(_mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy)));
    const __m256d v0 = _mm256_loadu_pd(v + k);
    const __m256d v1 = _mm256_loadu_pd(v + k + 1);
    const __m256d twice_d = _mm256_mul_pd(two, d);
    _mm256_storeu_pd(dist + k, d);
    _mm256_storeu_pd(step + k, _mm256_div_pd(twice_d, _mm256_add_pd(v0, v1)));
    const __m256d dv2 = _mm256_fmsub_pd(v1, v1, _mm256_mul_pd(v0, v0));
    _mm256_storeu_pd(accel + k, _mm256_div_pd(dv2, twice_d));
  }
  for (; k < n; ++k) {
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
  const __m256d vci = _mm256_set1_pd(ci);
  const __m256d vsi = _mm256_set1_pd(si);
  const __m256d vvi = _mm256_set1_pd(vi);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d cj = _mm256_loadu_pd(c + j);
    const __m256d sj = _mm256_loadu_pd(s + j);
    const __m256d vj = _mm256_loadu_pd(v + j);
    const __m256d kj = _mm256_loadu_pd(coef + j);
    const __m256d cosd = _mm256_fmadd_pd(vci, cj, _mm256_mul_pd(vsi, sj));
    const __m256d sind = _mm256_fmsub_pd(vci, sj, _mm256_mul_pd(vsi, cj));
    const __m256d kv = _mm256_mul_pd(kj, vj);
    _mm256_storeu_pd(pp + j, _mm256_mul_pd(_mm256_mul_pd(kv, vvi), cosd));
    _mm256_storeu_pd(pv + j, _mm256_mul_pd(_mm256_mul_pd(kj, vvi), sind));
    _mm256_storeu_pd(vp + j,
                     _mm256_sub_pd(_mm256_setzero_pd(), _mm256_mul_pd(kv, sind)));
    _mm256_storeu_pd(vv + j, _mm256_mul_pd(kj, cosd));
  }
  for (; j < n; ++j) {
    const double cosd = ci * c[j] + si * s[j];
    const double sind = ci * s[j] - si * c[j];
    pp[j] = coef[j] * vi * v[j] * cosd;
    pv[j] = coef[j] * vi * sind;
    vp[j] = -coef[j] * v[j] * sind;
    vv[j] = coef[j] * cosd;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable t{energy, weighted_squares, segments, gram_column};
  return t;
}

}  // namespace smoothride::kernels::detail
