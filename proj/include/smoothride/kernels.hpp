#pragma once

// Data-parallel inner loops shared by the kinematics, objective and
// reconstruction code. Every kernel has a portable scalar reference and,
// on x86-64, an AVX2+FMA variant; the variant is picked once at runtime
// from CPUID and can be pinned with SMOOTHRIDE_SIMD=scalar|avx2.

#include <cstddef>
#include <span>
#include <string_view>

namespace smoothride::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
  // sum_k (ax_k^2 + ay_k^2) * dt_k
  double (*energy)(const double* ax, const double* ay, const double* dt,
                   std::size_t n);

  // sum_k w_k * (a_k^2 + b_k^2)
  double (*weighted_squares)(const double* a, const double* b,
                             const double* w, std::size_t n);

  // For polyline points (x, y) with speeds v, n_points >= 2:
  //   dist_k = |p_{k+1} - p_k|
  //   step_k = 2 dist_k / (v_k + v_{k+1})
  //   accel_k = (v_{k+1}^2 - v_k^2) / (2 dist_k)
  void (*segments)(const double* x, const double* y, const double* v,
                   std::size_t n_points, double* dist, double* step,
                   double* accel);

  // One column of the position Gram block used by the reconstruction
  // Gauss-Newton matrix. With (ci, si, vi) for the pivot sample:
  //   pp_j = coef_j * vi * v_j * (ci c_j + si s_j)
  //   pv_j = coef_j * vi * (ci s_j - si c_j)
  //   vp_j = coef_j * v_j * (si c_j - ci s_j)
  //   vv_j = coef_j * (ci c_j + si s_j)
  void (*gram_column)(double ci, double si, double vi, const double* c,
                      const double* s, const double* v, const double* coef,
                      std::size_t n, double* pp, double* pv, double* vp,
                      double* vv);
};

bool isa_supported(Isa isa);

/// Kernel table for a specific ISA. Throws if the CPU cannot run it.
const KernelTable& table(Isa isa);

/// ISA used by the convenience wrappers below.
Isa active_isa();

/// Overrides the runtime choice (tests, benchmarking). Throws if unsupported.
void set_active_isa(Isa isa);

const KernelTable& active();

double acceleration_energy(std::span<const double> ax,
                           std::span<const double> ay,
                           std::span<const double> dt);

double weighted_squares(std::span<const double> a, std::span<const double> b,
                        std::span<const double> w);

namespace detail {
const KernelTable& scalar_table();
#if defined(SMOOTHRIDE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
}  // namespace detail

}  // namespace smoothride::kernels
