#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "smoothride/error.hpp"
#include "smoothride/kernels.hpp"

namespace smoothride::kernels {
namespace {

Isa detect() {
  if (const char* env = std::getenv("SMOOTHRIDE_SIMD")) {
    const std::string value(env);
    if (value == "scalar") return Isa::scalar;
    if (value == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SMOOTHRIDE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!isa_supported(isa)) {
    throw DomainError("kernel ISA " + std::string(isa_name(isa)) +
                      " is not supported on this CPU");
  }
#if defined(SMOOTHRIDE_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table();
#endif
  return detail::scalar_table();
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  table(isa);
  current().store(isa, std::memory_order_relaxed);
}

const KernelTable& active() { return table(active_isa()); }

double acceleration_energy(std::span<const double> ax,
                           std::span<const double> ay,
                           std::span<const double> dt) {
  if (ax.size() != ay.size() || ax.size() != dt.size()) {
    throw DimensionError("acceleration_energy: length mismatch");
  }
  return active().energy(ax.data(), ay.data(), dt.data(), ax.size());
}

double weighted_squares(std::span<const double> a, std::span<const double> b,
                        std::span<const double> w) {
  if (a.size() != b.size() || a.size() != w.size()) {
    throw DimensionError("weighted_squares: length mismatch");
  }
  return active().weighted_squares(a.data(), b.data(), w.data(), a.size());
}

}  // namespace smoothride::kernels
