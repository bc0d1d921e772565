#include "gravitom/kernels.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gravitom::kernels {

double bar_sum_scalar(const double* cx, const double* cy, const double* ztop,
                      const double* zbot, std::size_t n, double sx,
                      double sy) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = sx - cx[i];
    const double dy = sy - cy[i];
    const double d2 = dx * dx + dy * dy;
    sum += 1.0 / std::sqrt(d2 + ztop[i] * ztop[i]) -
           1.0 / std::sqrt(d2 + zbot[i] * zbot[i]);
  }
  return sum;
}

namespace {

BarSumFn g_fn = nullptr;
Isa g_isa = Isa::scalar;

BarSumFn implementation(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &bar_sum_scalar;
    case Isa::avx2:
#if defined(GRAVITOM_HAVE_AVX2)
      return &bar_sum_avx2;
#else
      break;
#endif
  }
  return nullptr;
}

}  // namespace

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(GRAVITOM_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

void select(Isa isa) {
  if (!supported(isa))
    throw std::runtime_error(std::string("kernel implementation '") +
                             isa_name(isa) +
                             "' is not available on this machine");
  g_isa = isa;
  g_fn = implementation(isa);
}

void select_auto() {
  if (const char* env = std::getenv("GRAVITOM_SIMD")) {
    const std::string name(env);
    if (name == "scalar")
      select(Isa::scalar);
    else if (name == "avx2")
      select(Isa::avx2);
    else
      throw std::runtime_error("GRAVITOM_SIMD: unknown implementation '" +
                               name + "' (expected scalar or avx2)");
    return;
  }
  select(supported(Isa::avx2) ? Isa::avx2 : Isa::scalar);
}

Isa active() {
  if (g_fn == nullptr) select_auto();
  return g_isa;
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

double bar_sum(const double* cx, const double* cy, const double* ztop,
               const double* zbot, std::size_t n, double sx, double sy) {
  if (g_fn == nullptr) select_auto();
  return g_fn(cx, cy, ztop, zbot, n, sx, sy);
}

}  // namespace gravitom::kernels
