#pragma once

#include <cstddef>
#include <string>

namespace gravitom::kernels {

// Inner loop of the bar-model forward evaluation: given per-interval
// column centers (cx, cy) and depth intervals [ztop, zbot] (all arrays of
// length n, depths positive down with 0 < ztop < zbot), accumulates
//
//   sum_i 1/sqrt(d2_i + ztop_i^2) - 1/sqrt(d2_i + zbot_i^2),
//   d2_i = (sx - cx_i)^2 + (sy - cy_i)^2
//
// for a station at (sx, sy). The caller scales by gravity * rho * dx * dy.
using BarSumFn = double (*)(const double* cx, const double* cy,
                            const double* ztop, const double* zbot,
                            std::size_t n, double sx, double sy);

enum class Isa { scalar, avx2 };

double bar_sum_scalar(const double* cx, const double* cy, const double* ztop,
                      const double* zbot, std::size_t n, double sx, double sy);

#if defined(GRAVITOM_HAVE_AVX2)
double bar_sum_avx2(const double* cx, const double* cy, const double* ztop,
                    const double* zbot, std::size_t n, double sx, double sy);
#endif

// True when the implementation is compiled in and the CPU supports it.
bool supported(Isa isa);

// Forces an implementation; throws std::runtime_error if unsupported.
void select(Isa isa);

// Picks the widest supported implementation. The environment variable
// GRAVITOM_SIMD (values "scalar" or "avx2") overrides the automatic
// choice; an unsupported or unknown value throws std::runtime_error.
void select_auto();

// Implementation currently in effect (select_auto runs on first use).
Isa active();

const char* isa_name(Isa isa);

// Dispatched entry point used by the bar model.
double bar_sum(const double* cx, const double* cy, const double* ztop,
               const double* zbot, std::size_t n, double sx, double sy);

}  // namespace gravitom::kernels
