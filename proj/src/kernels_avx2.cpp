#include "gravitom/kernels.hpp"

#if defined(GRAVITOM_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>

namespace gravitom::kernels {

double bar_sum_avx2(const double* cx, const double* cy, const double* ztop,
                    const double* zbot, std::size_t n, double sx, double sy) {
  const __m256d vsx = _mm256_set1_pd(sx);
  const __m256d vsy = _mm256_set1_pd(sy);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();

  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(vsx, _mm256_loadu_pd(cx + i));
    const __m256d dy = _mm256_sub_pd(vsy, _mm256_loadu_pd(cy + i));
    const __m256d zt = _mm256_loadu_pd(ztop + i);
    const __m256d zb = _mm256_loadu_pd(zbot + i);
    const __m256d d2 = _mm256_fmadd_pd(dx, dx, _mm256_mul_pd(dy, dy));
    const __m256d rt =
        _mm256_div_pd(one, _mm256_sqrt_pd(_mm256_fmadd_pd(zt, zt, d2)));
    const __m256d rb =
        _mm256_div_pd(one, _mm256_sqrt_pd(_mm256_fmadd_pd(zb, zb, d2)));
    acc = _mm256_add_pd(acc, _mm256_sub_pd(rt, rb));
  }

  alignas(32) double lane[4];
  _mm256_store_pd(lane, acc);
  double sum = (lane[0] + lane[2]) + (lane[1] + lane[3]);

  for (; i < n; ++i) {
    const double dx = sx - cx[i];
    const double dy = sy - cy[i];
    const double d2 = dx * dx + dy * dy;
    sum += 1.0 / std::sqrt(d2 + ztop[i] * ztop[i]) -
           1.0 / std::sqrt(d2 + zbot[i] * zbot[i]);
  }
  return sum;
}

}  // namespace gravitom::kernels

#endif  // GRAVITOM_HAVE_AVX2
