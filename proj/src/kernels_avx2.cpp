#include "calr/kernels.hpp"

#if defined(CALR_HAVE_AVX2)

#include <immintrin.h>

namespace calr::kernels::detail {

namespace {

// Lane-order horizontal sum so the reduction is deterministic.
inline double hsum(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return ((lane[0] + lane[1]) + lane[2]) + lane[3];
}

}  // namespace

ScoreSums score_sums_avx2(const double* y1, const double* y0, const double* d1,
                          const double* d0, std::size_t k, double r) {
  const __m256d rv = _mm256_set1_pd(r);
  __m256d uacc = _mm256_setzero_pd();
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    const __m256d vy1 = _mm256_loadu_pd(y1 + i);
    const __m256d vy0 = _mm256_loadu_pd(y0 + i);
    const __m256d vd1 = _mm256_loadu_pd(d1 + i);
    const __m256d vd0 = _mm256_loadu_pd(d0 + i);
    const __m256d ry1 = _mm256_mul_pd(rv, vy1);
    const __m256d s = _mm256_add_pd(ry1, vy0);
    const __m256d d = _mm256_add_pd(vd1, vd0);
    const __m256d q = _mm256_div_pd(ry1, s);
    uacc = _mm256_add_pd(uacc, _mm256_sub_pd(vd1, _mm256_mul_pd(d, q)));
    vacc = _mm256_add_pd(
        vacc, _mm256_mul_pd(_mm256_mul_pd(d, q), _mm256_div_pd(vy0, s)));
  }
  ScoreSums out{hsum(uacc), hsum(vacc)};
  for (; i < k; ++i) {
    const double ry1 = r * y1[i];
    const double s = ry1 + y0[i];
    const double d = d1[i] + d0[i];
    const double q = ry1 / s;
    out.u += d1[i] - d * q;
    out.v += d * q * (y0[i] / s);
  }
  return out;
}

void outcome_tables_avx2(const double* y1, const double* y0, const double* d1,
                         const double* d0, std::size_t k, double r, double* w1,
                         double* w0, double* c1, double* c0) {
  const __m256d rv = _mm256_set1_pd(r);
  std::size_t i = 0;
  for (; i + 4 <= k; i += 4) {
    const __m256d vy1 = _mm256_loadu_pd(y1 + i);
    const __m256d vy0 = _mm256_loadu_pd(y0 + i);
    const __m256d vd1 = _mm256_loadu_pd(d1 + i);
    const __m256d vd0 = _mm256_loadu_pd(d0 + i);
    const __m256d ry1 = _mm256_mul_pd(rv, vy1);
    const __m256d s = _mm256_add_pd(ry1, vy0);
    const __m256d d = _mm256_add_pd(vd1, vd0);
    const __m256d ds = _mm256_div_pd(d, s);
    const __m256d vw1 = _mm256_div_pd(vy0, s);
    const __m256d vw0 = _mm256_div_pd(ry1, s);
    _mm256_storeu_pd(w1 + i, vw1);
    _mm256_storeu_pd(w0 + i, vw0);
    _mm256_storeu_pd(c1 + i, _mm256_mul_pd(vw1, _mm256_mul_pd(rv, ds)));
    _mm256_storeu_pd(c0 + i, _mm256_mul_pd(vw0, ds));
  }
  for (; i < k; ++i) {
    const double ry1 = r * y1[i];
    const double s = ry1 + y0[i];
    const double d = d1[i] + d0[i];
    const double ds = d / s;
    w1[i] = y0[i] / s;
    w0[i] = ry1 / s;
    c1[i] = w1[i] * (r * ds);
    c0[i] = w0[i] * ds;
  }
}

}  // namespace calr::kernels::detail

#endif  // CALR_HAVE_AVX2
