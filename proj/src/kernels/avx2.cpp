#include "isoflow/kernels.hpp"

#include <immintrin.h>

#include <algorithm>

namespace isoflow::kernels::avx2 {

namespace {

// Same operation order as the scalar path; no FMA.
inline __m256d hat(__m256d z) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  const __m256d az = _mm256_and_pd(z, abs_mask);
  return _mm256_max_pd(_mm256_setzero_pd(), _mm256_sub_pd(_mm256_set1_pd(1.0), az));
}

inline double hsum(__m256d v) {
  alignas(32) double p[4];
  _mm256_store_pd(p, v);
  return (p[0] + p[1]) + (p[2] + p[3]);
}

}  // namespace

void upwind_flux(const double* r_in, const double* r_out, const double* s, double eps,
                 double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vhalf_eps = _mm256_set1_pd(0.5 * eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vs = _mm256_loadu_pd(s + i);
    const __m256d vin = _mm256_loadu_pd(r_in + i);
    const __m256d vout = _mm256_loadu_pd(r_out + i);
    const __m256d sp = _mm256_max_pd(vs, zero);
    const __m256d sm = _mm256_min_pd(vs, zero);
    const __m256d c = hat(_mm256_div_pd(vs, veps));
    const __m256d upw = _mm256_add_pd(_mm256_mul_pd(vout, sm), _mm256_mul_pd(vin, sp));
    const __m256d diss = _mm256_mul_pd(_mm256_mul_pd(vhalf_eps, _mm256_sub_pd(vout, vin)), c);
    _mm256_storeu_pd(out + i, _mm256_sub_pd(upw, diss));
  }
  if (i < n) scalar::upwind_flux(r_in + i, r_out + i, s + i, eps, out + i, n - i);
}

void upwind_flux_derivatives(const double* r_in, const double* r_out, const double* s,
                             double eps, double* d_in, double* d_out, double* d_s,
                             std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vneg_eps = _mm256_set1_pd(-eps);
  const __m256d vhalf_eps = _mm256_set1_pd(0.5 * eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d vs = _mm256_loadu_pd(s + i);
    const __m256d vin = _mm256_loadu_pd(r_in + i);
    const __m256d vout = _mm256_loadu_pd(r_out + i);
    const __m256d sp = _mm256_max_pd(vs, zero);
    const __m256d sm = _mm256_min_pd(vs, zero);
    const __m256d hc = _mm256_mul_pd(vhalf_eps, hat(_mm256_div_pd(vs, veps)));
    _mm256_storeu_pd(d_in + i, _mm256_add_pd(sp, hc));
    _mm256_storeu_pd(d_out + i, _mm256_sub_pd(sm, hc));
    const __m256d avg = _mm256_mul_pd(half, _mm256_add_pd(vin, vout));
    const __m256d jump = _mm256_sub_pd(vout, vin);
    const __m256d pos = _mm256_and_pd(_mm256_cmp_pd(vs, veps, _CMP_GT_OQ), one);
    const __m256d neg = _mm256_and_pd(_mm256_cmp_pd(vs, vneg_eps, _CMP_LT_OQ), one);
    const __m256d sgn = _mm256_sub_pd(pos, neg);
    _mm256_storeu_pd(d_s + i, _mm256_sub_pd(avg, _mm256_mul_pd(_mm256_mul_pd(half, jump), sgn)));
  }
  if (i < n)
    scalar::upwind_flux_derivatives(r_in + i, r_out + i, s + i, eps, d_in + i, d_out + i,
                                    d_s + i, n - i);
}

double weighted_jump_squares(const double* a, const double* b, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(b + i), _mm256_loadu_pd(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(w + i), _mm256_mul_pd(d, d)));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double d = b[i] - a[i];
    sum = sum + w[i] * (d * d);
  }
  return sum;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  double sum = hsum(acc);
  for (; i < n; ++i) sum = sum + a[i] * b[i];
  return sum;
}

}  // namespace isoflow::kernels::avx2
