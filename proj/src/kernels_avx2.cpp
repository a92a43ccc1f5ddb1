// AVX2+FMA variants of the kernel table. This translation unit is compiled
// with -mavx2 -mfma; it must only be reached through the dispatcher, which
// checks cpu support at startup.

#include "netmoments/kernels.hpp"

#if defined(NETMOMENTS_HAVE_AVX2)

#include <immintrin.h>

namespace netmoments::simd::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matvec_avx2(const double* a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a + i * n;
    __m256d acc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4)
      acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), _mm256_loadu_pd(x + j),
                            acc);
    double s = hsum(acc);
    for (; j < n; ++j) s += row[j] * x[j];
    y[i] = s;
  }
}

double residual_sq_avx2(const double* y, const double* v, double lambda,
                        std::size_t n) {
  const __m256d lam = _mm256_set1_pd(lambda);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fnmadd_pd(lam, _mm256_loadu_pd(v + i),
                                 _mm256_loadu_pd(y + i));
    acc = _mm256_fmadd_pd(r, r, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = y[i] - lambda * v[i];
    s += r * r;
  }
  return s;
}

void scale_avx2(double* v, double c, std::size_t n) {
  const __m256d cc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(v + i, _mm256_mul_pd(_mm256_loadu_pd(v + i), cc));
  for (; i < n; ++i) v[i] *= c;
}

void central_sums_avx2(const double* v, std::size_t n, double mean, double* m2,
                       double* m3) {
  const __m256d mu = _mm256_set1_pd(mean);
  __m256d acc2 = _mm256_setzero_pd();
  __m256d acc3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(v + i), mu);
    __m256d d2 = _mm256_mul_pd(d, d);
    acc2 = _mm256_add_pd(acc2, d2);
    acc3 = _mm256_fmadd_pd(d2, d, acc3);
  }
  double s2 = hsum(acc2), s3 = hsum(acc3);
  for (; i < n; ++i) {
    const double d = v[i] - mean;
    s2 += d * d;
    s3 += d * d * d;
  }
  *m2 = s2;
  *m3 = s3;
}

}  // namespace

const KernelOps avx2_ops = {
    sum_avx2,   dot_avx2,   matvec_avx2,
    residual_sq_avx2, scale_avx2, central_sums_avx2,
    "avx2",
};

}  // namespace netmoments::simd::detail

#endif  // NETMOMENTS_HAVE_AVX2
