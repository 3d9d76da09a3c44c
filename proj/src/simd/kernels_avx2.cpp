#include "morselab/simd/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#define MORSELAB_HAVE_X86 1
#include <immintrin.h>
#else
#define MORSELAB_HAVE_X86 0
#endif

#include <cmath>

namespace morselab::simd {

#if MORSELAB_HAVE_X86

namespace {

// Functions carry their own target attribute so that this translation unit
// can be built without -mavx2 and only runs after a CPUID check.
#define MORSELAB_AVX2 __attribute__((target("avx2,fma")))

MORSELAB_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  acc0 = _mm256_add_pd(acc0, acc1);
  __m128d lo = _mm256_castpd256_pd128(acc0);
  __m128d hi = _mm256_extractf128_pd(acc0, 1);
  lo = _mm_add_pd(lo, hi);
  lo = _mm_add_sd(lo, _mm_unpackhi_pd(lo, lo));
  double acc = _mm_cvtsd_f64(lo);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

MORSELAB_AVX2 void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

MORSELAB_AVX2 void scaled_difference(const double* lo, const double* hi, double scale,
                                     double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(hi + i), _mm256_loadu_pd(lo + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(d, vs));
  }
  for (; i < n; ++i) out[i] = (hi[i] - lo[i]) * scale;
}

MORSELAB_AVX2 void accumulate_difference(const double* lo, const double* hi, double scale,
                                         double* out, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(lo + i), _mm256_loadu_pd(hi + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(out + i), _mm256_mul_pd(d, vs)));
  }
  for (; i < n; ++i) out[i] += (lo[i] - hi[i]) * scale;
}

MORSELAB_AVX2 void pair_average(const double* a, const double* b, double* out, std::size_t n) {
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d s = _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(half, s));
  }
  for (; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
}

MORSELAB_AVX2 void multiply(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

MORSELAB_AVX2 void squared_norm(const double* gx, const double* gy, double* out, std::size_t n) {
  std::size_t i = 0;
  if (gy == nullptr) {
    for (; i + 4 <= n; i += 4) {
      const __m256d x = _mm256_loadu_pd(gx + i);
      _mm256_storeu_pd(out + i, _mm256_mul_pd(x, x));
    }
    for (; i < n; ++i) out[i] = gx[i] * gx[i];
    return;
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(gx + i);
    const __m256d y = _mm256_loadu_pd(gy + i);
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_mul_pd(x, x), _mm256_mul_pd(y, y)));
  }
  for (; i < n; ++i) out[i] = gx[i] * gx[i] + gy[i] * gy[i];
}

MORSELAB_AVX2 void cell_weights(const double* s, double p, double* pow_p, double* pow_pm1,
                                double* pow_pm2, std::size_t n) {
  if (!is_small_integer_exponent(p)) {
    // No vector pow; non-integer exponents take the reference path.
    scalar_kernels().cell_weights(s, p, pow_p, pow_pm1, pow_pm2, n);
    return;
  }
  const int k = static_cast<int>(p);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d b = _mm256_add_pd(one, _mm256_loadu_pd(s + i));
    __m256d r = one;
    if (k == 1) {
      r = _mm256_div_pd(one, b);
    } else {
      for (int j = 2; j < k; ++j) r = _mm256_mul_pd(r, b);
    }
    const __m256d r1 = _mm256_mul_pd(r, b);
    _mm256_storeu_pd(pow_pm2 + i, r);
    _mm256_storeu_pd(pow_pm1 + i, r1);
    _mm256_storeu_pd(pow_p + i, _mm256_mul_pd(r1, b));
  }
  if (i < n) scalar_kernels().cell_weights(s + i, p, pow_p + i, pow_pm1 + i, pow_pm2 + i, n - i);
}

#undef MORSELAB_AVX2

}  // namespace

const KernelTable* avx2_kernels() {
  static const bool supported = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  if (!supported) return nullptr;
  static const KernelTable table{"avx2",        &dot,     &axpy,         &scaled_difference,
                                 &accumulate_difference, &pair_average, &multiply,
                                 &squared_norm, &cell_weights};
  return &table;
}

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace morselab::simd
