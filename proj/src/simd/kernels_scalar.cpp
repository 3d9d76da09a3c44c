#include "morselab/simd/kernels.hpp"

#include <cmath>

namespace morselab::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scaled_difference(const double* lo, const double* hi, double scale, double* out,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (hi[i] - lo[i]) * scale;
}

void accumulate_difference(const double* lo, const double* hi, double scale, double* out,
                           std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] += (lo[i] - hi[i]) * scale;
}

void pair_average(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (a[i] + b[i]);
}

void multiply(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void squared_norm(const double* gx, const double* gy, double* out, std::size_t n) {
  if (gy == nullptr) {
    for (std::size_t i = 0; i < n; ++i) out[i] = gx[i] * gx[i];
    return;
  }
  for (std::size_t i = 0; i < n; ++i) out[i] = gx[i] * gx[i] + gy[i] * gy[i];
}

void cell_weights(const double* s, double p, double* pow_p, double* pow_pm1, double* pow_pm2,
                  std::size_t n) {
  if (is_small_integer_exponent(p)) {
    const int k = static_cast<int>(p);
    for (std::size_t i = 0; i < n; ++i) {
      const double b = 1.0 + s[i];
      double r = 1.0;
      if (k == 1) {
        r = 1.0 / b;
      } else {
        for (int j = 2; j < k; ++j) r *= b;
      }
      pow_pm2[i] = r;
      pow_pm1[i] = r * b;
      pow_p[i] = r * b * b;
    }
    return;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double b = 1.0 + s[i];
    const double r = std::pow(b, p - 2.0);
    pow_pm2[i] = r;
    pow_pm1[i] = r * b;
    pow_p[i] = r * b * b;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar",     &dot,     &axpy,         &scaled_difference,
                                 &accumulate_difference, &pair_average, &multiply,
                                 &squared_norm, &cell_weights};
  return table;
}

}  // namespace morselab::simd
