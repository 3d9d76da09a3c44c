#pragma once

// Data-parallel inner loops used by the energy evaluators and the flow
// integrator. Every kernel has a scalar reference implementation; SIMD
// variants are selected once at runtime and must agree with the reference
// up to floating-point reassociation.

#include <cstddef>
#include <string_view>

namespace morselab::simd {

struct KernelTable {
  std::string_view name;

  /// sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out[i] = (hi[i] - lo[i]) * scale
  void (*scaled_difference)(const double* lo, const double* hi, double scale, double* out,
                            std::size_t n);
  /// out[i] += (lo[i] - hi[i]) * scale
  void (*accumulate_difference)(const double* lo, const double* hi, double scale, double* out,
                                std::size_t n);
  /// out[i] = 0.5 * (a[i] + b[i])
  void (*pair_average)(const double* a, const double* b, double* out, std::size_t n);
  /// out[i] = a[i] * b[i]
  void (*multiply)(const double* a, const double* b, double* out, std::size_t n);
  /// out[i] = gx[i]^2 + gy[i]^2; gy may be null (1D).
  void (*squared_norm)(const double* gx, const double* gy, double* out, std::size_t n);
  /// With b = 1 + s[i]: pow_p[i] = b^p, pow_pm1[i] = b^(p-1), pow_pm2[i] = b^(p-2).
  void (*cell_weights)(const double* s, double p, double* pow_p, double* pow_pm1, double* pow_pm2,
                       std::size_t n);
};

const KernelTable& scalar_kernels();

/// nullptr when the running CPU (or the build) lacks AVX2+FMA.
const KernelTable* avx2_kernels();

/// Selected on first use: MORSELAB_SIMD=scalar|avx2|auto (default auto).
const KernelTable& active_kernels();

/// Exponent handled by repeated multiplication when it is a small integer.
inline bool is_small_integer_exponent(double p) {
  return p >= 1.0 && p <= 16.0 && static_cast<double>(static_cast<int>(p)) == p;
}

}  // namespace morselab::simd
