#pragma once

#include <cstddef>
#include <string_view>

namespace kgprobe::simd {

/// Dense double-precision inner loops used by the regressor. Every variant
/// must agree with the scalar reference: element-wise kernels bit for bit,
/// reductions (dot) up to summation order.
struct KernelTable {
  const char* name;
  double (*dot)(const double* x, const double* y, std::size_t n);
  /// y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  /// out = max(in, 0)
  void (*relu)(const double* in, double* out, std::size_t n);
  /// grad[i] = preact[i] > 0 ? grad[i] : 0
  void (*relu_backward)(const double* preact, double* grad, std::size_t n);
  /// Adam update with bias-corrected step size `lr_t`:
  ///   m = b1 m + (1-b1) g;  v = b2 v + (1-b2) g^2;  p -= lr_t m / (sqrt(v) + eps_t)
  void (*adam)(double* param, const double* grad, double* m, double* v, std::size_t n, double lr_t, double b1,
               double b2, double eps_t);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels();

/// Kernels used by the library. Chosen on first use: the KGPROBE_KERNELS
/// environment variable ("scalar", "avx2", "auto") if set, else the widest
/// variant the CPU supports.
const KernelTable& active_kernels();

/// Overrides the active table. Returns false (leaving it unchanged) when the
/// requested variant is unavailable.
bool select_kernels(std::string_view name);

}  // namespace kgprobe::simd
