#include <cmath>

#include "kgprobe/gnn/kernels.hpp"

namespace kgprobe::simd {
namespace {

double dot_ref(const double* x, const double* y, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
  return s;
}

void axpy_ref(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_ref(const double* in, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

void relu_backward_ref(const double* preact, double* grad, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!(preact[i] > 0.0)) grad[i] = 0.0;
}

void adam_ref(double* p, const double* g, double* m, double* v, std::size_t n, double lr_t, double b1, double b2,
              double eps_t) {
  for (std::size_t i = 0; i < n; ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * (g[i] * g[i]);
    p[i] -= lr_t * m[i] / (std::sqrt(v[i]) + eps_t);
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", dot_ref, axpy_ref, relu_ref, relu_backward_ref, adam_ref};
  return table;
}

}  // namespace kgprobe::simd
