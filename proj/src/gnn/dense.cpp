#include "kgprobe/gnn/dense.hpp"

#include "kgprobe/error.hpp"
#include "kgprobe/gnn/kernels.hpp"

namespace kgprobe::gnn {

void matmul(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.rows()) throw InputError("matmul: inner dimensions differ");
  c.resize(a.rows(), b.cols());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out = c.row(i).data();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s != 0.0) k.axpy(s, b.row(j).data(), out, b.cols());
    }
  }
}

void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.rows() != b.rows()) throw InputError("matmul_at_b: row counts differ");
  c.resize(a.cols(), b.cols());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* brow = b.row(i).data();
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const double s = a(i, j);
      if (s != 0.0) k.axpy(s, brow, c.row(j).data(), b.cols());
    }
  }
}

void matmul_a_bt_add(const Matrix& a, const Matrix& b, Matrix& c) {
  if (a.cols() != b.cols() || c.rows() != a.rows() || c.cols() != b.rows())
    throw InputError("matmul_a_bt_add: dimension mismatch");
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) c(i, j) += k.dot(a.row(i).data(), b.row(j).data(), a.cols());
}

SparseOperator::SparseOperator(std::size_t n, std::vector<std::size_t> offsets, std::vector<std::uint32_t> columns,
                               std::vector<double> weights)
    : n_(n), offsets_(std::move(offsets)), columns_(std::move(columns)), weights_(std::move(weights)) {
  if (offsets_.size() != n_ + 1 || columns_.size() != weights_.size() || offsets_.back() != columns_.size())
    throw InputError("inconsistent sparse operator");
}

void SparseOperator::apply(const Matrix& in, Matrix& out) const {
  if (in.rows() != n_) throw InputError("sparse operator: row count mismatch");
  out.resize(n_, in.cols());
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < n_; ++i) {
    double* dst = out.row(i).data();
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
      k.axpy(weights_[e], in.row(columns_[e]).data(), dst, in.cols());
  }
}

void SparseOperator::apply_transpose_add(const Matrix& in, Matrix& out) const {
  if (in.rows() != n_ || out.rows() != n_ || out.cols() != in.cols())
    throw InputError("sparse operator transpose: dimension mismatch");
  const auto& k = simd::active_kernels();
  for (std::size_t i = 0; i < n_; ++i) {
    const double* src = in.row(i).data();
    for (std::size_t e = offsets_[i]; e < offsets_[i + 1]; ++e)
      k.axpy(weights_[e], src, out.row(columns_[e]).data(), in.cols());
  }
}

}  // namespace kgprobe::gnn
