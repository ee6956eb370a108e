#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace kgprobe::gnn {

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }
  void resize(std::size_t rows, std::size_t cols) {
    rows_ = rows;
    cols_ = cols;
    data_.assign(rows * cols, 0.0);
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// c = a * b
void matmul(const Matrix& a, const Matrix& b, Matrix& c);
/// c = a^T * b
void matmul_at_b(const Matrix& a, const Matrix& b, Matrix& c);
/// c += a * b^T
void matmul_a_bt_add(const Matrix& a, const Matrix& b, Matrix& c);

/// Sparse row-weighted neighbourhood operator (CSR). Row i of apply() is
/// sum_j w_ij * in_j, accumulated in ascending column order.
class SparseOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::size_t n, std::vector<std::size_t> offsets, std::vector<std::uint32_t> columns,
                 std::vector<double> weights);

  std::size_t size() const noexcept { return n_; }
  std::size_t nonzeros() const noexcept { return columns_.size(); }

  void apply(const Matrix& in, Matrix& out) const;
  /// out += A^T in
  void apply_transpose_add(const Matrix& in, Matrix& out) const;

  std::span<const std::uint32_t> row_columns(std::size_t i) const {
    return {columns_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  std::span<const double> row_weights(std::size_t i) const {
    return {weights_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }

 private:
  std::size_t n_ = 0;
  std::vector<std::size_t> offsets_{0};
  std::vector<std::uint32_t> columns_;
  std::vector<double> weights_;
};

}  // namespace kgprobe::gnn
