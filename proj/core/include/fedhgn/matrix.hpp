#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedhgn {

// Dense row-major matrix of doubles. Used for node embeddings, classifier
// blocks and optimizer moments.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  static Matrix identity(std::size_t n);

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

  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// a * b. Zero entries of `a` are skipped, which makes bag-of-words feature
// matrices cheap to multiply.
Matrix matmul(const Matrix& a, const Matrix& b);
// aᵀ * b
Matrix matmul_transpose_a(const Matrix& a, const Matrix& b);
// a * bᵀ
Matrix matmul_transpose_b(const Matrix& a, const Matrix& b);

Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace fedhgn
